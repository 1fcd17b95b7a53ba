//! Direct black-body photoionisation of a Rydberg ion into the doubly
//! charged state, in the semiclassical approximation
//! `W ≈ (α³k_BT/ħπ²)[2.8/n^{7/3} + 2.09L²/n^{11/3}] ln[1/(1 − e^{−ħω/k_BT})]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::units::{ALPHA, HBAR, K_B, RYDBERG_ENERGY};

/// Core charge seen by the Rydberg electron of Sr⁺.
pub const CORE_CHARGE: u32 = 2;

/// Below this `n` the semiclassical formula is outside its range.
pub const MIN_RELIABLE_N: u32 = 20;

/// Hydrogenic ionisation threshold `Z² Ry/(ħn²)` in rad/s for `Z = 2`.
pub fn omega_threshold<T: Real>(n: u32) -> Result<T> {
    if n == 0 {
        return Err(Error::Config("principal quantum number must be positive".into()));
    }
    let z2 = f64::from(CORE_CHARGE * CORE_CHARGE);
    Ok(T::lit(z2 * RYDBERG_ENERGY / (HBAR * f64::from(n) * f64::from(n))))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BbrQuery<T> {
    pub n: u32,
    pub l: u32,
    /// Black-body temperature (K).
    pub temperature_k: T,
    /// Ionisation threshold ω_nL (rad/s).
    pub omega_threshold: T,
}

impl<T: Real> BbrQuery<T> {
    /// Query with the hydrogenic threshold.
    pub fn new(n: u32, l: u32, temperature_k: T) -> Result<Self> {
        Self { n, l, temperature_k, omega_threshold: omega_threshold(n)? }.validated()
    }

    pub fn with_threshold(self, omega_threshold: T) -> Result<Self> {
        Self { omega_threshold, ..self }.validated()
    }

    fn validated(self) -> Result<Self> {
        if self.n == 0 {
            return Err(Error::Config("principal quantum number must be positive".into()));
        }
        if !(self.temperature_k >= T::zero()) || !self.temperature_k.is_finite_value() {
            return Err(Error::Config("black-body temperature must be finite and >= 0".into()));
        }
        if !(self.omega_threshold > T::zero()) || !self.omega_threshold.is_finite_value() {
            return Err(Error::Config("ionisation threshold frequency must be positive".into()));
        }
        if self.n < MIN_RELIABLE_N {
            log::warn!("n = {} is below {MIN_RELIABLE_N}; the semiclassical rate is unreliable", self.n);
        }
        Ok(self)
    }
}

/// Ionisation rate in s⁻¹. Exactly zero at `T_b = 0`.
pub fn ionisation_rate<T: Real>(q: &BbrQuery<T>) -> Result<T> {
    let q = q.validated()?;
    if q.temperature_k == T::zero() {
        return Ok(T::zero());
    }
    let n = f64::from(q.n);
    let l = f64::from(q.l);
    let bracket = T::lit(2.8 * n.powf(-7.0 / 3.0) + 2.09 * l * l * n.powf(-11.0 / 3.0));
    let prefactor = T::lit(ALPHA.powi(3) * K_B / (HBAR * std::f64::consts::PI.powi(2))) * q.temperature_k;
    let x = T::lit(HBAR / K_B) * q.omega_threshold / q.temperature_k;
    // ln[1/(1 − e^{−x})] without cancellation for large x.
    let log_term = -(-(-x).exp()).ln_1p();
    Ok(prefactor * bracket * log_term)
}

/// Rates along `ns` at fixed `L` and temperature, using hydrogenic thresholds.
pub fn n_sweep<T: Real>(ns: &[u32], l: u32, temperature_k: T) -> Result<Vec<T>> {
    ns.iter().map(|&n| ionisation_rate(&BbrQuery::new(n, l, temperature_k)?)).collect()
}

/// Rates along `temperatures` for fixed `(n, L)`.
pub fn temperature_sweep<T: Real>(n: u32, l: u32, temperatures: &[T]) -> Result<Vec<T>> {
    temperatures.iter().map(|&t| ionisation_rate(&BbrQuery::new(n, l, t)?)).collect()
}
