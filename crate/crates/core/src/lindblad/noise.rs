use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectra::MicrowaveField;

/// Classical noise on the drive fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel<T> {
    /// Linewidth of the first UV laser (rad/μs).
    pub gamma1: T,
    /// Linewidth of the second UV laser (rad/μs).
    pub gamma2: T,
    /// Relative standard deviation of the microwave Rabi frequency.
    pub mw_fractional_sigma: T,
    /// Number of quasi-static microwave samples to average over.
    pub shots: usize,
    pub seed: u64,
}

impl<T: Real> Default for NoiseModel<T> {
    fn default() -> Self {
        Self::none()
    }
}

impl<T: Real> NoiseModel<T> {
    pub fn none() -> Self {
        Self { gamma1: T::zero(), gamma2: T::zero(), mw_fractional_sigma: T::zero(), shots: 1, seed: 0 }
    }

    pub fn new(gamma1: T, gamma2: T, mw_fractional_sigma: T, shots: usize, seed: u64) -> Result<Self> {
        let m = Self { gamma1, gamma2, mw_fractional_sigma, shots, seed };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("gamma1", self.gamma1), ("gamma2", self.gamma2), ("mw_fractional_sigma", self.mw_fractional_sigma)] {
            if !v.is_finite_value() || v < T::zero() {
                return Err(Error::Config(format!("{name} must be finite and >= 0")));
            }
        }
        if self.shots == 0 {
            return Err(Error::Config("shots must be >= 1".into()));
        }
        Ok(())
    }

    /// Microwave fields for each quasi-static shot. Without power noise this
    /// is the nominal field once, regardless of `shots`.
    pub fn sample_mw(&self, nominal: &MicrowaveField<T>) -> Vec<MicrowaveField<T>> {
        if self.mw_fractional_sigma == T::zero() || nominal.omega_mw == T::zero() {
            return vec![*nominal];
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.shots)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                let scale = (T::one() + self.mw_fractional_sigma * T::lit(z)).max(T::zero());
                MicrowaveField { omega_mw: nominal.omega_mw * scale, delta_mw: nominal.delta_mw }
            })
            .collect()
    }
}
