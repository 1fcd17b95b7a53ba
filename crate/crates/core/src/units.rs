//! Physical constants and unit conversions.
//!
//! Internally ħ = 1, time is in microseconds, angular frequencies are in
//! rad/μs and lengths in micrometres. Configuration inputs quoted as ordinary
//! frequencies in MHz are converted with [`mhz`].

use crate::scalar::Real;

/// Elementary charge (C).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Vacuum permittivity (F/m).
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant (J/K).
pub const K_B: f64 = 1.380_649e-23;
/// Atomic mass unit (kg).
pub const AMU: f64 = 1.660_539_066_60e-27;
/// Fine-structure constant.
pub const ALPHA: f64 = 7.297_352_569_3e-3;
/// Rydberg energy (J).
pub const RYDBERG_ENERGY: f64 = 2.179_872_361_103_5e-18;
/// Bohr radius (m).
pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;
/// Apéry's constant ζ(3).
pub const ZETA_3: f64 = 1.202_056_903_159_594_3;

/// Coulomb constant 1/(4πε₀) in SI units.
pub fn coulomb_constant() -> f64 {
    1.0 / (4.0 * std::f64::consts::PI * EPSILON_0)
}

/// Ordinary frequency in MHz to angular frequency in rad/μs.
#[inline]
pub fn mhz<T: Real>(f_mhz: f64) -> T {
    T::lit(2.0 * std::f64::consts::PI * f_mhz)
}

/// Angular frequency in rad/μs back to ordinary MHz.
#[inline]
pub fn to_mhz<T: Real>(omega: T) -> f64 {
    omega.to_f64_lossy() / (2.0 * std::f64::consts::PI)
}

/// Converts an energy in joules to an angular frequency in rad/μs.
#[inline]
pub fn joule_to_rad_per_us(energy: f64) -> f64 {
    energy / HBAR * 1e-6
}

/// Converts an angular frequency in rad/μs to joules.
#[inline]
pub fn rad_per_us_to_joule(omega: f64) -> f64 {
    omega * 1e6 * HBAR
}

/// Lifetime in μs to a decay rate in 1/μs. A non-positive or infinite
/// lifetime yields a zero rate.
pub fn rate_from_lifetime<T: Real>(tau_us: f64) -> T {
    if tau_us.is_finite() && tau_us > 0.0 {
        T::lit(1.0 / tau_us)
    } else {
        T::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mhz_roundtrip() {
        let w: f64 = mhz(1.9);
        assert!((w - 11.938_052_083_641_214).abs() < 1e-12);
        assert!((to_mhz(w) - 1.9).abs() < 1e-14);
    }

    #[test]
    fn joule_conversion_roundtrip() {
        let w = 123.4;
        assert!((joule_to_rad_per_us(rad_per_us_to_joule(w)) - w).abs() < 1e-10);
    }

    #[test]
    fn lifetimes() {
        let g: f64 = rate_from_lifetime(7.8);
        assert!((g - 1.0 / 7.8).abs() < 1e-15);
        assert_eq!(rate_from_lifetime::<f64>(f64::INFINITY), 0.0);
    }
}
