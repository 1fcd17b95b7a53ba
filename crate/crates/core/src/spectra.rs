//! Microwave-dressed Rydberg states, dipole-dipole interaction strength and
//! the three-level STIRAP eigensystem.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::units;

/// Microwave field coupling the Rydberg `s` and `p` levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MicrowaveField<T> {
    /// Rabi frequency Ω_MW (rad/μs).
    pub omega_mw: T,
    /// Detuning Δ_MW (rad/μs), entering as the energy of `s` relative to `p`.
    pub delta_mw: T,
}

impl<T: Real> MicrowaveField<T> {
    pub fn new(omega_mw: T, delta_mw: T) -> Result<Self> {
        if !omega_mw.is_finite_value() || !delta_mw.is_finite_value() || omega_mw < T::zero() {
            return Err(Error::Config("microwave Rabi frequency must be finite and >= 0".into()));
        }
        Ok(Self { omega_mw, delta_mw })
    }

    /// No microwave dressing at all.
    pub fn off() -> Self {
        Self { omega_mw: T::zero(), delta_mw: T::zero() }
    }

    /// Generalized Rabi frequency √(Δ² + Ω²).
    pub fn generalized_rabi(&self) -> T {
        (self.delta_mw * self.delta_mw + self.omega_mw * self.omega_mw).sqrt()
    }
}

/// An eigenstate `c_s|s> + c_p|p>` of the dressing Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DressedState<T> {
    pub energy: T,
    pub c_s: T,
    pub c_p: T,
}

/// The dressed pair `|+>`, `|->`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DressedPair<T> {
    pub plus: DressedState<T>,
    pub minus: DressedState<T>,
}

/// Eigenstates of `[[Δ_MW, Ω_MW/2], [Ω_MW/2, 0]]` in the basis `(s, p)`.
///
/// Energies are `E± = (Δ ± R)/2` with `R = √(Δ² + Ω²)`. Coefficients are
/// real with `c_s(+) = √((1 + Δ/R)/2) ≥ 0` and `c_p(+) = √((1 − Δ/R)/2) ≥ 0`,
/// so `|+>` tends to `|s>` as Ω_MW → 0 with Δ_MW > 0, and
/// `|-> = −c_p(+)|s> + c_s(+)|p>`.
pub fn dressed_states<T: Real>(mw: &MicrowaveField<T>) -> Result<DressedPair<T>> {
    let r = mw.generalized_rabi();
    if r == T::zero() {
        return Err(Error::DressingUndefined);
    }
    let half = T::lit(0.5);
    let x = mw.delta_mw / r;
    let cs = (half * (T::one() + x)).max(T::zero()).sqrt();
    let cp = (half * (T::one() - x)).max(T::zero()).sqrt();
    Ok(DressedPair {
        plus: DressedState { energy: half * (mw.delta_mw + r), c_s: cs, c_p: cp },
        minus: DressedState { energy: half * (mw.delta_mw - r), c_s: -cp, c_p: cs },
    })
}

/// Reference geometry at which the default dipole matrix element is calibrated.
pub const REFERENCE_N: u32 = 46;
pub const REFERENCE_Z: u32 = 2;
pub const REFERENCE_SEPARATION_UM: f64 = 4.2;
pub const REFERENCE_V_MAX_MHZ: f64 = 1.9;

/// `V_max` in rad/μs for a transition dipole (C·m) and separation (μm).
pub fn v_max_from_dipole(dipole_sp: f64, separation_um: f64) -> f64 {
    let r = separation_um * 1e-6;
    units::joule_to_rad_per_us(units::coulomb_constant() * dipole_sp * dipole_sp / (r * r * r))
}

/// Dipole (C·m) giving interaction `v_max` (rad/μs) at `separation_um`.
pub fn dipole_from_v_max(v_max: f64, separation_um: f64) -> f64 {
    let r = separation_um * 1e-6;
    (units::rad_per_us_to_joule(v_max) * r * r * r / units::coulomb_constant()).sqrt()
}

/// Default `<s|μ|p>` for n = 46 in Sr⁺, calibrated so that 4.2 μm separation
/// gives V_max = 2π × 1.9 MHz (about 380 e·a₀, 3.22e-27 C·m).
pub fn reference_dipole() -> f64 {
    dipole_from_v_max(units::mhz::<f64>(REFERENCE_V_MAX_MHZ), REFERENCE_SEPARATION_UM)
}

/// Two ions excited to the same dressed Rydberg state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RydbergPair {
    pub n: u32,
    pub z: u32,
    /// `<s|μ|p>` in C·m.
    pub dipole_sp: f64,
    /// Ion separation in μm.
    pub separation_um: f64,
}

impl RydbergPair {
    pub fn new(n: u32, z: u32, dipole_sp: f64, separation_um: f64) -> Result<Self> {
        if n == 0 || z == 0 {
            return Err(Error::Config("n and Z must be positive".into()));
        }
        if !(dipole_sp.is_finite() && dipole_sp > 0.0) {
            return Err(Error::Config("dipole matrix element must be positive".into()));
        }
        if !(separation_um.is_finite() && separation_um > 0.0) {
            return Err(Error::Config("ion separation must be positive".into()));
        }
        Ok(Self { n, z, dipole_sp, separation_um })
    }

    /// Pair with the dipole scaled hydrogenically (∝ n²/Z) from the reference
    /// calibration.
    pub fn scaled(n: u32, z: u32, separation_um: f64) -> Result<Self> {
        let d = reference_dipole() * (n as f64 / REFERENCE_N as f64).powi(2) * (REFERENCE_Z as f64 / z as f64);
        Self::new(n, z, d, separation_um)
    }

    /// Pair whose dipole reproduces a prescribed `v_max` (rad/μs).
    pub fn from_v_max(n: u32, z: u32, v_max: f64, separation_um: f64) -> Result<Self> {
        if !(v_max.is_finite() && v_max > 0.0) {
            return Err(Error::Config("v_max must be positive".into()));
        }
        Self::new(n, z, dipole_from_v_max(v_max, separation_um), separation_um)
    }

    /// The reference pair (n = 46, Z = 2, 4.2 μm).
    pub fn reference() -> Self {
        Self {
            n: REFERENCE_N,
            z: REFERENCE_Z,
            dipole_sp: reference_dipole(),
            separation_um: REFERENCE_SEPARATION_UM,
        }
    }

    /// Maximum interaction strength (rad/μs), always recomputed.
    pub fn v_max<T: Real>(&self) -> T {
        T::lit(v_max_from_dipole(self.dipole_sp, self.separation_um))
    }
}

/// Dressed interaction `V = V_max Ω²/(Δ² + Ω²)`.
///
/// Logs a warning when the dressing splitting is not large compared with
/// `V_max`, since higher-order dipole terms are neglected.
pub fn interaction_strength<T: Real>(mw: &MicrowaveField<T>, pair: &RydbergPair) -> T {
    let v_max: T = pair.v_max();
    let om2 = mw.omega_mw * mw.omega_mw;
    if om2 == T::zero() {
        return T::zero();
    }
    if mw.omega_mw < T::lit(10.0) * v_max {
        log::warn!(
            "Ω_MW = {:.3} rad/μs is below 10·V_max = {:.3} rad/μs; neglected higher-order dipole terms may matter",
            mw.omega_mw.to_f64_lossy(),
            10.0 * v_max.to_f64_lossy()
        );
    }
    v_max * om2 / (mw.delta_mw * mw.delta_mw + om2)
}

/// `V_max` (rad/μs) for principal number `n`, core charge `z` and separation
/// `r_um`, scaled as `n⁴ Z⁻² r⁻³` from 2π × 1.9 MHz at (46, 2, 4.2 μm).
pub fn vmax_scaling<T: Real>(n: u32, z: u32, r_um: f64) -> Result<T> {
    if n < 10 || z < 1 || !(r_um.is_finite() && r_um > 0.0) {
        return Err(Error::Config(format!("invalid scaling input n={n}, z={z}, r={r_um}")));
    }
    let rel = (n as f64 / REFERENCE_N as f64).powi(4)
        * (REFERENCE_Z as f64 / z as f64).powi(2)
        * (REFERENCE_SEPARATION_UM / r_um).powi(3);
    Ok(units::mhz::<T>(REFERENCE_V_MAX_MHZ * rel))
}

/// Field strengths of the `|0> – |e> – |r>` ladder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StirapFields<T> {
    pub omega1: T,
    pub omega2: T,
    pub delta: T,
}

impl<T: Real> StirapFields<T> {
    pub fn new(omega1: T, omega2: T, delta: T) -> Result<Self> {
        if omega1 < T::zero() || omega2 < T::zero() {
            return Err(Error::Config("Rabi frequencies must be >= 0".into()));
        }
        Ok(Self { omega1, omega2, delta })
    }
}

/// Energy and normalized real eigenvector in the basis `(0, e, r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StirapEigenstate<T: Real> {
    pub energy: T,
    pub vector: Vector3<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StirapEigensystem<T: Real> {
    pub dark: StirapEigenstate<T>,
    pub plus: StirapEigenstate<T>,
    pub minus: StirapEigenstate<T>,
}

/// Eigensystem of `[[0, Ω1, 0], [Ω1, Δ, Ω2], [0, Ω2, 0]]` in the basis
/// `(0, e, r)`.
///
/// The bright states are `∝ (Ω1, E±, Ω2)` with
/// `E± = (Δ ± √(Δ² + 4Ω1² + 4Ω2²))/2`, and the dark state is
/// `∝ Ω2|0> − Ω1|r>` with energy exactly zero. Note that this matrix uses the
/// full Rabi frequencies as couplings; the master-equation Hamiltonian uses
/// `Ω/2`, so `Ω → Ω/2` maps one onto the other.
pub fn stirap_eigensystem<T: Real>(f: &StirapFields<T>) -> Result<StirapEigensystem<T>> {
    let s2 = f.omega1 * f.omega1 + f.omega2 * f.omega2;
    if s2 == T::zero() {
        return Err(Error::StirapUndefined);
    }
    let root = (f.delta * f.delta + T::lit(4.0) * s2).sqrt();
    let half = T::lit(0.5);
    let bright = |energy: T| {
        let v = Vector3::new(f.omega1, energy, f.omega2);
        StirapEigenstate { energy, vector: v.unscale(v.norm()) }
    };
    let dark = Vector3::new(f.omega2, T::zero(), -f.omega1);
    Ok(StirapEigensystem {
        dark: StirapEigenstate { energy: T::zero(), vector: dark.unscale(s2.sqrt()) },
        plus: bright(half * (f.delta + root)),
        minus: bright(half * (f.delta - root)),
    })
}

/// Approximate coupling `<dd|V|+−> ≈ (V_max/2)(Ω1Ω2/(Ω1² + Ω2²))²` between
/// the two-ion dark state and a bright pair. Zero if both fields vanish.
pub fn dark_bright_coupling<T: Real>(f: &StirapFields<T>, v_max: T) -> T {
    let s2 = f.omega1 * f.omega1 + f.omega2 * f.omega2;
    if s2 == T::zero() {
        return T::zero();
    }
    let x = f.omega1 * f.omega2 / s2;
    T::lit(0.5) * v_max * x * x
}

/// Estimates of the peak intermediate-state population `V²/(16Δ²)` and the
/// dark-state shift `V²/(32Δ)`.
pub fn dark_population_leak<T: Real>(v_max: T, delta: T) -> Result<(T, T)> {
    if !(delta > T::zero()) {
        return Err(Error::DetuningRequired);
    }
    let v2 = v_max * v_max;
    Ok((v2 / (T::lit(16.0) * delta * delta), v2 / (T::lit(32.0) * delta)))
}
