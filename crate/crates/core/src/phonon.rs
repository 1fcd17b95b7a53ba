//! Axial normal modes of an ion crystal and the decoherence they cause
//! when two ions interact through a position-dependent `C3/R³` potential.
//!
//! Lengths are in μm, frequencies in rad/μs, temperatures in μK. Inside the
//! crystal calculations positions are scaled by
//! `l = (e²/4πε₀Mω²)^{1/3}` and frequencies by the trap frequency `ω`;
//! [`length_scale_um`] is the only place that conversion is made.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gate::GateTimeConvention;
use crate::scalar::Real;
use crate::units::{coulomb_constant, AMU, ELEMENTARY_CHARGE, HBAR, K_B, ZETA_3};

/// Mass of ⁸⁸Sr⁺ in atomic mass units.
pub const DEFAULT_MASS_AMU: f64 = 88.0;

/// Terms kept in the lattice sum `Σ cos(mθ)/m³`.
pub const LATTICE_TERMS: usize = 1_000_000;

const MAX_NEWTON_ITERATIONS: usize = 200;

/// `l = (e²/4πε₀Mω²)^{1/3}` in μm for `ω` in rad/μs.
pub fn length_scale_um<T: Real>(trap_frequency: T, mass_amu: T) -> T {
    let w = trap_frequency.to_f64_lossy() * 1e6;
    let m = mass_amu.to_f64_lossy() * AMU;
    T::lit((coulomb_constant() * ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (m * w * w)).cbrt() * 1e6)
}

/// Trap frequency (rad/μs) whose length scale is `l_um`.
fn trap_frequency_for_scale(l_um: f64, mass_amu: f64) -> f64 {
    let l = l_um * 1e-6;
    (coulomb_constant() * ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (mass_amu * AMU * l * l * l)).sqrt() * 1e-6
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CrystalKind<T> {
    /// Ions at spacing `a` on a ring (periodic boundary), each held by an
    /// axial potential of curvature `ξ Mω²`.
    EqualSpaced { spacing_um: T, xi: T },
    /// Linear Coulomb crystal in a harmonic axial trap.
    Harmonic1d,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IonCrystal<T> {
    pub kind: CrystalKind<T>,
    pub n_ions: usize,
    /// Axial trap frequency ω (rad/μs); also the frequency unit of the ring.
    pub trap_frequency: T,
    pub mass_amu: T,
}

impl<T: Real> IonCrystal<T> {
    pub fn equal_spaced(n_ions: usize, spacing_um: T, trap_frequency: T, xi: T) -> Result<Self> {
        Self { kind: CrystalKind::EqualSpaced { spacing_um, xi }, n_ions, trap_frequency, mass_amu: T::lit(DEFAULT_MASS_AMU) }
            .validated()
    }

    pub fn harmonic_1d(n_ions: usize, trap_frequency: T) -> Result<Self> {
        Self { kind: CrystalKind::Harmonic1d, n_ions, trap_frequency, mass_amu: T::lit(DEFAULT_MASS_AMU) }.validated()
    }

    /// Harmonic crystal whose trap frequency is chosen so that the two
    /// central ions sit `spacing_um` apart.
    pub fn harmonic_with_central_spacing(n_ions: usize, spacing_um: T) -> Result<Self> {
        Self::harmonic_with_central_spacing_and_mass(n_ions, spacing_um, T::lit(DEFAULT_MASS_AMU))
    }

    pub fn harmonic_with_central_spacing_and_mass(n_ions: usize, spacing_um: T, mass_amu: T) -> Result<Self> {
        if n_ions < 2 || !(spacing_um > T::zero()) {
            return Err(Error::Config("need at least 2 ions and a positive spacing".into()));
        }
        let u = dimensionless_equilibrium::<f64>(n_ions)?;
        let (j, k) = Self::central_pair(n_ions);
        let l = spacing_um.to_f64_lossy() / (u[k] - u[j]);
        let omega = T::lit(trap_frequency_for_scale(l, mass_amu.to_f64_lossy()));
        Self { kind: CrystalKind::Harmonic1d, n_ions, trap_frequency: omega, mass_amu }.validated()
    }

    pub fn with_mass(self, mass_amu: T) -> Result<Self> {
        Self { mass_amu, ..self }.validated()
    }

    /// Indices of the two ions nearest the crystal centre.
    pub fn central_pair(n_ions: usize) -> (usize, usize) {
        let j = n_ions.saturating_sub(1) / 2;
        (j, j + 1)
    }

    pub fn length_scale_um(&self) -> T {
        length_scale_um(self.trap_frequency, self.mass_amu)
    }

    fn validated(self) -> Result<Self> {
        let positive = |x: T| x > T::zero() && x.is_finite_value();
        if self.n_ions < 2 {
            return Err(Error::Config("an ion crystal needs at least 2 ions".into()));
        }
        if !positive(self.trap_frequency) || !positive(self.mass_amu) {
            return Err(Error::Config("trap frequency and mass must be positive".into()));
        }
        if let CrystalKind::EqualSpaced { spacing_um, xi } = self.kind {
            if !positive(spacing_um) || !positive(xi) {
                return Err(Error::Config("ion spacing and confinement ξ must be positive".into()));
            }
        }
        Ok(self)
    }
}

fn net_forces<T: Real>(u: &[T]) -> Vec<T> {
    (0..u.len())
        .map(|m| {
            let mut f = u[m];
            for (n, &un) in u.iter().enumerate() {
                if n != m {
                    let d = u[m] - un;
                    let inv = T::one() / (d * d);
                    f += if n < m { -inv } else { inv };
                }
            }
            f
        })
        .collect()
}

fn max_abs<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |a, &x| a.max(x.abs()))
}

fn harmonic_hessian<T: Real>(u: &[T]) -> DMatrix<T> {
    let n = u.len();
    DMatrix::from_fn(n, n, |m, k| {
        if m == k {
            T::one()
                + (0..n).filter(|&j| j != m).map(|j| T::lit(2.0) / (u[m] - u[j]).abs().powi(3)).fold(T::zero(), |a, b| a + b)
        } else {
            -T::lit(2.0) / (u[m] - u[k]).abs().powi(3)
        }
    })
}

/// Equilibrium of `u_m = Σ_{n<m}(u_m−u_n)⁻² − Σ_{n>m}(u_m−u_n)⁻²` in units of
/// `l`, by damped Newton iteration from an evenly spaced seed.
pub fn dimensionless_equilibrium<T: Real>(n_ions: usize) -> Result<Vec<T>> {
    if n_ions < 2 {
        return Err(Error::Config("an ion crystal needs at least 2 ions".into()));
    }
    let n = n_ions as f64;
    let spacing = 2.0 * n.powf(-0.56);
    let mut u: Vec<T> = (0..n_ions).map(|m| T::lit(spacing * (m as f64 - (n - 1.0) / 2.0))).collect();
    let tol = T::lit(1e-12).max(T::eps() * T::lit(1e3));
    let mut residual = max_abs(&net_forces(&u));
    for _ in 0..MAX_NEWTON_ITERATIONS {
        if residual < tol {
            break;
        }
        let f = nalgebra::DVector::from_vec(net_forces(&u));
        let step = harmonic_hessian(&u)
            .cholesky()
            .ok_or_else(|| Error::NoConvergence { iterations: 0, residual: residual.to_f64_lossy() })?
            .solve(&f);
        let mut lambda = T::one();
        loop {
            let trial: Vec<T> = u.iter().zip(step.iter()).map(|(&x, &s)| x - lambda * s).collect();
            let ordered = trial.windows(2).all(|w| w[1] > w[0]);
            if ordered {
                let r = max_abs(&net_forces(&trial));
                if r < residual || lambda < T::lit(1e-6) {
                    u = trial;
                    residual = r;
                    break;
                }
            }
            lambda *= T::lit(0.5);
            if lambda < T::lit(1e-12) {
                return Err(Error::NoConvergence { iterations: 0, residual: residual.to_f64_lossy() });
            }
        }
    }
    // Remove rounding asymmetry; the exact solution is symmetric about 0.
    let sym: Vec<T> = (0..n_ions).map(|m| (u[m] - u[n_ions - 1 - m]) * T::lit(0.5)).collect();
    let residual = max_abs(&net_forces(&sym));
    if residual >= tol {
        return Err(Error::NoConvergence { iterations: MAX_NEWTON_ITERATIONS, residual: residual.to_f64_lossy() });
    }
    Ok(sym)
}

/// Equilibrium positions in μm, centred on 0.
pub fn equilibrium_positions<T: Real>(crystal: &IonCrystal<T>) -> Result<Vec<T>> {
    let n = crystal.n_ions;
    match crystal.kind {
        CrystalKind::EqualSpaced { spacing_um, .. } => {
            let mid = T::lit((n as f64 - 1.0) / 2.0);
            Ok((0..n).map(|j| (T::lit(j as f64) - mid) * spacing_um).collect())
        }
        CrystalKind::Harmonic1d => {
            let l = crystal.length_scale_um();
            Ok(dimensionless_equilibrium::<T>(n)?.into_iter().map(|u| u * l).collect())
        }
    }
}

/// Axial Hessian in units of `Mω²`.
///
/// For the ring, distances are taken around the ring (minimum image), so
/// the diagonal is `ξ + Σ_{k≠m} 2/(a³d³)` and off-diagonals `−2/(a³d³)` with
/// `a` in units of `l`.
pub fn hessian<T: Real>(crystal: &IonCrystal<T>) -> Result<DMatrix<T>> {
    let n = crystal.n_ions;
    match crystal.kind {
        CrystalKind::EqualSpaced { spacing_um, xi } => {
            let a = spacing_um / crystal.length_scale_um();
            let coupling = |m: usize, k: usize| {
                let d = m.abs_diff(k).min(n - m.abs_diff(k));
                T::lit(2.0) / (a * T::lit(d as f64)).powi(3)
            };
            Ok(DMatrix::from_fn(n, n, |m, k| {
                if m == k {
                    xi + (0..n).filter(|&j| j != m).map(|j| coupling(m, j)).fold(T::zero(), |s, c| s + c)
                } else {
                    -coupling(m, k)
                }
            }))
        }
        CrystalKind::Harmonic1d => Ok(harmonic_hessian(&dimensionless_equilibrium::<T>(n)?)),
    }
}

/// Normal modes sorted by frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum<T: Real> {
    /// Equilibrium positions `d_j` (μm).
    pub positions_um: Vec<T>,
    /// Mode frequencies ν_p (rad/μs), ascending.
    pub frequencies: Vec<T>,
    /// Row `p` holds the participation vector `b^(p)`.
    pub mode_vectors: DMatrix<T>,
    /// Zero-point lengths `l_p = √(ħ/2Mν_p)` (nm).
    pub mode_lengths_nm: Vec<T>,
    pub mass_amu: T,
}

impl<T: Real> ModeSpectrum<T> {
    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }
}

pub fn normal_modes<T: Real>(crystal: &IonCrystal<T>) -> Result<ModeSpectrum<T>> {
    let positions_um = equilibrium_positions(crystal)?;
    let eig = SymmetricEigen::new(hessian(crystal)?);
    let mut order: Vec<usize> = (0..crystal.n_ions).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap_or(std::cmp::Ordering::Equal));
    let n = crystal.n_ions;
    let mut mode_vectors = DMatrix::zeros(n, n);
    let mut frequencies = Vec::with_capacity(n);
    let mut mode_lengths_nm = Vec::with_capacity(n);
    let mass = crystal.mass_amu.to_f64_lossy() * AMU;
    for (row, &p) in order.iter().enumerate() {
        let lambda = eig.eigenvalues[p];
        if !(lambda > T::zero()) {
            return Err(Error::Config("crystal is unstable: Hessian has a non-positive eigenvalue".into()));
        }
        let nu = lambda.sqrt() * crystal.trap_frequency;
        let col = eig.eigenvectors.column(p);
        // Fix the arbitrary sign so the largest component is positive.
        let pivot = col.iter().copied().fold(T::zero(), |a, x| if x.abs() > a.abs() { x } else { a });
        let sign = if pivot < T::zero() { -T::one() } else { T::one() };
        for m in 0..n {
            mode_vectors[(row, m)] = col[m] * sign;
        }
        frequencies.push(nu);
        mode_lengths_nm.push(T::lit((HBAR / (2.0 * mass * nu.to_f64_lossy() * 1e6)).sqrt() * 1e9));
    }
    Ok(ModeSpectrum { positions_um, frequencies, mode_vectors, mode_lengths_nm, mass_amu: crystal.mass_amu })
}

/// Which sign the cosine sum takes in the ring dispersion relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DispersionForm {
    /// `ν² = ξ + 4ζ(3)/a³ + (4/a³) Σ cos(mqa)/m³` as usually quoted. This
    /// puts the uniform mode at the top of the band.
    Printed,
    /// `ν² = ξ + 4ζ(3)/a³ − (4/a³) Σ cos(mqa)/m³`, the infinite-ring limit of
    /// [`hessian`]; the uniform mode sits at `√ξ ω`.
    Hessian,
}

/// `Σ_{m≥1} cos(mθ)/m³` summed to [`LATTICE_TERMS`]. The remainder is
/// bounded by `1/(2M²) ≈ 5e-13`; at `θ = 0` its Euler–Maclaurin value is
/// added so the sum reproduces ζ(3).
pub fn lattice_cosine_sum(theta: f64) -> f64 {
    let mut s = 0.0;
    for m in (1..=LATTICE_TERMS).rev() {
        let m = m as f64;
        s += (m * theta).cos() / (m * m * m);
    }
    if (theta / (2.0 * std::f64::consts::PI)).fract().abs() < 1e-15 {
        let edge = LATTICE_TERMS as f64 + 0.5;
        s += 0.5 / (edge * edge);
    }
    s
}

/// Ring mode frequency (rad/μs) for wave number `q = 2πj/(aN)`.
pub fn ring_dispersion<T: Real>(j_q: usize, crystal: &IonCrystal<T>, form: DispersionForm) -> Result<T> {
    let CrystalKind::EqualSpaced { spacing_um, xi } = crystal.kind else {
        return Err(Error::Config("ring dispersion needs an equally spaced crystal".into()));
    };
    if j_q >= crystal.n_ions {
        return Err(Error::Config(format!("wave index {j_q} out of range for {} ions", crystal.n_ions)));
    }
    let a3 = (spacing_um / crystal.length_scale_um()).to_f64_lossy().powi(3);
    let theta = 2.0 * std::f64::consts::PI * j_q as f64 / crystal.n_ions as f64;
    let sign = match form {
        DispersionForm::Printed => 1.0,
        DispersionForm::Hessian => -1.0,
    };
    let nu2 = xi.to_f64_lossy() + 4.0 * ZETA_3 / a3 + sign * 4.0 * lattice_cosine_sum(theta) / a3;
    Ok(T::lit(nu2.max(0.0).sqrt()) * crystal.trap_frequency)
}

/// Strength of the pair interaction entering the coupling constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairInteraction<T> {
    /// `C3` in rad/μs · μm³; `W = C3/R³` uses the equilibrium separation.
    C3(T),
    /// `W` in rad/μs directly.
    W(T),
}

/// Dimensionless couplings `g_p = 3W B^(p)/(R ν_p)` with
/// `B^(p) = (b_j − b_k) l_p`.
pub fn coupling_constants<T: Real>(modes: &ModeSpectrum<T>, j: usize, k: usize, interaction: PairInteraction<T>) -> Result<Vec<T>> {
    let n = modes.len();
    if j == k || j >= n || k >= n {
        return Err(Error::Config(format!("invalid ion pair ({j}, {k}) for {n} ions")));
    }
    let r = (modes.positions_um[j] - modes.positions_um[k]).abs();
    let w = match interaction {
        PairInteraction::C3(c3) => c3 / r.powi(3),
        PairInteraction::W(w) => w,
    };
    let nm = T::lit(1e-3);
    Ok((0..n)
        .map(|p| {
            let b = (modes.mode_vectors[(p, j)] - modes.mode_vectors[(p, k)]) * modes.mode_lengths_nm[p] * nm;
            T::lit(3.0) * w * b / (r * modes.frequencies[p])
        })
        .collect())
}

/// `coth(ħν/2k_BT)`, equal to 1 at `T = 0`.
fn thermal_factor<T: Real>(nu: T, temperature_uk: T) -> T {
    if temperature_uk == T::zero() {
        return T::one();
    }
    // ħν/(2k_BT) with ν in rad/μs and T in μK.
    let x = T::lit(HBAR * 1e12 / (2.0 * K_B)) * nu / temperature_uk;
    T::one() / x.tanh()
}

/// Motional dephasing of a two-ion phase accumulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport<T> {
    pub couplings: Vec<T>,
    pub times: Vec<T>,
    /// `G(t) = Σ g_p² coth(βν_p/2)(1 − cos ν_p t)`.
    pub exponent: Vec<T>,
    /// `2 Σ g_p² coth(βν_p/2)`.
    pub g_max: T,
    /// `Φ(t) = (W − Σ g_p² ν_p) t`.
    pub total_phase: Vec<T>,
    /// `φ(t) = Σ g_p² sin ν_p t`.
    pub oscillatory_phase: Vec<T>,
    pub temperature_uk: T,
    pub pair: (usize, usize),
    pub w_jk: T,
}

impl<T: Real> CoherenceReport<T> {
    /// `C = exp(−G)` at grid point `i`.
    pub fn coherence(&self, i: usize) -> T {
        (-self.exponent[i]).exp()
    }
}

pub fn coherence_exponent<T: Real>(
    couplings: &[T],
    modes: &ModeSpectrum<T>,
    temperature_uk: T,
    times: &[T],
    w_jk: T,
    pair: (usize, usize),
) -> Result<CoherenceReport<T>> {
    if couplings.len() != modes.len() {
        return Err(Error::Dimension(format!("{} couplings for {} modes", couplings.len(), modes.len())));
    }
    if !(temperature_uk >= T::zero()) || !temperature_uk.is_finite_value() {
        return Err(Error::Config("temperature must be finite and >= 0".into()));
    }
    let weights: Vec<T> = couplings
        .iter()
        .zip(&modes.frequencies)
        .map(|(&g, &nu)| g * g * thermal_factor(nu, temperature_uk))
        .collect();
    let sum = |f: &dyn Fn(usize) -> T| (0..modes.len()).map(f).fold(T::zero(), |a, b| a + b);
    let g_max = T::lit(2.0) * weights.iter().fold(T::zero(), |a, &b| a + b);
    let shift = sum(&|p| couplings[p] * couplings[p] * modes.frequencies[p]);
    let exponent = times
        .iter()
        .map(|&t| sum(&|p| weights[p] * (T::one() - (modes.frequencies[p] * t).cos())))
        .collect();
    let oscillatory_phase = times
        .iter()
        .map(|&t| sum(&|p| couplings[p] * couplings[p] * (modes.frequencies[p] * t).sin()))
        .collect();
    Ok(CoherenceReport {
        couplings: couplings.to_vec(),
        times: times.to_vec(),
        exponent,
        g_max,
        total_phase: times.iter().map(|&t| (w_jk - shift) * t).collect(),
        oscillatory_phase,
        temperature_uk,
        pair,
        w_jk,
    })
}

/// Gate error from coupling to the axial modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotionalError<T> {
    /// Gate duration (μs).
    pub gate_time: T,
    /// `G(τ_g)`.
    pub exponent: T,
    /// `1 − C(τ_g)`.
    pub error: T,
    /// `|φ(τ_g)|` (rad).
    pub phase_error: T,
    pub g_max: T,
    pub trap_frequency: T,
}

/// Evaluates `1 − exp(−G(τ_g))` for the pair `(j, k)` interacting with
/// strength `v` over the gate time set by `convention`.
pub fn motional_gate_error<T: Real>(
    crystal: &IonCrystal<T>,
    pair: (usize, usize),
    v: T,
    temperature_uk: T,
    convention: GateTimeConvention,
) -> Result<MotionalError<T>> {
    let modes = normal_modes(crystal)?;
    let g = coupling_constants(&modes, pair.0, pair.1, PairInteraction::W(v))?;
    let gate_time = convention.duration(v)?;
    let report = coherence_exponent(&g, &modes, temperature_uk, &[gate_time], v, pair)?;
    let exponent = report.exponent[0];
    Ok(MotionalError {
        gate_time,
        exponent,
        error: T::one() - (-exponent).exp(),
        phase_error: report.oscillatory_phase[0].abs(),
        g_max: report.g_max,
        trap_frequency: crystal.trap_frequency,
    })
}
