//! Operator algebra and density-matrix states for one and two six-level ions.
//!
//! The single-ion basis is ordered `(q1, q0, e, s, p, g)` and that order is
//! relied on by every Hamiltonian and collapse-operator builder. In two-ion
//! spaces ion 1 is always the left tensor factor, so the basis index of
//! `|a b>` is `6 * a + b`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cr, Real, C};

/// Number of levels per ion.
pub const LEVELS: usize = 6;
/// Largest operator dimension accepted by [`tensor`].
pub const MAX_DIM: usize = 10_000;

/// Electronic level of a single ion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    /// Qubit state |1>, ground-state sublevel that also receives decay.
    Q1,
    /// Qubit state |0>, metastable level addressed by the first UV field.
    Q0,
    /// Intermediate level |e>.
    E,
    /// Rydberg S level.
    S,
    /// Rydberg P level.
    P,
    /// Other ground-state sublevel, a pure decay sink.
    G,
}

impl Level {
    pub const ALL: [Level; LEVELS] = [Level::Q1, Level::Q0, Level::E, Level::S, Level::P, Level::G];

    #[inline]
    pub const fn index(self) -> usize {
        match self {
            Level::Q1 => 0,
            Level::Q0 => 1,
            Level::E => 2,
            Level::S => 3,
            Level::P => 4,
            Level::G => 5,
        }
    }

    pub const fn label(self) -> &'static str {
        match self {
            Level::Q1 => "q1",
            Level::Q0 => "q0",
            Level::E => "e",
            Level::S => "s",
            Level::P => "p",
            Level::G => "g",
        }
    }

    /// True for the two Rydberg levels.
    pub const fn is_rydberg(self) -> bool {
        matches!(self, Level::S | Level::P)
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Level::ALL
            .iter()
            .copied()
            .find(|l| l.label() == s)
            .ok_or_else(|| Error::Config(format!("unknown level label `{s}`")))
    }
}

/// Decay rates of the six-level scheme. Every decay ends with equal
/// probability in `q1` and `g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelScheme<T> {
    pub gamma_e: T,
    pub gamma_s: T,
    pub gamma_p: T,
}

impl<T: Real> LevelScheme<T> {
    /// Fraction of each decay that lands in `q1` and in `g` respectively.
    pub const BRANCHING: [(Level, f64); 2] = [(Level::Q1, 0.5), (Level::G, 0.5)];

    pub fn new(gamma_e: T, gamma_s: T, gamma_p: T) -> Result<Self> {
        for (name, g) in [("gamma_e", gamma_e), ("gamma_s", gamma_s), ("gamma_p", gamma_p)] {
            if !g.is_finite_value() || g < T::zero() {
                return Err(Error::Config(format!("{name} must be finite and >= 0")));
            }
        }
        Ok(Self { gamma_e, gamma_s, gamma_p })
    }

    /// Scheme without any spontaneous decay.
    pub fn lossless() -> Self {
        Self { gamma_e: T::zero(), gamma_s: T::zero(), gamma_p: T::zero() }
    }

    pub fn decay_rate(&self, level: Level) -> T {
        match level {
            Level::E => self.gamma_e,
            Level::S => self.gamma_s,
            Level::P => self.gamma_p,
            _ => T::zero(),
        }
    }

    /// All `(from, to, rate)` decay channels with nonzero rate.
    pub fn decay_channels(&self) -> Vec<(Level, Level, T)> {
        let mut out = Vec::new();
        for from in [Level::E, Level::S, Level::P] {
            let gamma = self.decay_rate(from);
            if gamma > T::zero() {
                for (to, frac) in Self::BRANCHING {
                    out.push((from, to, gamma * T::lit(frac)));
                }
            }
        }
        out
    }
}

/// What an [`Operator`] represents. Hamiltonians are checked for
/// Hermiticity on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Hamiltonian,
    Collapse,
    Observable,
    General,
}

/// Dense complex square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator<T: Real> {
    matrix: DMatrix<C<T>>,
    kind: OperatorKind,
}

fn hermiticity_defect<T: Real>(m: &DMatrix<C<T>>) -> T {
    let norm = m.norm();
    if norm == T::zero() {
        return T::zero();
    }
    (m - m.adjoint()).norm() / norm
}

fn tol<T: Real>(requested: f64) -> T {
    T::lit(requested).max(T::eps() * T::lit(256.0))
}

impl<T: Real> Operator<T> {
    pub fn new(matrix: DMatrix<C<T>>, kind: OperatorKind) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "operator must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.nrows() > MAX_DIM {
            return Err(Error::Dimension(format!("dimension {} exceeds {MAX_DIM}", matrix.nrows())));
        }
        if matrix.iter().any(|z| !z.re.is_finite_value() || !z.im.is_finite_value()) {
            return Err(Error::Config("operator has non-finite entries".into()));
        }
        if kind == OperatorKind::Hamiltonian && hermiticity_defect(&matrix) > tol::<T>(1e-12) {
            return Err(Error::Config("Hamiltonian is not Hermitian".into()));
        }
        Ok(Self { matrix, kind })
    }

    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<C<T>>, kind: OperatorKind) -> Self {
        Self { matrix, kind }
    }

    pub fn general(matrix: DMatrix<C<T>>) -> Result<Self> {
        Self::new(matrix, OperatorKind::General)
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: DMatrix::identity(dim, dim), kind: OperatorKind::Observable }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { matrix: DMatrix::zeros(dim, dim), kind: OperatorKind::General }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    #[inline]
    pub fn matrix(&self) -> &DMatrix<C<T>> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C<T>> {
        self.matrix
    }

    #[inline]
    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    /// Retags the operator, validating Hermiticity when tagging as a
    /// Hamiltonian.
    pub fn with_kind(self, kind: OperatorKind) -> Result<Self> {
        Self::new(self.matrix, kind)
    }

    pub fn dagger(&self) -> Self {
        Self { matrix: self.matrix.adjoint(), kind: self.kind }
    }

    pub fn trace(&self) -> C<T> {
        self.matrix.trace()
    }

    pub fn scale(&self, factor: C<T>) -> Self {
        Self { matrix: &self.matrix * factor, kind: self.kind }
    }

    pub fn scale_real(&self, factor: T) -> Self {
        self.scale(cr(factor))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let kind = if self.kind == other.kind { self.kind } else { OperatorKind::General };
        Ok(Self { matrix: &self.matrix + &other.matrix, kind })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let kind = if self.kind == other.kind { self.kind } else { OperatorKind::General };
        Ok(Self { matrix: &self.matrix - &other.matrix, kind })
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self { matrix: &self.matrix * &other.matrix, kind: OperatorKind::General })
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// Relative Frobenius norm of `A - A†`.
    pub fn hermiticity_defect(&self) -> T {
        hermiticity_defect(&self.matrix)
    }

    pub fn is_hermitian(&self, tolerance: T) -> bool {
        self.hermiticity_defect() <= tolerance
    }

    pub fn frobenius_norm(&self) -> T {
        self.matrix.norm()
    }

    /// Eigenvalues of a Hermitian operator in ascending order.
    pub fn hermitian_eigenvalues(&self) -> Vec<T> {
        let mut ev: Vec<T> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        ev
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!("{} vs {}", self.dim(), other.dim())));
        }
        Ok(())
    }
}

impl<T: Real> fmt::Display for Operator<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} operator ({}x{})", self.kind, self.dim(), self.dim())
    }
}

/// `|a><b|` on a single ion.
pub fn projector<T: Real>(a: Level, b: Level) -> Operator<T> {
    let mut m = DMatrix::zeros(LEVELS, LEVELS);
    m[(a.index(), b.index())] = cr(T::one());
    let kind = if a == b { OperatorKind::Observable } else { OperatorKind::General };
    Operator::from_matrix_unchecked(m, kind)
}

/// [`projector`] from textual labels such as `"q0"` or `"s"`.
pub fn projector_by_label<T: Real>(a: &str, b: &str) -> Result<Operator<T>> {
    Ok(projector(a.parse()?, b.parse()?))
}

/// Kronecker product `a ⊗ b`.
pub fn tensor<T: Real>(a: &Operator<T>, b: &Operator<T>) -> Result<Operator<T>> {
    let dim = a.dim().checked_mul(b.dim()).filter(|d| *d <= MAX_DIM).ok_or_else(|| {
        Error::Dimension(format!("tensor product {}x{} exceeds {MAX_DIM}", a.dim(), b.dim()))
    })?;
    let m = a.matrix.kronecker(&b.matrix);
    debug_assert_eq!(m.nrows(), dim);
    let kind = if a.kind == b.kind { a.kind } else { OperatorKind::General };
    Ok(Operator::from_matrix_unchecked(m, kind))
}

/// Embeds a single-ion operator acting on ion `ion` (0-based) into an
/// `ions`-ion space. `ions` must be 1 or 2.
pub fn embed<T: Real>(op: &Operator<T>, ion: usize, ions: usize) -> Result<Operator<T>> {
    if op.dim() != LEVELS {
        return Err(Error::Dimension(format!("embed expects a {LEVELS}-level operator")));
    }
    match (ions, ion) {
        (1, 0) => Ok(op.clone()),
        (2, 0) => tensor(op, &Operator::identity(LEVELS)),
        (2, 1) => tensor(&Operator::identity(LEVELS), op),
        _ => Err(Error::Config(format!("cannot embed ion {ion} into {ions}-ion space"))),
    }
}

/// Basis index of the two-ion state `|a b>`.
#[inline]
pub const fn pair_index(a: Level, b: Level) -> usize {
    LEVELS * a.index() + b.index()
}

/// Exchanges the two tensor factors of a two-ion operator.
pub fn swap_ions<T: Real>(op: &Operator<T>) -> Result<Operator<T>> {
    if op.dim() != LEVELS * LEVELS {
        return Err(Error::Dimension("swap_ions expects a two-ion operator".into()));
    }
    let perm = |k: usize| (k % LEVELS) * LEVELS + k / LEVELS;
    let n = op.dim();
    let m = DMatrix::from_fn(n, n, |i, j| op.matrix[(perm(i), perm(j))]);
    Ok(Operator::from_matrix_unchecked(m, op.kind))
}

/// Single-ion basis ket.
pub fn basis_ket<T: Real>(level: Level) -> DVector<C<T>> {
    let mut v = DVector::zeros(LEVELS);
    v[level.index()] = cr(T::one());
    v
}

/// Two-ion product ket `|a> ⊗ |b>`.
pub fn product_ket<T: Real>(a: &DVector<C<T>>, b: &DVector<C<T>>) -> DVector<C<T>> {
    a.kronecker(b)
}

/// Density matrix of a one- or two-ion system.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState<T: Real> {
    rho: DMatrix<C<T>>,
}

/// Tolerances checked by [`DensityState::validate`].
pub const TRACE_TOLERANCE: f64 = 1e-9;
pub const HERMITICITY_TOLERANCE: f64 = 1e-12;
pub const POSITIVITY_TOLERANCE: f64 = 1e-8;

impl<T: Real> DensityState<T> {
    /// Validates trace, Hermiticity and positivity.
    pub fn new(rho: DMatrix<C<T>>) -> Result<Self> {
        let state = Self { rho };
        state.validate()?;
        Ok(state)
    }

    pub(crate) fn from_matrix_unchecked(rho: DMatrix<C<T>>) -> Self {
        Self { rho }
    }

    /// Pure state `|psi><psi|`; the ket is normalized first.
    pub fn from_ket(psi: &DVector<C<T>>) -> Result<Self> {
        let norm = psi.norm();
        if norm == T::zero() || !norm.is_finite_value() {
            return Err(Error::InvalidState("ket has zero or non-finite norm".into()));
        }
        let psi = psi.unscale(norm);
        Self::new(&psi * psi.adjoint())
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let w = T::one() / T::lit(dim as f64);
        Self { rho: DMatrix::identity(dim, dim) * cr(w) }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.rho.nrows();
        if n == 0 || n != self.rho.ncols() {
            return Err(Error::InvalidState("density matrix must be square".into()));
        }
        if self.rho.iter().any(|z| !z.re.is_finite_value() || !z.im.is_finite_value()) {
            return Err(Error::InvalidState("non-finite entries".into()));
        }
        let tr = self.rho.trace();
        if (tr.re - T::one()).abs() > tol::<T>(TRACE_TOLERANCE) || tr.im.abs() > tol::<T>(TRACE_TOLERANCE) {
            return Err(Error::InvalidState(format!("trace {} differs from 1", tr.re.to_f64_lossy())));
        }
        // Absolute defect: the Frobenius norm of a density matrix is at most 1.
        let herm = (&self.rho - self.rho.adjoint()).norm();
        if herm > tol::<T>(HERMITICITY_TOLERANCE) {
            return Err(Error::InvalidState(format!("not Hermitian (defect {:e})", herm.to_f64_lossy())));
        }
        let min_ev = self.min_eigenvalue();
        if min_ev < -tol::<T>(POSITIVITY_TOLERANCE) {
            return Err(Error::InvalidState(format!("negative eigenvalue {:e}", min_ev.to_f64_lossy())));
        }
        Ok(())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    #[inline]
    pub fn rho(&self) -> &DMatrix<C<T>> {
        &self.rho
    }

    pub fn into_matrix(self) -> DMatrix<C<T>> {
        self.rho
    }

    pub fn trace(&self) -> C<T> {
        self.rho.trace()
    }

    pub fn min_eigenvalue(&self) -> T {
        let h = (&self.rho + self.rho.adjoint()) * cr(T::lit(0.5));
        h.symmetric_eigenvalues().iter().copied().fold(T::max_value().unwrap_or_else(T::one), |a, b| a.min(b))
    }

    /// Tr(ρ²).
    pub fn purity(&self) -> T {
        self.rho.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b)
    }

    /// `<k|ρ|k>` for a basis index.
    pub fn population(&self, index: usize) -> T {
        self.rho[(index, index)].re
    }

    /// `<psi|ρ|psi>` for a (not necessarily normalized) ket.
    pub fn overlap(&self, psi: &DVector<C<T>>) -> T {
        (psi.adjoint() * &self.rho * psi)[(0, 0)].re
    }

    /// `U ρ U†`.
    pub fn transform(&self, unitary: &DMatrix<C<T>>) -> Result<Self> {
        if unitary.nrows() != self.dim() || unitary.ncols() != self.dim() {
            return Err(Error::Dimension("unitary does not match state dimension".into()));
        }
        Ok(Self { rho: unitary * &self.rho * unitary.adjoint() })
    }

    /// Frobenius distance to another state.
    pub fn distance(&self, other: &Self) -> T {
        (&self.rho - &other.rho).norm()
    }
}

/// `Tr(ρ · obs)`.
pub fn expectation<T: Real>(state: &DensityState<T>, obs: &Operator<T>) -> Result<C<T>> {
    if state.dim() != obs.dim() {
        return Err(Error::Dimension(format!("state {} vs operator {}", state.dim(), obs.dim())));
    }
    let n = state.dim();
    let rho = state.rho();
    let o = obs.matrix();
    let mut acc = cr(T::zero());
    for i in 0..n {
        for j in 0..n {
            acc += rho[(i, j)] * o[(j, i)];
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    fn random_op(seed: u64, dim: usize) -> Operator<f64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let m = DMatrix::from_fn(dim, dim, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        Operator::general(m).unwrap()
    }

    #[test]
    fn level_order_is_fixed() {
        let labels: Vec<_> = Level::ALL.iter().map(|l| l.label()).collect();
        assert_eq!(labels, ["q1", "q0", "e", "s", "p", "g"]);
        for (i, l) in Level::ALL.iter().enumerate() {
            assert_eq!(l.index(), i);
        }
    }

    #[test]
    fn branching_sums_to_one() {
        let s: f64 = LevelScheme::<f64>::BRANCHING.iter().map(|(_, f)| f).sum();
        assert_eq!(s, 1.0);
        let scheme = LevelScheme::new(3.0, 2.0, 1.0).unwrap();
        let total_e: f64 = scheme.decay_channels().iter().filter(|(f, _, _)| *f == Level::E).map(|c| c.2).sum();
        assert!((total_e - 3.0).abs() < 1e-15);
        assert!(LevelScheme::new(-1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn projector_properties() {
        let p = projector::<f64>(Level::Q0, Level::Q0);
        assert_eq!(p.mul(&p).unwrap(), p.clone().with_kind(OperatorKind::General).unwrap());
        assert_eq!(p.trace(), cr(1.0));
        let h = projector::<f64>(Level::Q0, Level::E).add(&projector(Level::E, Level::Q0)).unwrap();
        assert!(h.is_hermitian(0.0));
        let sp = projector::<f64>(Level::S, Level::P).mul(&projector(Level::P, Level::S)).unwrap();
        assert_eq!(sp.matrix(), projector::<f64>(Level::S, Level::S).matrix());
    }

    #[test]
    fn unknown_label_is_config_error() {
        assert!(matches!(projector_by_label::<f64>("q0", "x"), Err(Error::Config(_))));
        assert!(projector_by_label::<f64>("s", "p").is_ok());
    }

    #[test]
    fn tensor_identity_and_guard() {
        let i36 = tensor(&Operator::<f64>::identity(6), &Operator::identity(6)).unwrap();
        assert_eq!(i36.matrix(), &DMatrix::identity(36, 36));
        let big = Operator::<f64>::identity(101);
        assert!(matches!(tensor(&big, &big), Err(Error::Dimension(_))));
    }

    #[test]
    fn trace_of_tensor_product_factorizes() {
        // Oracle: explicit double sum over the Kronecker index map.
        let a = random_op(1, 6);
        let b = random_op(2, 6);
        let ab = tensor(&a, &b).unwrap();
        let mut brute = cr(0.0);
        for i in 0..6 {
            for k in 0..6 {
                brute += a.matrix()[(i, i)] * b.matrix()[(k, k)];
            }
        }
        assert!((ab.trace() - brute).norm() < 1e-12);
        assert!((ab.trace() - a.trace() * b.trace()).norm() < 1e-12);
    }

    #[test]
    fn swap_twice_is_identity() {
        let a = random_op(3, 6);
        let b = random_op(4, 6);
        let ab = tensor(&a, &b).unwrap();
        let ba = tensor(&b, &a).unwrap();
        let swapped = swap_ions(&ab).unwrap();
        assert!((swapped.matrix() - ba.matrix()).norm() < 1e-14);
        assert_eq!(swap_ions(&swapped).unwrap(), ab);
    }

    #[test]
    fn expectation_examples() {
        let q0 = basis_ket::<f64>(Level::Q0);
        let s00 = DensityState::from_ket(&product_ket(&q0, &q0)).unwrap();
        let p00 = tensor(&projector(Level::Q0, Level::Q0), &projector(Level::Q0, Level::Q0)).unwrap();
        assert!((expectation(&s00, &p00).unwrap() - cr(1.0)).norm() < 1e-15);

        let mixed = DensityState::<f64>::maximally_mixed(36);
        let pab = tensor(&projector(Level::S, Level::S), &projector(Level::G, Level::G)).unwrap();
        assert!((expectation(&mixed, &pab).unwrap().re - 1.0 / 36.0).abs() < 1e-15);

        assert!(expectation(&mixed, &Operator::identity(6)).is_err());
    }

    #[test]
    fn density_state_validation() {
        let mut m = DMatrix::<C<f64>>::zeros(6, 6);
        m[(0, 0)] = cr(0.5);
        assert!(DensityState::new(m.clone()).is_err());
        m[(1, 1)] = cr(0.5);
        assert!(DensityState::new(m.clone()).is_ok());
        m[(0, 0)] = cr(1.5);
        m[(1, 1)] = cr(-0.5);
        assert!(matches!(DensityState::new(m), Err(Error::InvalidState(_))));
    }

    #[test]
    fn hamiltonian_tag_checks_hermiticity() {
        let m = projector::<f64>(Level::Q0, Level::E).into_matrix();
        assert!(Operator::new(m, OperatorKind::Hamiltonian).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let a = projector::<f32>(Level::S, Level::P);
        let t = tensor(&a, &a.dagger()).unwrap();
        assert_eq!(t.dim(), 36);
        let st = DensityState::<f32>::maximally_mixed(6);
        assert!(st.validate().is_ok());
    }
}
