//! Hamiltonians, collapse operators and the Lindblad right-hand side.

use nalgebra::DMatrix;

use super::noise::NoiseModel;
use super::pulse::PulseSchedule;
use crate::error::{Error, Result};
use crate::qcore::{embed, pair_index, projector, Level, LevelScheme, Operator, OperatorKind, LEVELS};
use crate::scalar::{cr, Real, C};
use crate::spectra::{MicrowaveField, RydbergPair};

/// Static description of the ions: level scheme, microwave dressing and
/// interaction strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Setup<T> {
    pub scheme: LevelScheme<T>,
    pub mw: MicrowaveField<T>,
    /// Maximum interaction `V_max` (rad/μs).
    pub v_max: T,
    pub ions: usize,
}

impl<T: Real> Setup<T> {
    pub fn new(scheme: LevelScheme<T>, mw: MicrowaveField<T>, pair: &RydbergPair, ions: usize) -> Result<Self> {
        Self::with_v_max(scheme, mw, pair.v_max(), ions)
    }

    pub fn with_v_max(scheme: LevelScheme<T>, mw: MicrowaveField<T>, v_max: T, ions: usize) -> Result<Self> {
        check_ions(ions)?;
        if !v_max.is_finite_value() || v_max < T::zero() {
            return Err(Error::Config("v_max must be finite and >= 0".into()));
        }
        Ok(Self { scheme, mw, v_max, ions })
    }

    pub fn dim(&self) -> usize {
        LEVELS.pow(self.ions as u32)
    }
}

fn check_ions(ions: usize) -> Result<()> {
    if ions == 1 || ions == 2 {
        Ok(())
    } else {
        Err(Error::Config(format!("ions must be 1 or 2, got {ions}")))
    }
}

/// Energy of the dressed `|+>` state, `(Δ_MW + √(Δ_MW² + Ω_MW²))/2`. The
/// lasers are taken as resonant with it; zero without dressing.
pub fn rydberg_reference_energy<T: Real>(mw: &MicrowaveField<T>) -> T {
    T::lit(0.5) * (mw.delta_mw + mw.generalized_rabi())
}

/// Strength of the `|sp><ps|` exchange term. Chosen so that
/// `<++|H_I|++> = V_max Ω²/(Δ² + Ω²)`.
pub fn exchange_strength<T: Real>(v_max: T) -> T {
    T::lit(2.0) * v_max
}

/// `H(t) = fixed + Ω1(t)·omega1 + Ω2(t)·omega2`.
#[derive(Debug, Clone)]
pub struct HamiltonianParts<T: Real> {
    pub fixed: Operator<T>,
    pub omega1: Operator<T>,
    pub omega2: Operator<T>,
}

fn coupling<T: Real>(a: Level, b: Level) -> Operator<T> {
    let m = (projector::<T>(a, b).into_matrix() + projector::<T>(b, a).into_matrix()) * cr(T::lit(0.5));
    Operator::from_matrix_unchecked(m, OperatorKind::Hamiltonian)
}

fn sum_over_ions<T: Real>(single: &Operator<T>, ions: usize) -> Result<Operator<T>> {
    let mut acc = embed(single, 0, ions)?;
    for ion in 1..ions {
        acc = acc.add(&embed(single, ion, ions)?)?;
    }
    Ok(acc)
}

impl<T: Real> HamiltonianParts<T> {
    /// Builds the parts for microwave field `mw`, with the rotating frame
    /// pinned to the dressed state of `frame_mw` (they differ only when the
    /// microwave power fluctuates from shot to shot).
    pub fn new(
        pulse: &PulseSchedule<T>,
        mw: &MicrowaveField<T>,
        frame_mw: &MicrowaveField<T>,
        v_max: T,
        ions: usize,
    ) -> Result<Self> {
        check_ions(ions)?;
        let e_ref = rydberg_reference_energy(frame_mw);
        let shift = pulse.two_photon_detuning - e_ref;
        let mut single = DMatrix::<C<T>>::zeros(LEVELS, LEVELS);
        single[(Level::E.index(), Level::E.index())] = cr(pulse.delta);
        single[(Level::S.index(), Level::S.index())] = cr(mw.delta_mw + shift);
        single[(Level::P.index(), Level::P.index())] = cr(shift);
        let h_mw = coupling::<T>(Level::S, Level::P).scale_real(mw.omega_mw);
        let single = Operator::from_matrix_unchecked(single, OperatorKind::Hamiltonian).add(&h_mw)?;
        let mut fixed = sum_over_ions(&single, ions)?;
        if ions == 2 && v_max != T::zero() {
            let mut hi = DMatrix::<C<T>>::zeros(LEVELS * LEVELS, LEVELS * LEVELS);
            let sp = pair_index(Level::S, Level::P);
            let ps = pair_index(Level::P, Level::S);
            let v = cr(exchange_strength(v_max));
            hi[(sp, ps)] = v;
            hi[(ps, sp)] = v;
            fixed = fixed.add(&Operator::from_matrix_unchecked(hi, OperatorKind::Hamiltonian))?;
        }
        Ok(Self {
            fixed: fixed.with_kind(OperatorKind::Hamiltonian)?,
            omega1: sum_over_ions(&coupling(Level::Q0, Level::E), ions)?,
            omega2: sum_over_ions(&coupling(Level::E, Level::S), ions)?,
        })
    }

    pub fn at(&self, pulse: &PulseSchedule<T>, t: T) -> Operator<T> {
        let m = self.fixed.matrix() + self.omega1.matrix() * cr(pulse.omega1(t)) + self.omega2.matrix() * cr(pulse.omega2(t));
        Operator::from_matrix_unchecked(m, OperatorKind::Hamiltonian)
    }
}

/// Full Hamiltonian at time `t ∈ [0, T]`.
pub fn build_hamiltonian<T: Real>(
    t: T,
    pulse: &PulseSchedule<T>,
    mw: &MicrowaveField<T>,
    pair: &RydbergPair,
    ions: usize,
) -> Result<Operator<T>> {
    check_time(t, pulse)?;
    Ok(HamiltonianParts::new(pulse, mw, mw, pair.v_max(), ions)?.at(pulse, t))
}

fn check_time<T: Real>(t: T, pulse: &PulseSchedule<T>) -> Result<()> {
    let slack = pulse.duration * T::lit(1e-12);
    if !(t >= -slack && t <= pulse.duration + slack) {
        return Err(Error::Config(format!(
            "time {} outside [0, {}]",
            t.to_f64_lossy(),
            pulse.duration.to_f64_lossy()
        )));
    }
    Ok(())
}

/// Decay and laser-dephasing collapse operators, embedded for every ion.
///
/// Each of `e`, `s`, `p` decays with half its rate into `q1` and half into
/// `g`. A linewidth `Γ1` of the first laser dephases all levels it lifts the
/// ion into (`e`, `s`, `p`) via `√Γ1 (P_e + P_s + P_p)`; the second laser
/// likewise contributes `√Γ2 (P_s + P_p)`.
pub fn collapse_operators<T: Real>(scheme: &LevelScheme<T>, noise: &NoiseModel<T>, ions: usize) -> Result<Vec<Operator<T>>> {
    check_ions(ions)?;
    let mut single = Vec::new();
    for (from, to, rate) in scheme.decay_channels() {
        single.push(projector::<T>(to, from).scale_real(rate.sqrt()));
    }
    let dephasing = |levels: &[Level], gamma: T| {
        let mut m = DMatrix::<C<T>>::zeros(LEVELS, LEVELS);
        for l in levels {
            m[(l.index(), l.index())] = cr(gamma.sqrt());
        }
        Operator::from_matrix_unchecked(m, OperatorKind::Collapse)
    };
    if noise.gamma1 > T::zero() {
        single.push(dephasing(&[Level::E, Level::S, Level::P], noise.gamma1));
    }
    if noise.gamma2 > T::zero() {
        single.push(dephasing(&[Level::S, Level::P], noise.gamma2));
    }
    let mut out = Vec::with_capacity(single.len() * ions);
    for ion in 0..ions {
        for c in &single {
            out.push(embed(&Operator::from_matrix_unchecked(c.matrix().clone(), OperatorKind::Collapse), ion, ions)?);
        }
    }
    Ok(out)
}

/// Nonzero entries of a square matrix.
#[derive(Debug, Clone)]
struct Sparse<T: Real> {
    entries: Vec<(usize, usize, C<T>)>,
}

impl<T: Real> Sparse<T> {
    fn from_dense(m: &DMatrix<C<T>>) -> Self {
        let mut entries = Vec::new();
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let v = m[(i, j)];
                if v.re != T::zero() || v.im != T::zero() {
                    entries.push((i, j, v));
                }
            }
        }
        Self { entries }
    }
}

/// `dρ/dt = −i[H(t), ρ] + Σ_k (C_k ρ C_k† − ½{C_k†C_k, ρ})` on column-major
/// density matrices, using the sparsity of every term.
#[derive(Debug, Clone)]
pub struct LindbladGenerator<T: Real> {
    dim: usize,
    pulse: PulseSchedule<T>,
    fixed: Sparse<T>,
    omega1: Sparse<T>,
    omega2: Sparse<T>,
    jumps: Vec<Sparse<T>>,
    scratch: Vec<C<T>>,
}

impl<T: Real> LindbladGenerator<T> {
    pub fn new(parts: &HamiltonianParts<T>, collapses: &[Operator<T>], pulse: &PulseSchedule<T>) -> Result<Self> {
        let dim = parts.fixed.dim();
        if collapses.iter().any(|c| c.dim() != dim) {
            return Err(Error::Dimension("collapse operator dimension mismatch".into()));
        }
        // Effective non-Hermitian part: H − (i/2) Σ C†C.
        let mut fixed = parts.fixed.matrix().clone();
        for c in collapses {
            let m = c.matrix();
            fixed -= m.adjoint() * m * C::new(T::zero(), T::lit(0.5));
        }
        Ok(Self {
            dim,
            pulse: *pulse,
            fixed: Sparse::from_dense(&fixed),
            omega1: Sparse::from_dense(parts.omega1.matrix()),
            omega2: Sparse::from_dense(parts.omega2.matrix()),
            jumps: collapses.iter().map(|c| Sparse::from_dense(c.matrix())).collect(),
            scratch: vec![C::new(T::zero(), T::zero()); dim * dim],
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Writes `dρ/dt` at time `t` into `out`; both slices are column-major.
    pub fn apply(&mut self, t: T, rho: &[C<T>], out: &mut [C<T>]) {
        let n = self.dim;
        let zero = C::new(T::zero(), T::zero());
        let k = &mut self.scratch;
        k.iter_mut().for_each(|z| *z = zero);
        let terms = [(&self.fixed, T::one()), (&self.omega1, self.pulse.omega1(t)), (&self.omega2, self.pulse.omega2(t))];
        for (sp, coef) in terms {
            if coef == T::zero() {
                continue;
            }
            for &(r, c, v) in &sp.entries {
                let v = v * coef;
                for j in 0..n {
                    k[r + j * n] += v * rho[c + j * n];
                }
            }
        }
        // −i K + i K†
        for j in 0..n {
            for i in 0..n {
                let a = k[i + j * n];
                let b = k[j + i * n];
                out[i + j * n] = C::new(a.im + b.im, b.re - a.re);
            }
        }
        for jump in &self.jumps {
            for &(a, b, c1) in &jump.entries {
                for &(a2, b2, c2) in &jump.entries {
                    out[a + a2 * n] += c1 * rho[b + b2 * n] * c2.conj();
                }
            }
        }
    }
}
