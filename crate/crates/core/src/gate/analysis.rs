//! Ramsey and parity analysis of the two-qubit block after the gate.
//!
//! Qubit ordering inside the 4×4 block is `|00>, |01>, |10>, |11>` with
//! qubit `0 ≙ q0`, `1 ≙ q1` and ion 1 as the left factor. Population that
//! leaked out of the qubit space stays in the trace deficit and counts
//! against the fidelity.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::fit_harmonics;
use crate::lindblad::StokesSign;
use crate::qcore::{pair_index, DensityState, Level};
use crate::scalar::{Real, C};

const QUBIT_LEVELS: [Level; 2] = [Level::Q0, Level::Q1];

/// Minimum conditional-Ramsey contrast accepted by the phase fit.
pub const MIN_CONTRAST: f64 = 0.05;

fn c<T: Real>(re: f64, im: f64) -> C<T> {
    C::new(T::lit(re), T::lit(im))
}

/// Extracts the qubit block of a two-ion state (36×36) or passes a 4×4
/// qubit density matrix through unchanged.
pub fn qubit_block<T: Real>(state: &DensityState<T>) -> Result<DMatrix<C<T>>> {
    match state.dim() {
        4 => Ok(state.rho().clone()),
        36 => {
            let idx: Vec<usize> = QUBIT_LEVELS
                .iter()
                .flat_map(|a| QUBIT_LEVELS.iter().map(move |b| pair_index(*a, *b)))
                .collect();
            Ok(DMatrix::from_fn(4, 4, |i, j| state.rho()[(idx[i], idx[j])]))
        }
        d => Err(Error::Dimension(format!("expected a two-ion state, got dim {d}"))),
    }
}

/// Ideal π/2 rotation about `cos θ X + sin θ Y`.
pub fn analyzer_pulse<T: Real>(theta: T) -> DMatrix<C<T>> {
    let s = T::FRAC_1_SQRT_2();
    let e = C::new(theta.cos(), theta.sin());
    let mi = C::new(T::zero(), -s);
    DMatrix::from_row_slice(2, 2, &[C::new(s, T::zero()), mi * e.conj(), mi * e, C::new(s, T::zero())])
}

/// Local rotation taking the ideal gate output to `(|00> + i|11>)/√2`:
/// `S ⊗ U` with `S = diag(1, i)` and `U = [[−1, 1], [1, 1]]/√2`. With a
/// sign-flipped Stokes pulse each ion's `|0>` returns with a minus sign, so
/// `Z ⊗ Z` is applied first.
pub fn local_rotation<T: Real>(stokes: StokesSign) -> DMatrix<C<T>> {
    let h = T::FRAC_1_SQRT_2();
    let u = DMatrix::from_row_slice(2, 2, &[C::new(-h, T::zero()), C::new(h, T::zero()), C::new(h, T::zero()), C::new(h, T::zero())]);
    let s = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c::<T>(1.0, 0.0), c(0.0, 1.0)]));
    let r = s.kronecker(&u);
    match stokes {
        StokesSign::Rectified => r,
        StokesSign::Signed => {
            let z = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c::<T>(1.0, 0.0), c(-1.0, 0.0)]));
            r * z.kronecker(&z)
        }
    }
}

/// `n` phases evenly spaced on `[0, 2π)`.
pub fn uniform_phases<T: Real>(n: usize) -> Vec<T> {
    (0..n).map(|i| T::two_pi() * T::lit(i as f64) / T::lit(n as f64)).collect()
}

fn wrap<T: Real>(x: T) -> T {
    let two_pi = T::two_pi();
    let mut y = x % two_pi;
    if y > T::pi() {
        y -= two_pi;
    } else if y <= -T::pi() {
        y += two_pi;
    }
    y
}

/// Ramsey fringes of ion 2 conditional on ion 1 being in `|0>` or `|1>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalPhaseScan<T> {
    pub phases: Vec<T>,
    /// Probability of finding ion 2 in `|1>` given ion 1 in `|0>`.
    pub given_0: Vec<T>,
    pub given_1: Vec<T>,
    pub phase_0: T,
    pub phase_1: T,
    /// `|phase_1 − phase_0|` folded into `[0, π]`.
    pub difference: T,
    /// Smaller peak-to-peak contrast of the two fringes.
    pub contrast: T,
}

/// Applies an analyzer π/2 pulse to ion 2 at each phase and fits the
/// conditional fringes.
pub fn conditional_phase_scan<T: Real>(state: &DensityState<T>, phases: &[T]) -> Result<ConditionalPhaseScan<T>> {
    let rho = qubit_block(state)?;
    let id = DMatrix::<C<T>>::identity(2, 2);
    let mut given = [Vec::with_capacity(phases.len()), Vec::with_capacity(phases.len())];
    for &theta in phases {
        let u = id.kronecker(&analyzer_pulse(theta));
        let r = &u * &rho * u.adjoint();
        for (a, curve) in given.iter_mut().enumerate() {
            let both = r[(2 * a + 1, 2 * a + 1)].re;
            let total = r[(2 * a, 2 * a)].re + both;
            if !(total > T::lit(1e-12)) {
                return Err(Error::Fit(format!("ion 1 is never found in |{a}>")));
            }
            curve.push(both / total);
        }
    }
    let f0 = fit_harmonics(phases, &given[0], &[1])?;
    let f1 = fit_harmonics(phases, &given[1], &[1])?;
    let contrast = (T::lit(2.0) * f0.amplitude(1)).min(T::lit(2.0) * f1.amplitude(1));
    if contrast < T::lit(MIN_CONTRAST) {
        return Err(Error::Fit(format!("Ramsey contrast {:.3} is below {MIN_CONTRAST}", contrast.to_f64_lossy())));
    }
    let (phase_0, phase_1) = (f0.phase(1), f1.phase(1));
    let [given_0, given_1] = given;
    Ok(ConditionalPhaseScan {
        phases: phases.to_vec(),
        given_0,
        given_1,
        phase_0,
        phase_1,
        difference: wrap(phase_1 - phase_0).abs(),
        contrast,
    })
}

/// Parity oscillation in the Bell frame and the fidelity estimate
/// `F = (P + C)/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParityOscillation<T> {
    pub phases: Vec<T>,
    pub parity: Vec<T>,
    pub population: T,
    pub coherence: T,
    pub fidelity: T,
}

/// Rotates the qubit block into the Bell frame, applies simultaneous π/2
/// analyzer pulses of phase θ to both ions and records the parity
/// `P_00 + P_11 − P_01 − P_10`. `C` is the fitted 2θ amplitude; the fit
/// keeps a free phase and the 1θ terms so that `C` is offset-invariant.
pub fn parity_oscillation<T: Real>(state: &DensityState<T>, stokes: StokesSign, phases: &[T]) -> Result<ParityOscillation<T>> {
    let rho = qubit_block(state)?;
    let r = local_rotation::<T>(stokes);
    let bell = &r * rho * r.adjoint();
    let population = bell[(0, 0)].re + bell[(3, 3)].re;
    let parity: Vec<T> = phases
        .iter()
        .map(|&theta| {
            let a = analyzer_pulse(theta);
            let u = a.kronecker(&a);
            let m = &u * &bell * u.adjoint();
            m[(0, 0)].re + m[(3, 3)].re - m[(1, 1)].re - m[(2, 2)].re
        })
        .collect();
    let fit = fit_harmonics(phases, &parity, &[1, 2])?;
    let coherence = fit.amplitude(2);
    Ok(ParityOscillation {
        phases: phases.to_vec(),
        parity,
        population,
        coherence,
        fidelity: (population + coherence) * T::lit(0.5),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    fn ket(v: [f64; 4], im: [f64; 4]) -> DensityState<f64> {
        let k = DVector::from_fn(4, |i, _| C::new(v[i], im[i]));
        DensityState::from_ket(&k).unwrap()
    }

    fn target() -> DensityState<f64> {
        ket([-0.5, 0.5, 0.5, 0.5], [0.0; 4])
    }

    #[test]
    fn ideal_target_has_pi_phase_difference() {
        let s = conditional_phase_scan(&target(), &uniform_phases(24)).unwrap();
        assert!((s.difference - std::f64::consts::PI).abs() < 1e-12);
        assert!((s.contrast - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_state_has_zero_phase_difference() {
        let s = conditional_phase_scan(&ket([0.5; 4], [0.0; 4]), &uniform_phases(24)).unwrap();
        assert!(s.difference.abs() < 1e-12);
    }

    #[test]
    fn rotation_maps_target_to_bell_state() {
        let r = local_rotation::<f64>(StokesSign::Rectified);
        let out = &r * target().rho() * r.adjoint();
        let bell = ket([std::f64::consts::FRAC_1_SQRT_2, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, std::f64::consts::FRAC_1_SQRT_2]);
        assert!((out - bell.rho()).norm() < 1e-14);
        // Sign-flipped Stokes: both |0> amplitudes pick up −1.
        let flipped = ket([-0.5, -0.5, -0.5, 0.5], [0.0; 4]);
        let rs = local_rotation::<f64>(StokesSign::Signed);
        assert!((&rs * flipped.rho() * rs.adjoint() - bell.rho()).norm() < 1e-14);
    }

    #[test]
    fn rotation_round_trip_restores_state() {
        for stokes in [StokesSign::Rectified, StokesSign::Signed] {
            let r = local_rotation::<f64>(stokes);
            let rho = ket([0.3, -0.2, 0.6, 0.1], [0.1, 0.4, 0.0, -0.3]);
            let there = &r * rho.rho() * r.adjoint();
            let back = r.adjoint() * there * &r;
            assert!((back - rho.rho()).norm() < 1e-14);
        }
    }

    #[test]
    fn parity_of_perfect_and_mixed_states() {
        let phases = uniform_phases(32);
        let p = parity_oscillation(&target(), StokesSign::Rectified, &phases).unwrap();
        assert!((p.population - 1.0).abs() < 1e-12 && (p.coherence - 1.0).abs() < 1e-12);
        assert!((p.fidelity - 1.0).abs() < 1e-12);
        for (th, v) in phases.iter().zip(&p.parity) {
            assert!((v.abs() - (2.0 * th).sin().abs()).abs() < 1e-12);
        }
        let mixed = DensityState::<f64>::maximally_mixed(4);
        let m = parity_oscillation(&mixed, StokesSign::Rectified, &phases).unwrap();
        assert!((m.population - 0.5).abs() < 1e-12 && m.coherence.abs() < 1e-12);
        assert!((m.fidelity - 0.25).abs() < 1e-12);
    }

    #[test]
    fn partially_coherent_bell_state() {
        // Bell-frame state with P = 0.85 and C = 0.72, mapped back to the
        // gate frame before analysis.
        let mut b = DMatrix::<C<f64>>::zeros(4, 4);
        b[(0, 0)] = C::new(0.425, 0.0);
        b[(3, 3)] = C::new(0.425, 0.0);
        b[(1, 1)] = C::new(0.075, 0.0);
        b[(2, 2)] = C::new(0.075, 0.0);
        b[(0, 3)] = C::new(0.0, -0.36);
        b[(3, 0)] = C::new(0.0, 0.36);
        let r = local_rotation::<f64>(StokesSign::Rectified);
        let rho = DensityState::new(r.adjoint() * b * &r).unwrap();
        let p = parity_oscillation(&rho, StokesSign::Rectified, &uniform_phases(32)).unwrap();
        assert!((p.population - 0.85).abs() < 1e-12);
        assert!((p.coherence - 0.72).abs() < 1e-12);
        assert!((p.fidelity - 0.785).abs() < 1e-12);
    }

    #[test]
    fn low_contrast_is_rejected() {
        let mixed = DensityState::<f64>::maximally_mixed(4);
        assert!(matches!(conditional_phase_scan(&mixed, &uniform_phases(16)), Err(Error::Fit(_))));
    }

    #[test]
    fn full_two_ion_state_is_reduced_to_qubit_block() {
        let mixed = DensityState::<f64>::maximally_mixed(36);
        let q = qubit_block(&mixed).unwrap();
        assert!((q.trace().re - 4.0 / 36.0).abs() < 1e-15);
        assert!(qubit_block(&DensityState::<f64>::maximally_mixed(6)).is_err());
    }
}
