use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rydgate::lindblad::{
    evolve, uniform_grid, EvolveOptions, HamiltonianParts, IntegratorOptions, NamedObservable, NoiseModel,
    PulseSchedule, Setup, StokesSign,
};
use rydgate::qcore::{basis_ket, product_ket, projector, DensityState, Level, LevelScheme, Operator};
use rydgate::spectra::MicrowaveField;
use rydgate::C;

fn c(re: f64, im: f64) -> C<f64> {
    C::new(re, im)
}

fn tight() -> EvolveOptions<f64> {
    EvolveOptions { integrator: IntegratorOptions::with_tolerances(1e-11, 1e-13), ..Default::default() }
}

fn single(level: Level) -> DensityState<f64> {
    DensityState::from_ket(&basis_ket(level)).unwrap()
}

fn lossless_setup(ions: usize, mw: MicrowaveField<f64>, v: f64) -> Setup<f64> {
    Setup::with_v_max(LevelScheme::lossless(), mw, v, ions).unwrap()
}

fn population(level: Level) -> NamedObservable<f64> {
    (level.label().to_string(), projector(level, level))
}

#[test]
fn zero_hamiltonian_leaves_state_unchanged() {
    let pulse = PulseSchedule::constant(0.0, 0.0, 0.0, 2.0).unwrap();
    let psi = (basis_ket::<f64>(Level::Q0) + basis_ket(Level::S) * c(0.0, 1.0)) * c(0.5f64.sqrt(), 0.0);
    let rho0 = DensityState::from_ket(&psi).unwrap();
    let tr = evolve(&rho0, &pulse, &lossless_setup(1, MicrowaveField::off(), 0.0), &NoiseModel::none(), &uniform_grid(2.0, 11), &[], &tight()).unwrap();
    for st in &tr.states {
        assert!(st.distance(&rho0) < 1e-14);
    }
}

#[test]
fn two_level_rabi_matches_closed_form() {
    // Only the |0>-|e> leg driven on resonance: P_e = sin²(Ω t / 2).
    let omega = 2.0 * std::f64::consts::PI * 3.0;
    let pulse = PulseSchedule::constant(omega, 0.0, 0.0, 1.0).unwrap();
    let grid = uniform_grid(1.0, 41);
    let tr = evolve(&single(Level::Q0), &pulse, &lossless_setup(1, MicrowaveField::off(), 0.0), &NoiseModel::none(), &grid, &[population(Level::E)], &tight())
        .unwrap();
    let pe = tr.observable("e").unwrap();
    for (t, p) in grid.iter().zip(pe) {
        let exact = (omega * t / 2.0).sin().powi(2);
        assert!((p - exact).abs() < 1e-6, "t={t}: {p} vs {exact}");
    }
    // A full period returns to |0>.
    let period = 2.0 * std::f64::consts::PI / omega;
    let p2 = PulseSchedule::constant(omega, 0.0, 0.0, period).unwrap();
    let back = evolve(&single(Level::Q0), &p2, &lossless_setup(1, MicrowaveField::off(), 0.0), &NoiseModel::none(), &[period], &[], &tight()).unwrap();
    assert!((back.final_state().population(Level::Q0.index()) - 1.0).abs() < 1e-8);
}

#[test]
fn intermediate_decay_is_exponential_with_equal_branching() {
    let gamma = 1.7;
    let scheme = LevelScheme::new(gamma, 0.0, 0.0).unwrap();
    let setup = Setup::with_v_max(scheme, MicrowaveField::off(), 0.0, 1).unwrap();
    let pulse = PulseSchedule::constant(0.0, 0.0, 0.0, 3.0).unwrap();
    let grid = uniform_grid(3.0, 31);
    let obs = [population(Level::E), population(Level::Q1), population(Level::G)];
    let tr = evolve(&single(Level::E), &pulse, &setup, &NoiseModel::none(), &grid, &obs, &tight()).unwrap();
    for (i, t) in grid.iter().enumerate() {
        let e = (-gamma * t).exp();
        assert!((tr.observable("e").unwrap()[i] - e).abs() < 1e-8);
        assert!((tr.observable("q1").unwrap()[i] - (1.0 - e) / 2.0).abs() < 1e-8);
        assert!((tr.observable("g").unwrap()[i] - (1.0 - e) / 2.0).abs() < 1e-8);
    }
}

fn unitary_step(h: &DMatrix<C<f64>>, rho: &DMatrix<C<f64>>, dt: f64) -> DMatrix<C<f64>> {
    let u = (h * c(0.0, -dt)).exp();
    &u * rho * u.adjoint()
}

#[test]
fn piecewise_constant_evolution_matches_matrix_exponential() {
    // Three constant segments with different drives, each propagated from
    // the previous segment's final state.
    let mw = MicrowaveField::new(9.0, 2.0).unwrap();
    let setup = lossless_setup(2, mw, 1.3);
    let segments = [(3.0, 4.0, 1.5, 0.4), (5.0, 1.0, -0.7, 0.3), (0.0, 6.0, 2.0, 0.5)];
    let q0 = basis_ket::<f64>(Level::Q0);
    let q1 = basis_ket::<f64>(Level::Q1);
    let plus = (&q0 + &q1) * c(0.5f64.sqrt(), 0.0);
    let mut rho = DensityState::from_ket(&product_ket(&plus, &q0)).unwrap();
    let mut oracle = rho.rho().clone();
    for (o1, o2, delta, dt) in segments {
        let pulse = PulseSchedule::constant(o1, o2, delta, dt).unwrap();
        let h = HamiltonianParts::new(&pulse, &mw, &mw, setup.v_max, 2).unwrap().at(&pulse, 0.0).into_matrix();
        oracle = unitary_step(&h, &oracle, dt);
        rho = evolve(&rho, &pulse, &setup, &NoiseModel::none(), &[dt], &[], &tight()).unwrap().final_state().clone();
        let err = (rho.rho() - &oracle).norm();
        assert!(err < 1e-8, "segment error {err:e}");
    }
}

#[test]
fn dissipative_single_ion_matches_liouvillian_exponential() {
    let scheme = LevelScheme::new(0.8, 0.3, 0.2).unwrap();
    let noise = NoiseModel { gamma1: 0.05, gamma2: 0.09, ..NoiseModel::none() };
    let mw = MicrowaveField::new(4.0, 1.0).unwrap();
    let setup = Setup::with_v_max(scheme, mw, 0.0, 1).unwrap();
    let pulse = PulseSchedule::constant(2.0, 3.0, 1.0, 1.5).unwrap();
    let parts = HamiltonianParts::new(&pulse, &mw, &mw, 0.0, 1).unwrap();
    let h = parts.at(&pulse, 0.0).into_matrix();
    let cs = rydgate::lindblad::collapse_operators(&scheme, &noise, 1).unwrap();
    // Column-stacking superoperator: vec(AXB) = (Bᵀ ⊗ A) vec(X).
    let n = 6;
    let id = DMatrix::<C<f64>>::identity(n, n);
    let mut l = (id.kronecker(&h) - h.transpose().kronecker(&id)) * c(0.0, -1.0);
    for op in &cs {
        let m = op.matrix();
        let cdc = m.adjoint() * m;
        l += m.conjugate().kronecker(m) - (id.kronecker(&cdc) + cdc.transpose().kronecker(&id)) * c(0.5, 0.0);
    }
    let rho0 = single(Level::Q0);
    let v0 = DVector::from_column_slice(rho0.rho().as_slice());
    let v1 = (l * c(1.5, 0.0)).exp() * v0;
    let oracle = DMatrix::from_column_slice(n, n, v1.as_slice());
    let tr = evolve(&rho0, &pulse, &setup, &noise, &[1.5], &[], &tight()).unwrap();
    assert!((tr.final_state().rho() - oracle).norm() < 1e-8);
}

#[test]
fn noiseless_shot_average_is_bit_identical_to_single_run() {
    let mw = MicrowaveField::new(30.0, 0.0).unwrap();
    let setup = Setup::with_v_max(LevelScheme::new(0.2, 0.1, 0.1).unwrap(), mw, 2.0, 2).unwrap();
    let pulse = PulseSchedule::double_stirap(40.0, 50.0, 5.0, 1.0, StokesSign::Rectified).unwrap();
    let q0 = basis_ket::<f64>(Level::Q0);
    let rho0 = DensityState::from_ket(&product_ket(&q0, &q0)).unwrap();
    let grid = uniform_grid(1.0, 5);
    let one = NoiseModel { gamma1: 0.01, ..NoiseModel::none() };
    let many = NoiseModel { shots: 25, seed: 99, ..one };
    let opts = EvolveOptions::default();
    let a = evolve(&rho0, &pulse, &setup, &one, &grid, &[], &opts).unwrap();
    let b = evolve(&rho0, &pulse, &setup, &many, &grid, &[], &opts).unwrap();
    assert_eq!(b.shots, 1);
    for (x, y) in a.states.iter().zip(&b.states) {
        assert_eq!(x.rho(), y.rho());
    }
    let noisy = NoiseModel { mw_fractional_sigma: 0.03, shots: 4, ..one };
    let c = evolve(&rho0, &pulse, &setup, &noisy, &grid, &[], &opts).unwrap();
    assert_eq!(c.shots, 4);
    assert!(c.final_state().validate().is_ok());
}

#[test]
fn halving_tolerance_changes_result_less_than_coarse_tolerance() {
    let mw = MicrowaveField::new(60.0, 0.0).unwrap();
    let setup = Setup::with_v_max(LevelScheme::new(0.5, 0.1, 0.1).unwrap(), mw, 4.0, 2).unwrap();
    let pulse = PulseSchedule::double_stirap(60.0, 80.0, 8.0, 0.8, StokesSign::Rectified).unwrap();
    let plus = (basis_ket::<f64>(Level::Q0) + basis_ket(Level::Q1)) * c(0.5f64.sqrt(), 0.0);
    let rho0 = DensityState::from_ket(&product_ket(&plus, &plus)).unwrap();
    let run = |rtol: f64| {
        let o = EvolveOptions { integrator: IntegratorOptions::with_tolerances(rtol, rtol * 1e-2), ..Default::default() };
        evolve(&rho0, &pulse, &setup, &NoiseModel::none(), &[0.8], &[], &o).unwrap().final_state().clone()
    };
    for tol in [1e-6, 1e-7, 1e-8, 1e-9] {
        let change = run(tol).distance(&run(tol / 2.0));
        assert!(change < tol, "rtol {tol:e}: change {change:e}");
    }
}

#[test]
fn rejects_bad_grids_and_dimensions() {
    let pulse = PulseSchedule::constant(1.0, 1.0, 0.0, 1.0).unwrap();
    let setup = lossless_setup(1, MicrowaveField::off(), 0.0);
    let rho = single(Level::Q0);
    let n = NoiseModel::none();
    let o = EvolveOptions::default();
    assert!(evolve(&rho, &pulse, &setup, &n, &[0.5, 0.2], &[], &o).is_err());
    assert!(evolve(&rho, &pulse, &setup, &n, &[2.0], &[], &o).is_err());
    assert!(evolve(&rho, &pulse, &lossless_setup(2, MicrowaveField::off(), 0.0), &n, &[1.0], &[], &o).is_err());
    let bad: NamedObservable<f64> = ("x".into(), Operator::identity(36));
    assert!(evolve(&rho, &pulse, &setup, &n, &[1.0], &[bad], &o).is_err());
}

// Purity drift is a global error that accumulates over a few hundred steps,
// so this property runs one decade tighter than the default tolerance.
fn purity_opts() -> EvolveOptions<f64> {
    EvolveOptions { integrator: IntegratorOptions::with_tolerances(1e-9, 1e-11), ..Default::default() }
}

fn random_ket(seed: &[f64]) -> DVector<C<f64>> {
    DVector::from_fn(6, |i, _| c(seed[2 * i], seed[2 * i + 1]))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn single_ion_evolution_preserves_state_invariants(
        amps in prop::collection::vec(-1.0f64..1.0, 12),
        o1 in 0.0f64..30.0, o2 in 0.0f64..30.0, delta in -10.0f64..10.0,
        om_mw in 0.0f64..40.0, de_mw in -10.0f64..10.0,
        ge in 0.0f64..3.0, gs in 0.0f64..0.5, gl in 0.0f64..0.2,
        signed in any::<bool>(),
    ) {
        let psi = random_ket(&amps);
        prop_assume!(psi.norm() > 0.1);
        let rho0 = DensityState::from_ket(&psi).unwrap();
        let stokes = if signed { StokesSign::Signed } else { StokesSign::Rectified };
        let pulse = PulseSchedule::double_stirap(o1, o2, delta, 0.7, stokes).unwrap();
        let setup = Setup::with_v_max(LevelScheme::new(ge, gs, gs * 0.5).unwrap(), MicrowaveField::new(om_mw, de_mw).unwrap(), 0.0, 1).unwrap();
        let noise = NoiseModel { gamma1: gl, gamma2: gl, ..NoiseModel::none() };
        let tr = evolve(&rho0, &pulse, &setup, &noise, &uniform_grid(0.7, 15), &[], &EvolveOptions::default()).unwrap();
        for st in &tr.states {
            prop_assert!(st.validate().is_ok(), "{:?}", st.validate());
            prop_assert!((st.trace().re - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn two_ion_unitary_limit_conserves_purity(
        amps in prop::collection::vec(-1.0f64..1.0, 12),
        o1 in 1.0f64..20.0, o2 in 1.0f64..20.0, delta in -5.0f64..5.0,
        om_mw in 5.0f64..30.0, v in 0.0f64..4.0,
    ) {
        let psi = random_ket(&amps);
        prop_assume!(psi.norm() > 0.1);
        let q0 = basis_ket::<f64>(Level::Q0);
        let rho0 = DensityState::from_ket(&product_ket(&psi, &q0)).unwrap();
        let pulse = PulseSchedule::double_stirap(o1, o2, delta, 0.5, StokesSign::Rectified).unwrap();
        let setup = lossless_setup(2, MicrowaveField::new(om_mw, 0.0).unwrap(), v);
        let tr = evolve(&rho0, &pulse, &setup, &NoiseModel::none(), &uniform_grid(0.5, 6), &[], &purity_opts()).unwrap();
        for st in &tr.states {
            prop_assert!((st.purity() - 1.0).abs() < 1e-8, "purity {}", st.purity());
            prop_assert!(st.validate().is_ok());
        }
    }

    #[test]
    fn two_ion_dissipative_evolution_preserves_invariants(
        o1 in 1.0f64..20.0, o2 in 1.0f64..20.0, delta in -5.0f64..5.0,
        om_mw in 5.0f64..30.0, v in 0.0f64..4.0, ge in 0.0f64..3.0, gl in 0.0f64..0.3,
    ) {
        let plus = (basis_ket::<f64>(Level::Q0) + basis_ket(Level::Q1)) * c(0.5f64.sqrt(), 0.0);
        let rho0 = DensityState::from_ket(&product_ket(&plus, &plus)).unwrap();
        let pulse = PulseSchedule::double_stirap(o1, o2, delta, 0.5, StokesSign::Rectified).unwrap();
        let setup = Setup::with_v_max(LevelScheme::new(ge, 0.1, 0.05).unwrap(), MicrowaveField::new(om_mw, 0.0).unwrap(), v, 2).unwrap();
        let noise = NoiseModel { gamma1: gl, gamma2: gl, ..NoiseModel::none() };
        let tr = evolve(&rho0, &pulse, &setup, &noise, &uniform_grid(0.5, 6), &[], &EvolveOptions::default()).unwrap();
        for st in &tr.states {
            prop_assert!(st.validate().is_ok(), "{:?}", st.validate());
        }
    }
}
