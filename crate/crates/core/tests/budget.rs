use proptest::prelude::*;
use rydgate::budget::{
    budget_report, scaling_extrapolate, scaling_monomial, scenario_inputs, simulated_contribution, BudgetInputs, ErrorSource,
    Method, ScalingPoint,
};
use rydgate::gate::GateScenario;
use rydgate::lindblad::{EvolveOptions, NoiseModel};
use rydgate::units::mhz;
use rydgate::{LevelScheme, MicrowaveField};

const LAWS: [ErrorSource; 6] = [
    ErrorSource::RydbergDecay,
    ErrorSource::LaserLinewidth,
    ErrorSource::IntermediateScattering,
    ErrorSource::Nonadiabatic,
    ErrorSource::MwFluctuation,
    ErrorSource::MotionalCoupling,
];

fn point() -> impl Strategy<Value = ScalingPoint> {
    (30.0f64..90.0, 1.0f64..8.0, 1e-4f64..0.1, 1.0f64..500.0, 0.0f64..2000.0, 1e-5f64..0.1, 2.0f64..200.0).prop_map(
        |(n, r_um, linewidth_mhz, delta_mhz, extra, mw_sigma, n_ions)| ScalingPoint {
            n,
            r_um,
            linewidth_mhz,
            delta_mhz,
            omega_max_mhz: delta_mhz / 2.0 + 10.0 + extra,
            mw_sigma,
            n_ions,
        },
    )
}

proptest! {
    #[test]
    fn extrapolation_chains(a in point(), b in point(), c in point(), v in 1e-6f64..1.0) {
        for s in LAWS {
            let direct = scaling_extrapolate(s, v, &a, &c).unwrap();
            let chained = scaling_extrapolate(s, scaling_extrapolate(s, v, &a, &b).unwrap(), &b, &c).unwrap();
            prop_assert!((direct - chained).abs() <= 1e-12 * direct.abs());
            prop_assert_eq!(scaling_extrapolate(s, v, &a, &a).unwrap(), v);
        }
    }
}

#[test]
fn decay_extrapolates_to_improved_regime() {
    let from = ScalingPoint::for_scenario(GateScenario::Current);
    let to = ScalingPoint::for_scenario(GateScenario::Improved);
    let v = scaling_extrapolate(ErrorSource::RydbergDecay, 3.5e-2, &from, &to).unwrap();
    let by_hand = 3.5e-2 * (46.0f64 / 60.0).powi(7) * (2.3f64 / 4.2).powi(3);
    assert!((v - by_hand).abs() < 1e-15);
    assert!(v > 2.5e-4 && v < 1e-3, "{v}");
}

#[test]
fn motional_scaling_over_crystal_size() {
    let mut two = ScalingPoint::for_scenario(GateScenario::Current);
    two.n_ions = 2.0;
    let mut hundred = two;
    hundred.n_ions = 100.0;
    let factor = scaling_extrapolate(ErrorSource::MotionalCoupling, 1.0, &two, &hundred).unwrap();
    assert!((factor - 50f64.powf(1.0 / 12.0)).abs() < 1e-14);
    assert!((factor - 1.39).abs() < 0.01);
    assert!(scaling_monomial(ErrorSource::Polarisability, &two).is_err());
}

/// Demonstrated-gate parameters with every field scaled up eightfold, a
/// strong dressing field and no loss channels.
fn ideal_inputs() -> BudgetInputs<f64> {
    let mut p = GateScenario::Current.params::<f64>().unwrap();
    p.omega1 = mhz(320.0);
    p.omega2 = mhz(452.0);
    p.delta = mhz(40.0);
    p.mw = MicrowaveField::new(mhz(1000.0), 0.0).unwrap();
    p.scheme = LevelScheme::lossless();
    BudgetInputs { label: "custom".into(), params: p, noise: NoiseModel::none(), analytic: vec![] }
}

#[test]
fn ideal_gate_budget_vanishes() {
    let b = budget_report(&ideal_inputs(), &EvolveOptions::default()).unwrap();
    assert!(b.total < 1e-4, "{}", b.total);
    assert!(b.joint_infidelity < 1e-4);
    assert!(b.get(ErrorSource::MwFluctuation).is_none());
    assert!(b.entries.iter().all(|e| e.contribution == 0.0 || e.source == ErrorSource::Nonadiabatic));
}

#[test]
fn improved_budget_stays_below_threshold() {
    let inputs = scenario_inputs::<f64>(GateScenario::Improved, 1, 0).unwrap();
    let b = budget_report(&inputs, &EvolveOptions::default()).unwrap();
    for e in &b.entries {
        assert!(e.contribution >= 0.0);
    }
    let sum: f64 = b.entries.iter().map(|e| e.contribution).sum();
    assert!((sum - b.total).abs() < 1e-15);
    assert!(b.total <= 3e-3, "{b:#?}");
    assert!(sum >= 0.5 * b.joint_infidelity);
    assert_eq!(b.get(ErrorSource::MwFluctuation).map(|_| ()), Some(()));
    let mw = b.entries.iter().find(|e| e.source == ErrorSource::MwFluctuation).unwrap();
    assert_eq!(mw.method, Method::AnalyticScaling);
    assert!(mw.contribution < 1e-4);
    let motion = b.get(ErrorSource::MotionalCoupling).unwrap();
    assert!(motion > 1e-4 / 3.0 && motion < 3e-4, "{motion}");
}

#[test]
fn single_toggle_matches_budget_entry() {
    let inputs = scenario_inputs::<f64>(GateScenario::Improved, 1, 0).unwrap();
    let opts = EvolveOptions::default();
    let b = budget_report(&inputs, &opts).unwrap();
    let e = simulated_contribution(ErrorSource::IntermediateScattering, &inputs.params, &inputs.noise, &opts).unwrap();
    assert_eq!(Some(e), b.get(ErrorSource::IntermediateScattering));
    assert!(simulated_contribution(ErrorSource::MotionalCoupling, &inputs.params, &inputs.noise, &opts).is_err());
}
