use proptest::prelude::*;
use rydgate::bbr::{ionisation_rate, n_sweep, omega_threshold, temperature_sweep, BbrQuery};
use rydgate::units::{ALPHA, HBAR, K_B, RYDBERG_ENERGY};

/// Same closed form with the logarithm expanded as `Σ e^{−kx}/k`.
fn oracle(n: u32, l: u32, t: f64) -> f64 {
    let n_f = n as f64;
    let x = 4.0 * RYDBERG_ENERGY / (n_f * n_f) / (K_B * t);
    let mut log = 0.0;
    for k in (1..=20_000).rev() {
        log += (-(k as f64) * x).exp() / k as f64;
    }
    let bracket = 2.8 / n_f.powf(7.0 / 3.0) + 2.09 * (l * l) as f64 / n_f.powf(11.0 / 3.0);
    ALPHA.powi(3) * K_B * t / (HBAR * std::f64::consts::PI.powi(2)) * bracket * log
}

#[test]
fn rates_match_series_evaluation() {
    for &(n, l, t) in &[(30, 0, 300.0), (46, 1, 300.0), (60, 0, 100.0), (90, 3, 200.0), (25, 0, 4.0)] {
        let r: f64 = ionisation_rate(&BbrQuery::new(n, l, t).unwrap()).unwrap();
        let o = oracle(n, l, t);
        assert!((r / o - 1.0).abs() < 1e-10, "n = {n}: {r} vs {o}");
    }
}

#[test]
fn room_temperature_sweep_peaks_inside_range() {
    let ns: Vec<u32> = (20..=120).collect();
    let rates = n_sweep(&ns, 0, 300.0f64).unwrap();
    let (i, _) = rates.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    let peak = ns[i];
    assert!((30..=90).contains(&peak), "peak at n = {peak}");
    assert!(rates[0] < rates[i] && *rates.last().unwrap() < rates[i]);
}

#[test]
fn cold_sweep_rises_across_range() {
    let ns: Vec<u32> = (20..=80).collect();
    let rates = n_sweep(&ns, 0, 100.0f64).unwrap();
    assert!(rates.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn angular_term_adds_to_bracket() {
    let (n, t) = (50u32, 300.0f64);
    let r0 = ionisation_rate(&BbrQuery::new(n, 0, t).unwrap()).unwrap();
    let r5 = ionisation_rate(&BbrQuery::new(n, 5, t).unwrap()).unwrap();
    let nf = n as f64;
    let expected = 1.0 + 2.09 * 25.0 / nf.powf(11.0 / 3.0) / (2.8 / nf.powf(7.0 / 3.0));
    assert!((r5 / r0 - expected).abs() < 1e-12);
}

#[test]
fn threshold_follows_inverse_square() {
    let a: f64 = omega_threshold(30).unwrap();
    let b: f64 = omega_threshold(60).unwrap();
    assert!((a / b - 4.0).abs() < 1e-12);
    let w46: f64 = omega_threshold(46).unwrap();
    assert!((w46 - 4.0 * RYDBERG_ENERGY / (46.0 * 46.0) / HBAR).abs() < 1e-3);
    // ħω/k_BT at 300 K is of order one across the Rydberg range.
    let x = HBAR * w46 / (K_B * 300.0);
    assert!(x > 0.3 && x < 3.0, "{x}");
}

#[test]
fn rate_vanishes_toward_zero_temperature() {
    let rates = temperature_sweep(46, 0, &[0.0f64, 1.0, 5.0, 20.0]).unwrap();
    assert_eq!(rates[0], 0.0);
    assert!(rates[1] < 1e-100);
    assert!(rates.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn overridden_threshold_is_used() {
    let q = BbrQuery::new(46, 0, 300.0f64).unwrap();
    let lower = q.with_threshold(q.omega_threshold * 0.5).unwrap();
    assert!(ionisation_rate(&lower).unwrap() > ionisation_rate(&q).unwrap());
}

proptest! {
    #[test]
    fn monotone_in_temperature(n in 20u32..150, l in 0u32..4, t in 1.0f64..600.0, dt in 0.01f64..100.0) {
        let a = ionisation_rate(&BbrQuery::new(n, l, t).unwrap()).unwrap();
        let b = ionisation_rate(&BbrQuery::new(n, l, t + dt).unwrap()).unwrap();
        prop_assert!(b > a && a >= 0.0);
    }

    #[test]
    fn continuous_in_temperature(n in 20u32..150, t in 1.0f64..600.0) {
        let a = ionisation_rate(&BbrQuery::new(n, 0, t).unwrap()).unwrap();
        let b = ionisation_rate(&BbrQuery::new(n, 0, t * (1.0 + 1e-9)).unwrap()).unwrap();
        prop_assert!((b / a - 1.0).abs() < 1e-6);
    }
}
