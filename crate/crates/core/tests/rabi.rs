use rydgate::lindblad::{preset_panel, rabi_experiment, EvolveOptions, RabiCurves, RabiPanelKind};

fn run(kind: RabiPanelKind) -> RabiCurves<f64> {
    let start = std::time::Instant::now();
    let panel = preset_panel::<f64>(kind).unwrap();
    let curves = rabi_experiment(&panel, &EvolveOptions::default()).unwrap();
    eprintln!(
        "{}: ω1 = {:.4}, ωc = {:.4}, ratio {:.4}, P_rr(t*) = {:.4} ({:.1?})",
        curves.label,
        curves.single_frequency,
        curves.collective_frequency,
        curves.ratio,
        curves.rr_at_first_single_maximum,
        start.elapsed()
    );
    curves
}

#[test]
fn panels_show_tunable_blockade() {
    let b = run(RabiPanelKind::NoInteraction);
    let c = run(RabiPanelKind::Intermediate);
    let d = run(RabiPanelKind::Blockade);

    // Without interaction the ions are independent: P_rr ≈ P_single².
    let worst = b.p_single.iter().zip(&b.p_rr).map(|(s, rr)| (s * s - rr).abs()).fold(0.0, f64::max);
    assert!(worst < 0.02, "independent-ion deviation {worst}");

    for p in [&b, &c, &d] {
        // Fitted single-ion frequency tracks the two-photon estimate Ω1Ω2c_s/(2Δ).
        assert!((p.single_frequency / p.omega_uv - 1.0).abs() < 0.02, "{}: {} vs {}", p.label, p.single_frequency, p.omega_uv);
    }
    assert!((d.ratio - 2f64.sqrt()).abs() < 0.03 * 2f64.sqrt(), "{}", d.ratio);
    // Independent ions deplete |00> at the single-ion frequency.
    assert!((b.ratio - 1.0).abs() < 0.05, "{}", b.ratio);
    assert!(b.rr_at_first_single_maximum > c.rr_at_first_single_maximum);
    assert!(c.rr_at_first_single_maximum > d.rr_at_first_single_maximum);
}

