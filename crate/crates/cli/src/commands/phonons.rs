use rydgate::phonon::{coherence_exponent, coupling_constants, normal_modes, ring_dispersion, CrystalKind, DispersionForm};
use rydgate::units::to_mhz;
use serde::Serialize;

use super::Run;
use crate::config::PhononConfig;
use crate::error::{CliError, CliResult, Context};
use crate::output::Cell::{Int, Num};

#[derive(Serialize)]
struct TemperatureSummary {
    temperature_uk: f64,
    g_max: f64,
    /// `1 − exp(−G(τ_g))`, when a gate-time convention is configured.
    gate_error: Option<f64>,
    /// `|φ(τ_g)|` (rad).
    gate_phase_error: Option<f64>,
}

#[derive(Serialize)]
struct GMaxRow {
    n_ions: usize,
    temperature_uk: f64,
    g_max: f64,
}

#[derive(Serialize)]
struct PhononReport {
    n_ions: usize,
    pair: (usize, usize),
    separation_um: f64,
    trap_frequency_mhz: f64,
    w_mhz: f64,
    gate_time_ns: Option<f64>,
    temperatures: Vec<TemperatureSummary>,
    g_max_vs_n: Vec<GMaxRow>,
}

pub fn run(cfg: &PhononConfig, run: &mut Run) -> CliResult<()> {
    cfg.validate()?;
    let n = cfg.crystal.n_ions();
    let crystal = cfg.crystal.build(n)?;
    let pair = cfg.pair(n);
    let modes = normal_modes(&crystal).context("normal modes")?;
    if pair.0 >= n || pair.1 >= n || pair.0 == pair.1 {
        return Err(CliError::Config(format!("invalid ion pair {pair:?} for {n} ions")));
    }
    let separation = (modes.positions_um[pair.1] - modes.positions_um[pair.0]).abs();
    let w = cfg.w_at(separation);
    let g = coupling_constants(&modes, pair.0, pair.1, cfg.interaction()).context("coupling constants")?;

    run.sink.csv(
        "phonon_modes",
        &["mode", "frequency_mhz", "zero_point_length_nm", "coupling"],
        (0..n).map(|p| vec![Int(p as u64), Num(to_mhz(modes.frequencies[p])), Num(modes.mode_lengths_nm[p]), Num(g[p])]),
    )?;
    if matches!(crystal.kind, CrystalKind::EqualSpaced { .. }) {
        // Lattice dispersion at q = 2πj/(Na), in both sign conventions.
        let mut rows = Vec::with_capacity(n);
        for j in 0..n {
            let printed = ring_dispersion(j, &crystal, DispersionForm::Printed).context("ring dispersion")?;
            let hessian = ring_dispersion(j, &crystal, DispersionForm::Hessian).context("ring dispersion")?;
            rows.push(vec![Int(j as u64), Num(to_mhz(printed)), Num(to_mhz(hessian))]);
        }
        run.sink.csv("phonon_dispersion", &["q_index", "printed_mhz", "hessian_mhz"], rows)?;
    }
    run.sink.csv(
        "phonon_positions",
        &["ion", "position_um"],
        modes.positions_um.iter().enumerate().map(|(i, &x)| vec![Int(i as u64), Num(x)]),
    )?;

    let times: Vec<f64> = (0..cfg.points).map(|i| cfg.t_max_us * i as f64 / (cfg.points - 1) as f64).collect();
    let gate_time = cfg.gate_time.map(|c| c.duration(w)).transpose().context("gate time")?;
    let mut curve = Vec::new();
    let mut temperatures = Vec::new();
    for &t_uk in &cfg.temperatures_uk {
        let r = coherence_exponent(&g, &modes, t_uk, &times, w, pair).context("coherence exponent")?;
        for (i, &t) in times.iter().enumerate() {
            curve.push(vec![
                Num(t_uk),
                Num(t * 1e3),
                Num(r.exponent[i]),
                Num(r.coherence(i)),
                Num(r.total_phase[i]),
                Num(r.oscillatory_phase[i]),
            ]);
        }
        let (gate_error, gate_phase_error) = match gate_time {
            Some(tg) => {
                let at = coherence_exponent(&g, &modes, t_uk, &[tg], w, pair).context("gate-time exponent")?;
                (Some(1.0 - (-at.exponent[0]).exp()), Some(at.oscillatory_phase[0].abs()))
            }
            None => (None, None),
        };
        temperatures.push(TemperatureSummary { temperature_uk: t_uk, g_max: r.g_max, gate_error, gate_phase_error });
    }
    run.sink.csv(
        "phonon_exponent",
        &["temperature_uk", "t_ns", "exponent_g", "coherence", "total_phase_rad", "oscillatory_phase_rad"],
        curve,
    )?;

    let mut g_max_vs_n = Vec::new();
    for &m in &cfg.g_max_n_ions {
        let c = cfg.crystal.build(m)?;
        let modes = normal_modes(&c).context("normal modes")?;
        let pair = rydgate::phonon::IonCrystal::<f64>::central_pair(m);
        let g = coupling_constants(&modes, pair.0, pair.1, cfg.interaction()).context("coupling constants")?;
        for &t_uk in &cfg.temperatures_uk {
            let r = coherence_exponent(&g, &modes, t_uk, &[], w, pair).context("coherence exponent")?;
            g_max_vs_n.push(GMaxRow { n_ions: m, temperature_uk: t_uk, g_max: r.g_max });
        }
    }
    if !g_max_vs_n.is_empty() {
        run.sink.csv(
            "phonon_g_max",
            &["n_ions", "temperature_uk", "g_max"],
            g_max_vs_n.iter().map(|r| vec![Int(r.n_ions as u64), Num(r.temperature_uk), Num(r.g_max)]),
        )?;
    }
    run.sink.json(
        "phonon_report",
        &PhononReport {
            n_ions: n,
            pair,
            separation_um: separation,
            trap_frequency_mhz: to_mhz(crystal.trap_frequency),
            w_mhz: to_mhz(w),
            gate_time_ns: gate_time.map(|t| t * 1e3),
            temperatures,
            g_max_vs_n,
        },
    )
}
