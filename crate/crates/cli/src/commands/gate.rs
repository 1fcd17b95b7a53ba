use rydgate::gate::{conditional_phase_scan, parity_oscillation, run_gate, uniform_phases, GateScenario};
use rydgate::lindblad::StokesSign;
use rydgate::units::to_mhz;
use serde::Serialize;

use super::Run;
use crate::config::GateConfig;
use crate::error::{CliResult, Context};
use crate::output::Cell::Num;

#[derive(Serialize)]
struct GateReport {
    scenario: GateScenario,
    seed: u64,
    shots: usize,
    stokes: StokesSign,
    duration_ns: f64,
    interaction_mhz: f64,
    /// `V∫ρ_rr dt` normalised so that an ideal gate gives π.
    controlled_phase_rad: f64,
    /// Ramsey conditional-phase difference, folded into `[0, π]`.
    phase_difference_rad: f64,
    ramsey_contrast: f64,
    population: f64,
    coherence: f64,
    fidelity: f64,
}

pub fn run(cfg: &GateConfig, run: &mut Run) -> CliResult<()> {
    let params = cfg.params()?;
    let noise = cfg.noise(run.seed)?;
    let opts = run.config.solver.options();
    log::info!("gate: {} scenario, {} shots", cfg.scenario.label(), noise.shots);
    let g = run_gate(&params, &noise, &opts).context("gate run")?;
    let phases = uniform_phases::<f64>(cfg.analyzer_phases);
    let parity = parity_oscillation(&g.final_state, g.stokes, &phases).context("parity analysis")?;
    let ramsey = conditional_phase_scan(&g.final_state, &phases).context("Ramsey analysis")?;
    let schedule = params.schedule().context("pulse schedule")?;

    run.sink.csv(
        "gate_trajectory",
        &["t_ns", "omega1_mhz", "omega2_mhz", "rho_rr"],
        g.times.iter().zip(&g.rr_population).map(|(&t, &p)| {
            vec![Num(t * 1e3), Num(to_mhz(schedule.omega1(t))), Num(to_mhz(schedule.omega2(t))), Num(p)]
        }),
    )?;
    run.sink.csv(
        "gate_parity",
        &["theta_rad", "parity"],
        parity.phases.iter().zip(&parity.parity).map(|(&t, &p)| vec![Num(t), Num(p)]),
    )?;
    run.sink.csv(
        "gate_ramsey",
        &["theta_rad", "p1_given_0", "p1_given_1"],
        (0..ramsey.phases.len()).map(|i| vec![Num(ramsey.phases[i]), Num(ramsey.given_0[i]), Num(ramsey.given_1[i])]),
    )?;
    run.sink.json(
        "gate_report",
        &GateReport {
            scenario: cfg.scenario,
            seed: run.seed,
            shots: g.shots,
            stokes: g.stokes,
            duration_ns: g.duration * 1e3,
            interaction_mhz: to_mhz(g.interaction),
            controlled_phase_rad: g.controlled_phase,
            phase_difference_rad: ramsey.difference,
            ramsey_contrast: ramsey.contrast,
            population: parity.population,
            coherence: parity.coherence,
            fidelity: parity.fidelity,
        },
    )
}
