use rydgate::lindblad::rabi_experiment;
use rydgate::units::to_mhz;
use serde::Serialize;

use super::Run;
use crate::config::RabiConfig;
use crate::error::{CliResult, Context};
use crate::output::Cell::{Num, Text};

#[derive(Serialize)]
struct PanelSummary {
    label: String,
    interaction_mhz: f64,
    expected_single_mhz: f64,
    single_frequency_mhz: f64,
    collective_frequency_mhz: f64,
    ratio: f64,
    first_single_maximum_ns: f64,
    rr_at_first_single_maximum: f64,
    /// `rr_at_first_single_maximum` relative to the first panel.
    suppression: f64,
}

#[derive(Serialize)]
struct RabiReport {
    seed: u64,
    panels: Vec<PanelSummary>,
}

pub fn run(cfg: &RabiConfig, run: &mut Run) -> CliResult<()> {
    let opts = run.config.solver.options();
    let mut summaries: Vec<PanelSummary> = Vec::new();
    let mut rows = Vec::new();
    for (i, pc) in cfg.panels.iter().enumerate() {
        let panel = pc.panel(i)?;
        if summaries.iter().any(|s| s.label == panel.label) {
            return Err(crate::error::CliError::Config(format!("duplicate rabi panel label `{}`", panel.label)));
        }
        log::info!("rabi panel {}", panel.label);
        let c = rabi_experiment(&panel, &opts).context(&format!("rabi panel {}", panel.label))?;
        let reference = summaries.first().map_or(c.rr_at_first_single_maximum, |s| s.rr_at_first_single_maximum);
        run.sink.csv(
            &format!("rabi_{}", c.label),
            &["t_ns", "p_single", "p_rr", "p_symmetric"],
            (0..c.times.len()).map(|k| vec![Num(c.times[k] * 1e3), Num(c.p_single[k]), Num(c.p_rr[k]), Num(c.p_symmetric[k])]),
        )?;
        rows.push((c.label.clone(), c.ratio, c.rr_at_first_single_maximum));
        summaries.push(PanelSummary {
            label: c.label.clone(),
            interaction_mhz: to_mhz(c.interaction),
            expected_single_mhz: to_mhz(c.omega_uv),
            single_frequency_mhz: to_mhz(c.single_frequency),
            collective_frequency_mhz: to_mhz(c.collective_frequency),
            ratio: c.ratio,
            first_single_maximum_ns: c.first_single_maximum * 1e3,
            rr_at_first_single_maximum: c.rr_at_first_single_maximum,
            suppression: if reference > 0.0 { c.rr_at_first_single_maximum / reference } else { f64::NAN },
        });
    }
    run.sink.csv(
        "rabi_summary",
        &["panel", "ratio", "p_rr_at_first_single_maximum"],
        rows.iter().map(|(l, r, p)| vec![Text(l), Num(*r), Num(*p)]),
    )?;
    for s in &mut summaries {
        if !s.suppression.is_finite() {
            s.suppression = 0.0;
        }
    }
    run.sink.json("rabi_report", &RabiReport { seed: run.seed, panels: summaries })
}
