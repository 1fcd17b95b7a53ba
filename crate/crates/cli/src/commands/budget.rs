use rydgate::budget::{budget_report, scenario_inputs, ErrorBudget, Method};
use serde::Serialize;

use super::Run;
use crate::config::BudgetConfig;
use crate::error::{CliError, CliResult, Context};
use crate::output::Cell::{Num, Text};

#[derive(Serialize)]
struct BudgetReport<'a> {
    seed: u64,
    shots: usize,
    #[serde(flatten)]
    budget: &'a ErrorBudget<f64>,
}

pub fn run(cfg: &BudgetConfig, run: &mut Run) -> CliResult<()> {
    if cfg.shots == 0 {
        return Err(CliError::Config("budget.shots must be >= 1".into()));
    }
    let inputs = scenario_inputs::<f64>(cfg.scenario, cfg.shots, run.seed).context("budget inputs")?;
    let b = budget_report(&inputs, &run.config.solver.options()).context("error budget")?;
    run.sink.csv(
        "budget",
        &["source", "method", "infidelity"],
        b.entries.iter().map(|e| {
            let method = match e.method {
                Method::Simulated => "simulated",
                Method::AnalyticScaling => "analytic_scaling",
            };
            vec![Text(e.source.label()), Text(method), Num(e.contribution)]
        }),
    )?;
    run.sink.json("budget_report", &BudgetReport { seed: run.seed, shots: inputs.noise.shots, budget: &b })
}
