use rydgate::bbr::{n_sweep, temperature_sweep};
use serde::Serialize;

use super::Run;
use crate::config::BbrConfig;
use crate::error::{CliResult, Context};
use crate::output::Cell::{Int, Num};

#[derive(Serialize)]
struct Peak {
    temperature_k: f64,
    peak_n: u32,
    peak_rate_per_s: f64,
    /// The maximum lies strictly inside `[n_min, n_max]`.
    interior: bool,
}

#[derive(Serialize)]
struct BbrReport {
    l: u32,
    n_min: u32,
    n_max: u32,
    peaks: Vec<Peak>,
}

pub fn run(cfg: &BbrConfig, run: &mut Run) -> CliResult<()> {
    cfg.validate()?;
    let ns: Vec<u32> = (cfg.n_min..=cfg.n_max).collect();
    let mut rows = Vec::new();
    let mut peaks = Vec::new();
    for &t in &cfg.temperatures_k {
        let rates = n_sweep(&ns, cfg.l, t).context("n sweep")?;
        let (i, &best) = rates.iter().enumerate().fold((0, &rates[0]), |a, b| if b.1 > a.1 { b } else { a });
        peaks.push(Peak { temperature_k: t, peak_n: ns[i], peak_rate_per_s: best, interior: i > 0 && i + 1 < ns.len() });
        rows.extend(ns.iter().zip(&rates).map(|(&n, &r)| vec![Num(t), Int(n.into()), Num(r)]));
    }
    run.sink.csv("bbr_n_sweep", &["temperature_k", "n", "rate_per_s"], rows)?;

    if let Some(s) = &cfg.temperature_sweep {
        let ts: Vec<f64> = (0..s.points).map(|i| s.t_min_k + (s.t_max_k - s.t_min_k) * i as f64 / (s.points - 1) as f64).collect();
        let rates = temperature_sweep(s.n, s.l, &ts).context("temperature sweep")?;
        run.sink.csv(
            "bbr_temperature_sweep",
            &["temperature_k", "rate_per_s"],
            ts.iter().zip(&rates).map(|(&t, &r)| vec![Num(t), Num(r)]),
        )?;
    }
    run.sink.json("bbr_report", &BbrReport { l: cfg.l, n_min: cfg.n_min, n_max: cfg.n_max, peaks })
}
