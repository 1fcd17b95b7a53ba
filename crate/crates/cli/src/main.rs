mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Run;
use config::{Format, RunConfig};
use error::CliResult;
use output::Sink;

/// Simulation data and reports for Rydberg-ion entangling gates.
#[derive(Parser)]
#[command(name = "rydgate", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rabi oscillations of one and two ions with tunable interaction.
    Rabi(Common),
    /// Double-STIRAP phase gate: trajectory, parity and Ramsey scans.
    Gate(Common),
    /// Normal modes and motional dephasing of an ion crystal.
    Phonons(Common),
    /// Black-body photoionisation rates of Rydberg ions.
    Bbr(Common),
    /// Error budget of a gate scenario.
    Budget(Common),
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory [default: the config's out_dir, else ./out].
    #[arg(long, value_name = "DIR", env = "RYDGATE_OUT")]
    out: Option<PathBuf>,
    /// RNG seed [default: the config's seed, else 0].
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Which files to write [default: the config's format, else both].
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn setup(common: &Common) -> CliResult<Run> {
    let config = RunConfig::load(&common.config)?;
    let dir = common.out.clone().or_else(|| config.out_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let format = common.format.or(config.format).unwrap_or_default();
    let seed = common.seed.or(config.seed).unwrap_or(0);
    Ok(Run { sink: Sink::new(&dir, format)?, seed, config })
}

fn execute(cli: &Cli) -> CliResult<Vec<PathBuf>> {
    let common = match &cli.command {
        Command::Rabi(c) | Command::Gate(c) | Command::Phonons(c) | Command::Bbr(c) | Command::Budget(c) => c,
    };
    let mut run = setup(common)?;
    let cfg = run.config.clone();
    match &cli.command {
        Command::Rabi(_) => commands::rabi::run(cfg.section(&cfg.rabi, "rabi")?, &mut run)?,
        Command::Gate(_) => commands::gate::run(cfg.section(&cfg.gate, "gate")?, &mut run)?,
        Command::Phonons(_) => commands::phonons::run(cfg.section(&cfg.phonons, "phonons")?, &mut run)?,
        Command::Bbr(_) => commands::bbr::run(cfg.section(&cfg.bbr, "bbr")?, &mut run)?,
        Command::Budget(_) => commands::budget::run(cfg.section(&cfg.budget, "budget")?, &mut run)?,
    }
    Ok(run.sink.written)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
