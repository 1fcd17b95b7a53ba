pub mod bbr;
pub mod budget;
pub mod gate;
pub mod phonons;
pub mod rabi;

use crate::config::RunConfig;
use crate::output::Sink;

/// Resolved settings shared by every subcommand.
pub struct Run {
    pub config: RunConfig,
    pub seed: u64,
    pub sink: Sink,
}
