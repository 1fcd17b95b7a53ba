use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid density state: {0}")]
    InvalidState(String),

    #[error("dressing undefined: microwave Rabi frequency and detuning are both zero")]
    DressingUndefined,

    #[error("detuning required: intermediate-state detuning must be positive")]
    DetuningRequired,

    #[error("STIRAP fields undefined: both Rabi frequencies are zero")]
    StirapUndefined,

    #[error("integrator failed at t = {t}: {reason} (worst local error estimate {error_estimate:e})")]
    Integrator {
        t: f64,
        reason: String,
        error_estimate: f64,
    },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("unknown error source `{0}`")]
    UnknownSource(String),
}

impl Error {
    /// True for errors that originate in numerical routines rather than
    /// invalid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Integrator { .. } | Error::NoConvergence { .. } | Error::Fit(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
