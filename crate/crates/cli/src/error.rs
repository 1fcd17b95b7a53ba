use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Model {
        context: String,
        #[source]
        source: rydgate::Error,
    },

    #[error("{context}: {message}")]
    Output { context: String, message: String },
}

impl CliError {
    /// 2 for bad input, 3 for numerical failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Model { source, .. } if source.is_numerical() => 3,
            CliError::Model { .. } => 2,
            CliError::Output { .. } => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub trait Context<T> {
    fn context(self, context: &str) -> CliResult<T>;
}

impl<T> Context<T> for rydgate::Result<T> {
    fn context(self, context: &str) -> CliResult<T> {
        self.map_err(|source| CliError::Model { context: context.to_string(), source })
    }
}
