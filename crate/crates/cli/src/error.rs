use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) | CliError::Output(_) => 3,
            CliError::Invariant(_) => 4,
        }
    }

    /// Solver-stage error, keeping invariant violations distinct.
    pub fn solver(context: &str, e: sqdyn::Error) -> CliError {
        match e {
            sqdyn::Error::InvariantViolation(msg) => CliError::Invariant(format!("{context}: {msg}")),
            other => CliError::Solver(format!("{context}: {other}")),
        }
    }

    /// Model-construction error; these come from the configuration.
    pub fn model(context: &str, e: sqdyn::Error) -> CliError {
        CliError::Config(format!("{context}: {e}"))
    }
}
