use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(#[from] workint::Error),
    #[error("output error: {0}")]
    Output(String),
    #[error("{failed} of {total} checks failed")]
    Verification { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Verification { .. } => 1,
            CliError::Config(_) | CliError::Output(_) => 2,
            CliError::Numeric(_) => 3,
        })
    }
}
