use std::process::ExitCode;

use dirac_hardy_core::solver::SolverError;
use dirac_hardy_core::Error;
use thiserror::Error as ThisError;

/// Failure classes, one per exit code.
#[derive(Debug, ThisError)]
pub enum CliError {
    /// A checked property does not hold (exit 1).
    #[error("assertion failed: {0}")]
    Assertion(String),
    /// Bad input, bad grid or an unsupported request (exit 2).
    #[error("configuration error: {0}")]
    Config(String),
    /// NaN/Inf or another breakdown of the numerics (exit 3).
    #[error("numerical breakdown: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Assertion(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        })
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Divergent { .. } => CliError::Assertion(msg),
            Error::Solver(SolverError::NonFinite { .. }) => CliError::Numerical(msg),
            Error::Solver(_) => CliError::Assertion(msg),
            Error::Numerical(_) => CliError::Numerical(msg),
            _ => CliError::Config(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(format!("json: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
