//! Batch front end for `vpatch`: scenario documents, drivers and writers.

pub mod commands;
pub mod output;
pub mod scenario;

use std::process::ExitCode;

pub use scenario::Scenario;

/// Failures that end a command, each with its own exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("solver did not converge: {0}")]
    NotConverged(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::NotConverged(_) => 4,
        }
    }
}

/// How a command that ran to completion ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// A residual check exceeded its tolerance.
    Failed,
}

pub fn exit_code(r: &Result<Status, CliError>) -> ExitCode {
    match r {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(1),
        Err(e) => ExitCode::from(e.exit_code()),
    }
}

/// Library errors that stem from the input rather than the numerics.
pub(crate) fn classify(e: vpatch::Error) -> CliError {
    use vpatch::Error::*;
    match e {
        BranchCut { .. } | Degenerate(_) | IntegrationAborted { .. } => CliError::Numerical(e.to_string()),
        _ => CliError::Input(e.to_string()),
    }
}
