use std::path::{Path, PathBuf};

use thiserror::Error;

/// Failures of a subcommand, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or unparsable input; exit code 2.
    #[error("{}: {reason}", path.display())]
    Input { path: PathBuf, reason: String },
    /// Inputs parsed but violate an invariant; exit code 3.
    #[error("{0}")]
    Invariant(String),
}

impl CliError {
    pub fn input(path: &Path, reason: impl ToString) -> Self {
        CliError::Input {
            path: path.to_path_buf(),
            reason: reason.to_string(),
        }
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        CliError::Invariant(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input { .. } => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
