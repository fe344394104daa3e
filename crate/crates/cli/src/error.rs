use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments, configuration or input data.
    #[error("{0}")]
    Validation(String),

    #[error(transparent)]
    Core(#[from] hbt_core::Error),

    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Core(e) if e.is_validation() => 1,
            CliError::Core(_) | CliError::Write { .. } => 2,
        }
    }

    pub fn input(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Validation(format!("cannot read {}: {err}", path.display()))
    }
}

pub type CliResult<T> = Result<T, CliError>;
