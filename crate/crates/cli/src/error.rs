use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    /// JSON syntax or schema failure, with the offending field path.
    #[error("{path}:{line}:{column}: at `{field}`: {message}")]
    Parse { path: PathBuf, line: usize, column: usize, field: String, message: String },

    #[error("{0}")]
    Invalid(String),

    #[error(transparent)]
    Core(#[from] hidvar_core::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;
