use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),

    #[error("{0}")]
    Model(#[from] multigrowth::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
}

impl CliError {
    /// Process exit code: 2 for bad input, 1 for I/O trouble.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Invalid(_) | Self::Model(_) => 2,
            Self::Io { .. } | Self::Csv { .. } | Self::Json { .. } => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
