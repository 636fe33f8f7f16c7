use std::path::PathBuf;

use thiserror::Error;

/// Failures of a command, each tied to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("bad file format: {0}")]
    Format(String),

    #[error(transparent)]
    Core(#[from] bearlion_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 usage, 3 format, 4 dimension or cap, 5 verification, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Format(_) | CliError::Core(bearlion_core::Error::Parse(_)) => 3,
            CliError::Core(_) => 4,
            CliError::Io { .. } => 1,
            CliError::Verification(_) => 5,
        }
    }
}
