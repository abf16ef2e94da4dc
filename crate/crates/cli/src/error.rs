use std::path::PathBuf;

use spindiff_core::Error as CoreError;
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INPUT: i32 = 2;
    pub const NUMERICAL: i32 = 3;
    pub const NOT_IDENTIFIABLE: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("data file {path}: {message}")]
    Data { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Data { .. } | CliError::Io { .. } => exit::INPUT,
            CliError::Core(e) => match e {
                CoreError::NumericalBlowup { .. } | CoreError::FitDiverged(_) => exit::NUMERICAL,
                CoreError::NotIdentifiable(_) => exit::NOT_IDENTIFIABLE,
                _ => exit::INPUT,
            },
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
