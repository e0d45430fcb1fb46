use std::path::PathBuf;

use thiserror::Error;

pub const EXIT_POSITIVE: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;
pub const EXIT_NEGATIVE: i32 = 10;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] charp_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed scan record: {source}")]
    Record {
        path: PathBuf,
        line: usize,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("write failed: {0}")]
    Write(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(charp_core::Error::UnsupportedRange(_)) => EXIT_UNSUPPORTED,
            _ => EXIT_USAGE,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
