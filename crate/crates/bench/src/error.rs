use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, BenchError>;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Core(#[from] noisyfix::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
}

impl BenchError {
    /// Machine-readable category printed by the CLI on failure.
    pub fn category(&self) -> &'static str {
        match self {
            BenchError::Core(e) => e.category(),
            BenchError::Io { .. } | BenchError::Csv { .. } => "io",
            BenchError::Config { .. } => "config",
        }
    }
}
