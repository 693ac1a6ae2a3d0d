use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AppError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("invalid configuration: {0}")]
    Invalid(String),

    /// A computation stage failed; carries the stage name.
    #[error("{stage} failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: elsim_core::Error,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{}: malformed snapshot: {msg}", path.display())]
    Snapshot { path: PathBuf, msg: String },
}

impl AppError {
    /// 2 for usage, configuration and file errors; 3 when a computation
    /// stage aborts.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Stage { .. } => 3,
            _ => 2,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> AppError {
        let path = path.into();
        move |source| AppError::Io { path, source }
    }
}

/// Tags a core error with the stage it came from.
pub(crate) fn stage(name: &'static str) -> impl Fn(elsim_core::Error) -> AppError {
    move |source| AppError::Stage { stage: name, source }
}
