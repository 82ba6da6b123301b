use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("spin vectors must have positive odd length, got {0}")]
    InvalidLength(usize),

    #[error("invalid spin value {0}, expected +1 or -1")]
    InvalidSpin(i64),

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("N = {n} exceeds the enumeration limit of {limit}")]
    Capacity { n: usize, limit: usize },

    #[error("version space became empty: labels are inconsistent with every member")]
    EmptyVersionSpace,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Output { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input rather than I/O.
    pub fn is_usage(&self) -> bool {
        !matches!(self, Error::Io { .. } | Error::Output { .. })
    }
}
