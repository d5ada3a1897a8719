use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node {node} is outside the valid range 0..={max}")]
    NodeOutOfRange { node: u64, max: u64 },

    #[error("invalid control parameter: {0}")]
    ControlParameter(String),

    #[error("invalid precision: {0}")]
    Precision(String),

    #[error("cannot parse mu spec {spec:?}: {reason}")]
    MuSpec { spec: String, reason: String },

    #[error("iteration count must be at least 1, got {0}")]
    IterationCount(u32),

    #[error("malformed {format} input: {reason}")]
    Format {
        format: &'static str,
        reason: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(format: &'static str, reason: impl Into<String>) -> Self {
        Error::Format {
            format,
            reason: reason.into(),
        }
    }
}
