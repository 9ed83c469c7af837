//! Shared error type for the toolkit.
//!
//! Three broad families matter to callers: bad arguments to library calls,
//! malformed or inconsistent input files (always with enough context to find
//! the offending line or segment), and plain I/O trouble.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A function was called with values outside its contract.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A text input could not be parsed. `line` is 1-based; 0 means the
    /// problem is not tied to a single line.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    /// Structural validation failed. Each entry names one violation.
    #[error("validation failed:\n{}", .0.iter().map(|v| format!("  - {v}")).collect::<Vec<_>>().join("\n"))]
    Validation(Vec<String>),

    /// A configuration file or option was rejected.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
