use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the library.
///
/// `Input` covers violated preconditions (bad dimensions, levels, empty data).
/// `Format` covers malformed files. The CLI maps these onto distinct exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("format error in {}{}: {message}", path.display(), line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Format {
        path: PathBuf,
        line: Option<u64>,
        message: String,
    },

    #[error("format error at byte {offset}: {message}")]
    Binary { offset: u64, message: String },

    #[error("io error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn format(path: impl Into<PathBuf>, line: Option<u64>, msg: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            line,
            message: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Whether the error stems from a malformed file rather than a bad request.
    pub fn is_format(&self) -> bool {
        matches!(self, Error::Format { .. } | Error::Binary { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
