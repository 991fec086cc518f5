use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value is missing, malformed or physically impossible.
    #[error("invalid value for `{field}`: {reason}")]
    Config { field: String, reason: String },

    /// A mathematical precondition was violated (non-positive distance, empty chain, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate geometry: endpoints coincide")]
    DegenerateGeometry,

    #[error("target direction is behind the panel")]
    OutOfCoverage,

    #[error("scheduling error: {0}")]
    Scheduling(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

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
}

impl Error {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
