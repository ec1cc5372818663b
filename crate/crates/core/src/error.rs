use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A scalar argument lies outside its admissible domain.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// Matrix or vector dimensions disagree.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// The data violates a precondition (single class, empty sample, ...).
    #[error("invalid input: {0}")]
    Input(String),

    /// A PLS component has zero covariance with the labels.
    #[error("degenerate direction at component {component}: zero covariance with the labels")]
    DegenerateDirection { component: usize },

    /// Exhaustive enumeration requested beyond its size limit.
    #[error("size limit exceeded: {0}")]
    Size(String),

    /// Malformed file content, with location when known.
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::param(
            "delta",
            format!("must lie in (0, 1), got {delta}"),
        ))
    }
}
