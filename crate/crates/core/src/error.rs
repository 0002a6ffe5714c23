use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the capacity library and the `mimocap` front end.
#[derive(Debug, Error)]
pub enum Error {
    /// An input value is outside its domain. `field` names the offending
    /// parameter so CLI users can find it.
    #[error("invalid {field}: {reason}")]
    Validation { field: String, reason: String },

    #[error("model {model} is not defined for a {n_tx}x{n_rx} link: {reason}")]
    ModelMismatch {
        model: String,
        n_tx: u32,
        n_rx: u32,
        reason: String,
    },

    /// A sweep series failed; wraps the underlying error with the series
    /// position and name.
    #[error("series #{index} ({name}): {source}")]
    Series {
        index: usize,
        name: String,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown preset {name:?} (valid presets: {valid})")]
    UnknownPreset { name: String, valid: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for filesystem failures, as opposed to bad input.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io { .. } => true,
            Error::Series { source, .. } => source.is_io(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
