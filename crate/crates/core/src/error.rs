use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The prediction already equals the target, or the supplied error mask is empty.
    #[error("no error region")]
    NoErrorRegion,

    #[error("degenerate clickability map: {0}")]
    DegenerateMap(String),

    #[error("insufficient sample: need at least {needed} points, got {got}")]
    InsufficientSample { needed: usize, got: usize },

    #[error("format error in {location}: {message}")]
    Format { location: String, message: String },

    #[error("segmenter adapter error: {0}")]
    Adapter(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn format(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Format {
            location: location.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
