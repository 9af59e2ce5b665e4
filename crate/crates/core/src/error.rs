use std::path::PathBuf;

use thiserror::Error;

use crate::id::IdError;

/// Failures that prevent an operation from producing any result. Problems
/// with model content are reported through
/// [`ValidationReport`](crate::schema::ValidationReport) instead.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid document at {pointer}: {message}")]
    Document { pointer: String, message: String },
    #[error(transparent)]
    Id(#[from] IdError),
    #[error("workbook: {0}")]
    Workbook(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("cannot fetch {url}: {message}")]
    Fetch { url: String, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn document(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Document {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
