use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed or invalid input record. `line` is 1-based and counts the header.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{0} is undefined for this input")]
    Undefined(&'static str),

    #[error("rank-deficient design: column(s) {} are collinear with earlier columns", .columns.join(", "))]
    RankDeficient { columns: Vec<String> },

    #[error("item {item} has a constant response column; its difficulty is not estimable")]
    ConstantItem { item: String },

    #[error("unknown item {0}")]
    UnknownItem(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidInput(message.into())
    }
}
