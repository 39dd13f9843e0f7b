use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("{what} = {value} exceeds the hard limit of {limit}")]
    LimitExceeded {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integer overflow computing {0}")]
    Overflow(&'static str),

    #[error("insufficient data: {needed} samples required for {terms} monomials, got {got}")]
    Underdetermined {
        needed: usize,
        terms: usize,
        got: usize,
    },

    #[error("rank-deficient design matrix: rank {rank} of {columns} columns (condition estimate {condition:.3e})")]
    RankDeficient {
        rank: usize,
        columns: usize,
        condition: f64,
    },

    #[error("degenerate scaling: {0}")]
    DegenerateScaling(String),

    #[error("training diverged: non-finite loss at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("malformed {kind} file {path}: {message}")]
    Parse {
        kind: &'static str,
        path: PathBuf,
        message: String,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// True for errors caused by bad user input rather than a failure while computing.
    pub fn is_validation(&self) -> bool {
        if let Error::Context { source, .. } = self {
            return source.is_validation();
        }
        matches!(
            self,
            Error::DimensionMismatch { .. }
                | Error::LimitExceeded { .. }
                | Error::InvalidArgument(_)
                | Error::Parse { .. }
                | Error::Underdetermined { .. }
                | Error::DegenerateScaling(_)
        )
    }
}
