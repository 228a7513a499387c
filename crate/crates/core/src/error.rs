use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Fewer than two samples: pairwise disagreement is undefined.
    #[error("insufficient samples: need at least 2 candidates, got {0}")]
    InsufficientSamples(usize),

    #[error("empty record list")]
    EmptyRecords,

    #[error("invalid retention fraction {0}: must lie in [0, 1)")]
    InvalidFraction(f64),

    #[error("undefined baseline: corpus mean of {0} is zero")]
    UndefinedBaseline(&'static str),

    #[error("record `{0}` has no deterministic scores")]
    MissingDeterministic(String),

    #[error("{path}:{line}: {message}")]
    Validation {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures caused by bad input data rather than the environment.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io { .. }) && !matches!(self, Error::Csv(e) if e.is_io_error())
    }
}
