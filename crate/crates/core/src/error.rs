use thiserror::Error;

/// Errors produced by the estimators and their supporting kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no samples: the estimator needs at least one observation")]
    EmptyData,

    #[error("alphabet size {alphabet} is smaller than the {observed} distinct symbols observed")]
    InconsistentAlphabet { alphabet: u64, observed: u64 },

    /// Too few repeated observations for the estimate to be finite.
    #[error(
        "insufficient coincidences: found {found} repeated observations (N - K), need at least {required}"
    )]
    NoCoincidences { found: u64, required: u64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("tail truncation failed: stick cap of {cap} exceeded with remaining mass {remaining:e}")]
    TailTruncation { cap: usize, remaining: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
