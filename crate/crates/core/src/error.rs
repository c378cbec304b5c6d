use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input text; `offset` is a byte offset into the parsed string.
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    /// Evaluation outside the domain of a function (pole at t = 0, division by zero, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The input is structurally invalid (inhomogeneous sections, degree too small, ...).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A family or map whose resultant vanishes.
    #[error("degenerate map: {0}")]
    Degenerate(String),

    /// Truncated series ran out of precision before the requested quantity was determined.
    #[error("precision exhausted: {0}")]
    Precision(String),

    /// Root finding, sampling or other numerical routine failed.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(offset: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            message: message.into(),
        }
    }
}
