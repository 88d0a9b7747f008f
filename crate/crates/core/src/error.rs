use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("quadrature did not converge on [{a}, {b}] (estimate {estimate}, error {error})")]
    NoConvergence {
        a: f64,
        b: f64,
        estimate: f64,
        error: f64,
    },

    #[error("posterior is degenerate: {0}")]
    DegeneratePosterior(String),

    #[error("optimizer did not converge: {0}")]
    Optimizer(String),

    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }
}
