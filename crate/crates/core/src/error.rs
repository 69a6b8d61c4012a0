use thiserror::Error;

/// Errors produced by the library.
///
/// The variants map one-to-one onto the CLI exit classes: parse and
/// validation problems are input errors, capacity errors mean the instance is
/// too large for the configured limits, and non-convergence carries the best
/// estimate the iterative method reached.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("capacity exceeded: {what} is {actual}, limit {limit}")]
    Capacity {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error("no convergence after {iterations} iterations (best estimate {estimate}, residual {residual:e})")]
    NonConvergence {
        iterations: usize,
        estimate: f64,
        residual: f64,
    },
}

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::Validation(message.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
