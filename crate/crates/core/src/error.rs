use thiserror::Error;

use crate::expr::{EvalError, ParseError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    /// An exponent grew past the log-overflow threshold; the quantity is not
    /// representable and the caller should treat the result as inconclusive.
    #[error("exponent overflow at t = {t}")]
    Overflow { t: f64 },
    #[error("integration stopped at t = {t}: {reason}")]
    Integration { t: f64, reason: String },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
