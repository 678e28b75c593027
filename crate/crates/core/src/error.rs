use thiserror::Error;

use crate::rational::Rational;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid piecewise-linear map: {0}")]
    InvalidMap(String),

    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("invalid nowhere-dense set: {0}")]
    InvalidSet(String),

    #[error("squeeze targets are not order-consistent: {0}")]
    InconsistentTargets(String),

    #[error("blocked interval meets the closure of the fixed set at {witness}")]
    BlockedMeetsFixed { witness: Rational },

    #[error("out of scope: {0}")]
    OutOfScope(String),

    #[error("tau-consistency fails at index {index}: {detail}")]
    TauInconsistent { index: usize, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
