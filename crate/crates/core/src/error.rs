use thiserror::Error;

/// Errors raised by the walk, exact, dynamics and experiment layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("bit value {0} is not a sign (expected -1 or +1)")]
    InvalidSign(i64),

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("operation requires a {expected} walk")]
    WrongWalkKind { expected: &'static str },

    #[error("enumeration budget exceeded: n = {n} > {max}")]
    BudgetExceeded { n: usize, max: usize },

    #[error("time {t} lies outside the clock horizon [0, {horizon}]")]
    TimeOutOfHorizon { t: f64, horizon: f64 },

    #[error("horizon {horizon} is shorter than the unit window")]
    HorizonTooShort { horizon: f64 },

    #[error("coupling has {found} changes, {needed} required")]
    InsufficientChanges { needed: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
