use thiserror::Error;

/// Errors produced by chain access, oracles and estimators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("state {state} has not been visited yet")]
    LocalityViolation { state: usize },

    #[error("state {state} out of range for a chain with {n} states")]
    InvalidState { state: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("chain is not ergodic: {0}")]
    NotErgodic(String),

    #[error("chain did not mix within {t_max} steps (d({t_max}) = {d})")]
    NotMixedWithin { t_max: usize, d: f64 },

    #[error("chain has {n} states, exact oracle is limited to {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("sample cap of {cap} draws exceeded")]
    SampleCapExceeded { cap: u64 },

    #[error("element {element} reported gamma {seen} after earlier {first}")]
    InconsistentGamma { element: u64, first: f64, seen: f64 },

    #[error("back-probability from {from} to {to} is zero; chain is corrupted")]
    ZeroBackProbability { from: usize, to: usize },

    #[error("construction failed: {0}")]
    ConstructionFailure(String),

    #[error("query budget of {budget} calls exceeded")]
    BudgetExceeded { budget: u64 },

    #[error("no records to emit")]
    EmptyRecords,

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
