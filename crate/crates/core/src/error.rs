use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("site count mismatch: {left} vs {right}")]
    SiteMismatch { left: usize, right: usize },

    #[error("invalid site count {0}")]
    InvalidSiteCount(usize),

    #[error("index {p} out of range for n = {n}")]
    IndexOutOfRange { n: usize, p: u64 },

    #[error("cannot parse Pauli word {text:?}: {reason}")]
    ParseWord { text: String, reason: String },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("cannot parse state spec {spec:?}: {reason}")]
    StateSpec { spec: String, reason: String },

    #[error("n = {n} exceeds the dense limit of {limit}")]
    DenseLimit { n: usize, limit: usize },

    #[error("operation requires n = {expected}, got {actual}")]
    WrongSiteCount { expected: usize, actual: usize },

    #[error("enumeration over n = {n} exceeds the cap of {cap}")]
    EnumerationCap { n: usize, cap: usize },

    #[error("operators {0} and {1} do not commute")]
    NotCommuting(String, String),

    #[error("operator {name} is not diagonal in the common basis (residual {residual:e})")]
    Degeneracy { name: String, residual: f64 },

    #[error("operator {0} is not Hermitian")]
    NotHermitian(String),

    #[error("unknown operator {0}")]
    UnknownOperator(String),

    #[error("{0}")]
    Hypothesis(String),

    #[error("line {line}: {reason}")]
    Record { line: u64, reason: String },

    #[error("missing correlators {missing:?}; required set is {required:?}")]
    MissingCorrelators { missing: Vec<String>, required: Vec<String> },

    #[error("unexpected correlators {unknown:?}; required set is {required:?}")]
    UnknownCorrelators { unknown: Vec<String>, required: Vec<String> },

    #[error("consistency check failed: {0}")]
    Inconsistent(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
