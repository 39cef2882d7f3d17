use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FdrError {
    #[error("empty support")]
    EmptySupport,
    #[error("support atom out of (0,1]: {0}")]
    AtomOutOfRange(f64),
    #[error("batch evaluation requires sorted input")]
    UnsortedBatch,
    #[error("raw p-value out of [0,1]: {0}")]
    PValueOutOfRange(f64),
    #[error("length mismatch: {pvalues} raw p-values but {supports} supports")]
    LengthMismatch { pvalues: usize, supports: usize },
    #[error("problem contains no hypotheses")]
    EmptyProblem,
    #[error("{name} must lie in (0,1), got {value}")]
    InvalidLevel { name: &'static str, value: f64 },
    #[error("DBR requires lambda")]
    MissingLambda,
    #[error("chunk budget must be positive")]
    InvalidBudget,
    #[error("pooled format requires ≥ 2 rows")]
    TooFewRows,
    #[error("invalid contingency table: {0}")]
    InvalidTable(String),
    #[error("invalid Poisson test: {0}")]
    InvalidPoisson(String),
    #[error("oracle scale exceeded: m = {m}, |A| = {support}")]
    OracleScaleExceeded { m: usize, support: usize },
    #[error("invalid simulation: {0}")]
    InvalidSimulation(String),
}

pub type Result<T> = std::result::Result<T, FdrError>;
