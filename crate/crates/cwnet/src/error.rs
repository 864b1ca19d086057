use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("hermitian violation: {0}")]
    HermitianViolation(String),
    #[error("graph skeleton is disconnected")]
    Disconnected,
    #[error("invalid edge: {0}")]
    InvalidEdge(String),
    #[error("parse error at line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),
    #[error("eigensolver failed to converge: {0}")]
    NumericalFailure(String),
    #[error("graph is not in the requested balance class ({0})")]
    NotInClass(String),
    #[error("operation requires a non-bipartite skeleton")]
    Bipartite,
    #[error("graph too large for exhaustive enumeration (n = {0}, limit {1})")]
    TooLarge(usize, usize),
    #[error("edge phase {phase} is not a multiple of 2*pi/{k}")]
    PhaseGridViolation { phase: f64, k: usize },
    #[error("invalid node subset: {0}")]
    InvalidSubset(String),
    #[error("invalid number of clusters: {0}")]
    InvalidK(String),
    #[error("generation failed: {0}")]
    GenerationFailed(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
