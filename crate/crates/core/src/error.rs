use thiserror::Error;

/// Errors produced by the matrix, generator, solver and verification layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not symmetric positive definite: {0}")]
    NotSpd(String),

    #[error("matrix #{index} is not symmetric positive definite: {reason}")]
    NotSpdAt { index: usize, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("scalar function is undefined or non-finite at eigenvalue {0}")]
    DomainError(f64),

    #[error("transform is numerically singular (condition estimate {0:e})")]
    SingularTransform(f64),

    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error("argument {value} lies outside the open range ({lower}, {upper})")]
    OutOfRange { value: f64, lower: f64, upper: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("damping fell below {0:e}")]
    DampingUnderflow(f64),

    #[error("root bracket has the wrong sign pattern: phi(lo) = {lo:e}, phi(hi) = {hi:e}")]
    BracketViolated { lo: f64, hi: f64 },

    #[error("precheck failed: {0}")]
    PrecheckFailed(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Short stable name of the variant, used in CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NotSpd(_) | Error::NotSpdAt { .. } => "NotSpd",
            Error::DimMismatch { .. } => "DimMismatch",
            Error::DomainError(_) => "DomainError",
            Error::SingularTransform(_) => "SingularTransform",
            Error::BadParameter(_) => "BadParameter",
            Error::OutOfRange { .. } => "OutOfRange",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::DampingUnderflow(_) => "DampingUnderflow",
            Error::BracketViolated { .. } => "BracketViolated",
            Error::PrecheckFailed(_) => "PrecheckFailed",
            Error::Inconclusive(_) => "Inconclusive",
            Error::Parse(_) => "ParseError",
            Error::Io(_) => "IoError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
