use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain has no interior grid node")]
    EmptyDomain,
    #[error("invalid domain specification: {0}")]
    InvalidSpec(String),
    #[error("matrix is singular (|det| = {det:e})")]
    SingularMatrix { det: f64 },
    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),
    #[error("direction count {m} is not supported for n = {n}: {reason}")]
    BadCount { n: usize, m: usize, reason: String },
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
    #[error("degenerate direction: Psi = {min_psi:e} (the field is numerically zero)")]
    DegenerateDirection { min_psi: f64 },
    #[error("grid or direction-set mismatch: {0}")]
    GridMismatch(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("computed level {level:e} is not positive")]
    NonPositiveLevel { level: f64 },
    #[error("no convergence after {iterations} iterations (last relative change {last_change:e})")]
    NoConvergence { iterations: usize, last_change: f64 },
    #[error("field is not radial (profile scatter {scatter:e} exceeds {threshold:e})")]
    NotRadial { scatter: f64, threshold: f64 },
    #[error("field dump parse error at line {line}: {msg}")]
    FieldFormat { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
