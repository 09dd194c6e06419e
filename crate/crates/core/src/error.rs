use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is singular (|det| = {det:e} below threshold {threshold:e})")]
    SingularInput { det: f64, threshold: f64 },
    #[error("Gram-Schmidt breakdown at row {row}: residual norm {norm:e}")]
    NumericalBreakdown { row: usize, norm: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },
    #[error("matrix is not symmetric (asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("matrix is not orthogonal (|B B^T - I| = {defect:e})")]
    NotOrthogonal { defect: f64 },
    #[error("entry {index} is not positive: {value}")]
    NonPositiveEntry { index: usize, value: f64 },
    #[error("leading minor of order {r} is not positive: {value:e}")]
    MinorNotPositive { r: usize, value: f64 },
    #[error("verification failed: {0}")]
    VerificationFailure(String),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid degree {r} for n = {n}")]
    InvalidDegree { r: usize, n: usize },
    #[error("invalid highest weight: {0}")]
    InvalidWeight(String),
    #[error("operation requires n = {expected}, got n = {found}")]
    InvalidOrder { expected: usize, found: usize },
    #[error("Haar sampler failed for seed {seed}, index {index}")]
    SamplerFailure { seed: u64, index: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
