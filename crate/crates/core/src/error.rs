use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("dimension {0} exceeds the supported maximum of {max}", max = crate::MAX_DIM)]
    DimensionTooLarge(usize),
    #[error("d must be ≥ 3 (got {0})")]
    DimensionTooSmall(usize),
    #[error("matrix is not square ({rows}×{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error(
        "eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})"
    )]
    NoConvergence { sweeps: usize, residual: f64 },
    #[error("block is not positive definite (minimum eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("empty input")]
    EmptyInput,
    #[error("zero vector")]
    ZeroVector,
    #[error("degenerate input vector: {0}")]
    Degenerate(String),
    #[error("trace has imaginary part {0:e}")]
    ImaginaryTrace(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("could not resolve the first-slot conjugation convention")]
    ConventionUnresolved,
}
