use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        found: String,
    },
    #[error("matrix is {rows}x{cols} but a square matrix is required")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix must have at least one row and one column (got {rows}x{cols})")]
    Empty { rows: usize, cols: usize },
    #[error("matrix data has {found} entries, expected {expected}")]
    WrongLength { expected: usize, found: usize },
    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not Hermitian: max |M - M*| = {asymmetry:e} exceeds {tolerance:e}")]
    NotHermitian { asymmetry: f64, tolerance: f64 },
    #[error("matrix is not positive definite: smallest eigenvalue {min_eigenvalue:e} <= floor {floor:e}")]
    NotPositiveDefinite { min_eigenvalue: f64, floor: f64 },
    #[error("Hermitian eigensolver did not converge (dim {dim}, Frobenius norm {norm:e}, condition estimate {condition:e})")]
    EigenFailure {
        dim: usize,
        norm: f64,
        condition: f64,
    },
    #[error("exp overflow: eigenvalue {max_eigenvalue:e} exceeds guard {guard}; rescale the input")]
    ExpOverflow { max_eigenvalue: f64, guard: f64 },
    #[error("exp underflow: eigenvalue {min_eigenvalue:e} maps to zero")]
    ExpUnderflow { min_eigenvalue: f64 },
    #[error("matrix is not a contraction: operator norm {norm:e}")]
    NotContraction { norm: f64 },
    #[error("resolution identity violated: residual {residual:e} exceeds {tolerance:e}")]
    Resolution { residual: f64, tolerance: f64 },
    #[error("matrix is numerically singular: condition {condition:e}")]
    Singular { condition: f64 },
    #[error("segment leaves the positive definite cone at step {step:e}; shrink the step")]
    ShrinkStep { step: f64 },
    #[error("{0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
