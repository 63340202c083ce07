//! Dense complex matrices, Hermitian eigendecomposition and the scalar
//! functional calculus (exp, log) built on it.

mod functions;
pub mod json;
mod matrix;
mod spectral;

pub use functions::{matrix_exp, matrix_log, operator_norm, trace_real, OVERFLOW_GUARD};
pub use matrix::{ComplexMatrix, C64};
pub use spectral::{
    hermitian_eig, HermitianMatrix, PositiveDefiniteMatrix, SpectralDecomposition, HERMITIAN_TOL,
    ORTHO_TOL, RECON_TOL,
};
