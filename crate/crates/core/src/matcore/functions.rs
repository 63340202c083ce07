use super::matrix::ComplexMatrix;
use super::spectral::{hermitian_eig, HermitianMatrix, PositiveDefiniteMatrix};
use crate::error::{Error, Result};

/// Largest eigenvalue accepted by [`matrix_exp`].
pub const OVERFLOW_GUARD: f64 = 700.0;

/// Imaginary trace residue, relative to `‖M‖_F`, above which a debug note is logged.
const TRACE_IMAG_TOL: f64 = 1e-10;

/// `U diag(e^λ) U*`. The result is positive definite by construction.
pub fn matrix_exp(m: &HermitianMatrix) -> Result<PositiveDefiniteMatrix> {
    let spectral = hermitian_eig(m)?;
    let max = *spectral.eigenvalues.last().expect("non-empty spectrum");
    if max > OVERFLOW_GUARD {
        return Err(Error::ExpOverflow {
            max_eigenvalue: max,
            guard: OVERFLOW_GUARD,
        });
    }
    let values: Vec<f64> = spectral.eigenvalues.iter().map(|l| l.exp()).collect();
    if values[0] == 0.0 {
        return Err(Error::ExpUnderflow {
            min_eigenvalue: spectral.eigenvalues[0],
        });
    }
    PositiveDefiniteMatrix::from_spectrum(spectral.unitary, values)
}

/// `U diag(log λ) U*` on the cached eigendecomposition.
pub fn matrix_log(a: &PositiveDefiniteMatrix) -> HermitianMatrix {
    a.spectral().apply(f64::ln)
}

/// Largest singular value, as `sqrt(λ_max(M*M))`.
pub fn operator_norm(m: &ComplexMatrix) -> Result<f64> {
    let gram = HermitianMatrix::symmetrize(m.adjoint().try_mul(m)?);
    let spectral = hermitian_eig(&gram)?;
    Ok(spectral.eigenvalues.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}

/// Real part of the trace of a square matrix.
pub fn trace_real(m: &ComplexMatrix) -> Result<f64> {
    let tr = m.trace()?;
    let scale = m.frobenius_norm();
    if tr.im.abs() > TRACE_IMAG_TOL * scale.max(1.0) {
        log::debug!(
            "trace has imaginary part {:e} (‖M‖_F = {:e}); returning real part",
            tr.im,
            scale
        );
    }
    Ok(tr.re)
}
