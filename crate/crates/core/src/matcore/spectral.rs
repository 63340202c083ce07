use nalgebra::{DMatrix, SymmetricEigen};

use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Entrywise Hermitian-symmetry tolerance, relative to `max(1, ‖M‖_F)`.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Bound on `‖U*U − I‖_F` for computed eigenvectors.
pub const ORTHO_TOL: f64 = 1e-9;
/// Bound on `‖U diag(λ) U* − M‖_F / ‖M‖_F`.
pub const RECON_TOL: f64 = 1e-9;

const EIG_EPS: f64 = f64::EPSILON;
const EIG_MAX_ITER: usize = 10_000;

/// A square matrix with exact Hermitian symmetry.
///
/// Construction validates `max |M − M*| ≤ HERMITIAN_TOL · max(1, ‖M‖_F)` and
/// then stores `(M + M*)/2`, so downstream code never sees residual skew parts.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    inner: ComplexMatrix,
}

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        m.require_square()?;
        let asymmetry = m.hermitian_asymmetry();
        let tolerance = HERMITIAN_TOL * m.frobenius_norm().max(1.0);
        if asymmetry > tolerance {
            return Err(Error::NotHermitian {
                asymmetry,
                tolerance,
            });
        }
        Ok(Self::symmetrize(m))
    }

    /// `(M + M*)/2` without validation; for products known to be Hermitian
    /// up to rounding.
    pub(crate) fn symmetrize(m: ComplexMatrix) -> Self {
        let a = m.as_nalgebra();
        let sym = (a + a.adjoint()).map(|z| z * 0.5);
        Self {
            inner: ComplexMatrix::wrap(sym),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self {
            inner: ComplexMatrix::from_real_diagonal(diag),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            inner: ComplexMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: ComplexMatrix::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.inner
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.inner
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            inner: self.inner.scale(s),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            inner: self.inner.try_add(&other.inner)?,
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            inner: self.inner.try_sub(&other.inner)?,
        })
    }

    /// `H* · self · H` for a rectangular `H`, re-symmetrized.
    pub fn congruence_by(&self, h: &ComplexMatrix) -> Result<Self> {
        Ok(Self::symmetrize(h.congruence(&self.inner)?))
    }
}

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub unitary: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `U diag(f(λ)) U*`.
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> HermitianMatrix {
        let mapped: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        self.reassemble(&mapped)
    }

    pub(crate) fn reassemble(&self, values: &[f64]) -> HermitianMatrix {
        let u = self.unitary.as_nalgebra();
        let mut scaled = u.clone();
        for (j, &v) in values.iter().enumerate() {
            scaled.column_mut(j).scale_mut(v);
        }
        HermitianMatrix::symmetrize(ComplexMatrix::wrap(scaled * u.adjoint()))
    }

    /// `U* M U`.
    pub fn to_eigenbasis(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let u = self.unitary.as_nalgebra();
        ComplexMatrix::wrap(u.adjoint() * m.as_nalgebra() * u)
    }

    /// `U M U*`.
    pub fn from_eigenbasis(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let u = self.unitary.as_nalgebra();
        ComplexMatrix::wrap(u * m.as_nalgebra() * u.adjoint())
    }

    /// Daleckii–Krein map: in the eigenbasis, entry `(i, j)` of `M` is
    /// multiplied by `kernel(λ_i, λ_j)`.
    pub fn divided_difference_map<K: Fn(f64, f64) -> f64>(
        &self,
        m: &ComplexMatrix,
        kernel: K,
    ) -> ComplexMatrix {
        let mut rotated = self.to_eigenbasis(m).into_nalgebra();
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                rotated[(i, j)] *= kernel(self.eigenvalues[i], self.eigenvalues[j]);
            }
        }
        self.from_eigenbasis(&ComplexMatrix::wrap(rotated))
    }
}

fn size_factor(n: usize) -> f64 {
    (n as f64 / 64.0).max(1.0)
}

fn condition_estimate(m: &ComplexMatrix) -> f64 {
    match m.try_inverse() {
        Ok(inv) => m.frobenius_norm() * inv.frobenius_norm(),
        Err(_) => f64::INFINITY,
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eig(m: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let n = m.dim();
    let a = m.matrix();
    let failure = || Error::EigenFailure {
        dim: n,
        norm: a.frobenius_norm(),
        condition: condition_estimate(a),
    };
    let eig = SymmetricEigen::try_new(a.as_nalgebra().clone(), EIG_EPS, EIG_MAX_ITER)
        .ok_or_else(failure)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    if eigenvalues.iter().any(|l| !l.is_finite()) {
        return Err(failure());
    }
    let mut unitary = DMatrix::<C64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        unitary.set_column(dst, &eig.eigenvectors.column(src));
    }

    let decomposition = SpectralDecomposition {
        eigenvalues,
        unitary: ComplexMatrix::from_nalgebra(unitary).map_err(|_| failure())?,
    };

    let u = decomposition.unitary.as_nalgebra();
    let ortho = (u.adjoint() * u - DMatrix::<C64>::identity(n, n))
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt();
    let recon = decomposition
        .reassemble(&decomposition.eigenvalues)
        .matrix()
        .try_sub(a)?
        .frobenius_norm();
    let slack = size_factor(n);
    if ortho > ORTHO_TOL * slack || recon > RECON_TOL * slack * a.frobenius_norm() {
        return Err(failure());
    }
    Ok(decomposition)
}

/// A Hermitian matrix whose smallest eigenvalue exceeds the PD floor
/// `1e-12 · max(1, ‖A‖_F)`. The eigendecomposition is cached.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveDefiniteMatrix {
    hermitian: HermitianMatrix,
    spectral: SpectralDecomposition,
}

impl PositiveDefiniteMatrix {
    pub const FLOOR_FACTOR: f64 = 1e-12;

    pub fn floor_for(m: &ComplexMatrix) -> f64 {
        Self::FLOOR_FACTOR * m.frobenius_norm().max(1.0)
    }

    pub fn new(hermitian: HermitianMatrix) -> Result<Self> {
        let spectral = hermitian_eig(&hermitian)?;
        let floor = Self::floor_for(hermitian.matrix());
        let min_eigenvalue = spectral.eigenvalues[0];
        if min_eigenvalue <= floor {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue,
                floor,
            });
        }
        Ok(Self {
            hermitian,
            spectral,
        })
    }

    pub fn from_matrix(m: ComplexMatrix) -> Result<Self> {
        Self::new(HermitianMatrix::new(m)?)
    }

    /// Builds `U diag(values) U*` from a known spectral pair. All values must
    /// be strictly positive; no floor is applied because the spectrum is
    /// exact by construction.
    pub(crate) fn from_spectrum(unitary: ComplexMatrix, values: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = values.iter().find(|&&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: bad,
                floor: 0.0,
            });
        }
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        let sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        let mut u = DMatrix::<C64>::zeros(values.len(), values.len());
        for (dst, &src) in order.iter().enumerate() {
            u.set_column(dst, &unitary.as_nalgebra().column(src));
        }
        let spectral = SpectralDecomposition {
            eigenvalues: sorted,
            unitary: ComplexMatrix::wrap(u),
        };
        let hermitian = spectral.reassemble(&spectral.eigenvalues);
        Ok(Self {
            hermitian,
            spectral,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            hermitian: HermitianMatrix::identity(n),
            spectral: SpectralDecomposition {
                eigenvalues: vec![1.0; n],
                unitary: ComplexMatrix::identity(n),
            },
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(HermitianMatrix::from_real_diagonal(diag))
    }

    pub fn dim(&self) -> usize {
        self.hermitian.dim()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.spectral.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.spectral.eigenvalues.last().expect("non-empty spectrum")
    }

    pub fn condition(&self) -> f64 {
        self.max_eigenvalue() / self.min_eigenvalue()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.hermitian
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.hermitian.matrix()
    }

    pub fn spectral(&self) -> &SpectralDecomposition {
        &self.spectral
    }

    /// `s · A` for `s > 0`, reusing the cached eigenbasis.
    pub fn scale(&self, s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "PD scaling factor must be positive, got {s}"
            )));
        }
        Ok(Self {
            hermitian: self.hermitian.scale(s),
            spectral: SpectralDecomposition {
                eigenvalues: self.spectral.eigenvalues.iter().map(|l| l * s).collect(),
                unitary: self.spectral.unitary.clone(),
            },
        })
    }
}
