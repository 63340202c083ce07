use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Dense rectangular complex matrix with finite entries.
///
/// Storage is delegated to `nalgebra`; the public surface speaks in
/// row-major terms to match the JSON encoding.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{}x{} ", self.rows(), self.cols())?;
        f.debug_list()
            .entries((0..self.rows()).map(|i| {
                (0..self.cols())
                    .map(|j| (self.inner[(i, j)].re, self.inner[(i, j)].im))
                    .collect::<Vec<_>>()
            }))
            .finish()
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, validating shape and finiteness.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty { rows, cols });
        }
        let expected = rows.checked_mul(cols).ok_or(Error::WrongLength {
            expected: usize::MAX,
            found: data.len(),
        })?;
        if data.len() != expected {
            return Err(Error::WrongLength {
                expected,
                found: data.len(),
            });
        }
        let inner = DMatrix::from_row_slice(rows, cols, &data);
        Self::from_nalgebra(inner)
    }

    /// Real matrix from nested rows. Panics on ragged input; intended for literals.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| C64::new(x, 0.0)))
            .collect();
        Self::from_row_major(r, c, data).expect("valid literal matrix")
    }

    pub fn from_nalgebra(inner: DMatrix<C64>) -> Result<Self> {
        if inner.nrows() == 0 || inner.ncols() == 0 {
            return Err(Error::Empty {
                rows: inner.nrows(),
                cols: inner.ncols(),
            });
        }
        for i in 0..inner.nrows() {
            for j in 0..inner.ncols() {
                let z = inner[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self { inner })
    }

    /// Wraps without the finiteness scan. Callers guarantee the invariant.
    pub(crate) fn wrap(inner: DMatrix<C64>) -> Self {
        debug_assert!(inner.nrows() > 0 && inner.ncols() > 0);
        Self { inner }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::wrap(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self::wrap(DMatrix::identity(n, n))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut inner = DMatrix::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            inner[(i, i)] = C64::new(d, 0.0);
        }
        Self::wrap(inner)
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows(), self.cols())
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.inner[(row, col)]
    }

    pub fn as_nalgebra(&self) -> &DMatrix<C64> {
        &self.inner
    }

    pub fn into_nalgebra(self) -> DMatrix<C64> {
        self.inner
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.inner[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self::wrap(self.inner.adjoint())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::wrap(self.inner.map(|z| z * s))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Result<C64> {
        self.require_square()?;
        Ok(self.inner.trace())
    }

    pub(crate) fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows())
        } else {
            Err(Error::NotSquare {
                rows: self.rows(),
                cols: self.cols(),
            })
        }
    }

    fn require_same_shape(&self, other: &Self, context: &'static str) -> Result<()> {
        if self.shape() == other.shape() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                context,
                expected: format!("{}x{}", self.rows(), self.cols()),
                found: format!("{}x{}", other.rows(), other.cols()),
            })
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.require_same_shape(other, "matrix addition")?;
        Ok(Self::wrap(&self.inner + &other.inner))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.require_same_shape(other, "matrix subtraction")?;
        Ok(Self::wrap(&self.inner - &other.inner))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.cols() != other.rows() {
            return Err(Error::DimensionMismatch {
                context: "matrix product",
                expected: format!("{} rows", self.cols()),
                found: format!("{} rows", other.rows()),
            });
        }
        Ok(Self::wrap(&self.inner * &other.inner))
    }

    /// `self* · middle · self`, the congruence `H* M H` used throughout.
    pub fn congruence(&self, middle: &Self) -> Result<Self> {
        self.adjoint().try_mul(middle)?.try_mul(self)
    }

    /// Inverse via LU with partial pivoting.
    pub fn try_inverse(&self) -> Result<Self> {
        self.require_square()?;
        let inv = self
            .inner
            .clone()
            .try_inverse()
            .ok_or(Error::Singular {
                condition: f64::INFINITY,
            })?;
        Self::from_nalgebra(inv).map_err(|_| Error::Singular {
            condition: f64::INFINITY,
        })
    }

    /// Block-diagonal assembly of square or rectangular blocks.
    pub fn block_diagonal(blocks: &[&ComplexMatrix]) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidArgument("block_diagonal of no blocks".into()));
        }
        let rows: usize = blocks.iter().map(|b| b.rows()).sum();
        let cols: usize = blocks.iter().map(|b| b.cols()).sum();
        let mut inner = DMatrix::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            inner
                .view_mut((r0, c0), (b.rows(), b.cols()))
                .copy_from(&b.inner);
            r0 += b.rows();
            c0 += b.cols();
        }
        Ok(Self::wrap(inner))
    }

    /// Copies `block` into `self` with its top-left corner at `(row, col)`.
    pub(crate) fn set_block(&mut self, row: usize, col: usize, block: &ComplexMatrix) {
        self.inner
            .view_mut((row, col), (block.rows(), block.cols()))
            .copy_from(&block.inner);
    }

    pub(crate) fn block(&self, row: usize, col: usize, rows: usize, cols: usize) -> Self {
        Self::wrap(self.inner.view((row, col), (rows, cols)).into_owned())
    }

    /// Maximum entrywise deviation from Hermitian symmetry.
    pub fn hermitian_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                worst = worst.max((self.inner[(i, j)] - self.inner[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Frobenius distance relative to `max(1, ‖other‖_F)`.
    pub fn relative_distance(&self, other: &Self) -> f64 {
        let diff = (&self.inner - &other.inner)
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt();
        diff / other.frobenius_norm().max(1.0)
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        self.try_add(rhs).expect("shape mismatch in +")
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        self.try_sub(rhs).expect("shape mismatch in -")
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        self.try_mul(rhs).expect("shape mismatch in *")
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix::wrap(-&self.inner)
    }
}
