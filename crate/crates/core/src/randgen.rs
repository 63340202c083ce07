//! Deterministic generators for random test objects.
//!
//! Every trial draws from its own [`Stream`], a ChaCha8 generator keyed by
//! `(master seed, suite tag)` and positioned on stream `trial index`, so a
//! trial's objects never depend on execution order.
//!
//! Draw conventions (fixed, so reports are reproducible byte for byte):
//! - uniform `[0, 1)`: top 53 bits of one `next_u64`, times `2^-53`;
//! - Gaussian pair: Box–Muller on two uniforms `u1 = 1 − U₁ ∈ (0, 1]`,
//!   `u2 = U₂`, giving `(r cos 2πu2, r sin 2πu2)` with `r = sqrt(−2 ln u1)`;
//! - standard complex Gaussian: that pair as `(re, im)`, scaled by `1/√2`;
//! - matrices are filled row-major.

use nalgebra::DMatrix;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{
    hermitian_eig, matrix_exp, ComplexMatrix, HermitianMatrix, PositiveDefiniteMatrix, C64,
};
use crate::tracefn::{ContractionTuple, Resolution};

/// A reproducible source of random draws.
#[derive(Debug, Clone)]
pub struct Stream {
    rng: ChaCha8Rng,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(tag: &str) -> u64 {
    tag.bytes().fold(0xCBF2_9CE4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

impl Stream {
    pub fn new(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Self { rng }
    }

    /// Stream for trial `index` of the suite tagged `tag`.
    pub fn for_trial(master_seed: u64, tag: &str, index: u64) -> Self {
        Self::new(splitmix64(master_seed ^ fnv1a(tag)), index)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `lo..=hi`.
    pub fn integer(&mut self, lo: usize, hi: usize) -> usize {
        debug_assert!(lo <= hi);
        let span = (hi - lo + 1) as f64;
        (lo + (self.uniform() * span) as usize).min(hi)
    }

    pub fn gaussian_pair(&mut self) -> (f64, f64) {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        (r * theta.cos(), r * theta.sin())
    }

    pub fn gaussian(&mut self) -> f64 {
        self.gaussian_pair().0
    }

    pub fn complex_gaussian(&mut self) -> C64 {
        let (re, im) = self.gaussian_pair();
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    pub fn complex_gaussian_matrix(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        let data = (0..rows * cols).map(|_| self.complex_gaussian()).collect();
        ComplexMatrix::from_row_major(rows, cols, data).expect("finite Gaussian entries")
    }
}

/// Generation parameters shared by the randomized suites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GenConfig {
    pub seed: u64,
    pub n_range: (usize, usize),
    pub m_range: (usize, usize),
    pub k_range: (usize, usize),
    /// Cap on the operator norm of random Hermitian matrices.
    pub scale: f64,
    /// Smallest singular value of random invertible contractions.
    pub min_singular: f64,
    /// Condition cap for random positive definite matrices.
    pub cond_cap: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            n_range: (1, 5),
            m_range: (1, 5),
            k_range: (1, 4),
            scale: 4.0,
            min_singular: 0.2,
            cond_cap: 1e2,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in [
            ("n", self.n_range),
            ("m", self.m_range),
            ("k", self.k_range),
        ] {
            if lo == 0 || lo > hi {
                return Err(Error::InvalidArgument(format!(
                    "{name} range {lo}..={hi} must be non-empty and start at 1 or more"
                )));
            }
        }
        if !(self.scale >= 0.0 && self.scale.is_finite()) {
            return Err(Error::InvalidArgument(format!("scale must be finite and ≥ 0, got {}", self.scale)));
        }
        if !(self.min_singular > 0.0 && self.min_singular <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "min_singular must lie in (0, 1], got {}",
                self.min_singular
            )));
        }
        if !(self.cond_cap >= 1.0 && self.cond_cap.is_finite()) {
            return Err(Error::InvalidArgument(format!("cond_cap must be ≥ 1, got {}", self.cond_cap)));
        }
        Ok(())
    }

    /// Draws `(n, m, k)`; with `exact`, `m ≤ k·n` so an exact tuple exists.
    pub fn draw_dims(&self, stream: &mut Stream, exact: bool) -> (usize, usize, usize) {
        let k = stream.integer(self.k_range.0, self.k_range.1);
        let n = stream.integer(self.n_range.0, self.n_range.1);
        let mut hi = self.m_range.1;
        if exact {
            hi = hi.min(k * n);
        }
        let lo = self.m_range.0.min(hi);
        let m = stream.integer(lo, hi);
        (n, m, k)
    }
}

/// `(G + G*)/2` for a complex Gaussian `G`, rescaled to operator norm
/// `scale · u` with `u` uniform in `(0, 1]`.
pub fn rand_hermitian(n: usize, scale: f64, stream: &mut Stream) -> Result<HermitianMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    let g = stream.complex_gaussian_matrix(n, n);
    let u = 1.0 - stream.uniform();
    let h = HermitianMatrix::symmetrize(g);
    let spectral = hermitian_eig(&h)?;
    let norm = spectral
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, l| acc.max(l.abs()));
    if norm == 0.0 || scale == 0.0 {
        return Ok(HermitianMatrix::zeros(n));
    }
    Ok(h.scale(scale * u / norm))
}

/// `exp(H)` with `‖H‖ ≤ ln(cond_cap)/2`, so the spectrum straddles one and the
/// condition number is at most `cond_cap`.
pub fn rand_pd(n: usize, cond_cap: f64, stream: &mut Stream) -> Result<PositiveDefiniteMatrix> {
    if !(cond_cap >= 1.0 && cond_cap.is_finite()) {
        return Err(Error::InvalidArgument(format!("cond_cap must be ≥ 1, got {cond_cap}")));
    }
    let h = rand_hermitian(n, 0.5 * cond_cap.ln(), stream)?;
    matrix_exp(&h)
}

/// Orthonormalizes the columns of a tall matrix by Householder QR, with the
/// phases fixed so that `R` has a non-negative real diagonal.
pub fn orthonormal_columns(g: &ComplexMatrix) -> Result<ComplexMatrix> {
    if g.rows() < g.cols() {
        return Err(Error::InvalidArgument(format!(
            "cannot orthonormalize {} columns in dimension {}",
            g.cols(),
            g.rows()
        )));
    }
    let qr = g.as_nalgebra().clone().qr();
    let mut q: DMatrix<C64> = qr.q();
    let r = qr.r();
    for j in 0..g.cols() {
        let d = r[(j, j)];
        let mag = d.norm();
        if mag > 0.0 {
            let phase = d / mag;
            for z in q.column_mut(j).iter_mut() {
                *z *= phase;
            }
        }
    }
    ComplexMatrix::from_nalgebra(q)
}

pub fn rand_unitary(n: usize, stream: &mut Stream) -> Result<ComplexMatrix> {
    orthonormal_columns(&stream.complex_gaussian_matrix(n, n))
}

/// Random `(H_1..H_k)`, each `n×m`.
///
/// Exact: the `kn×m` Gaussian stack is orthonormalized and split into row
/// blocks, so `Σ H_i* H_i = I_m`. Sub: the same construction (or, when
/// `kn < m`, the stack divided by its operator norm) scaled by a factor
/// drawn from `(0.3, 1)`.
pub fn rand_contraction_tuple(
    k: usize,
    n: usize,
    m: usize,
    exact: bool,
    stream: &mut Stream,
) -> Result<ContractionTuple> {
    if k == 0 || n == 0 || m == 0 {
        return Err(Error::InvalidArgument("k, n and m must be at least 1".into()));
    }
    if exact && k * n < m {
        return Err(Error::InvalidArgument(format!(
            "no exact resolution with k·n = {} < m = {m}",
            k * n
        )));
    }
    let g = stream.complex_gaussian_matrix(k * n, m);
    let stack = if k * n >= m {
        orthonormal_columns(&g)?
    } else {
        let norm = crate::matcore::operator_norm(&g)?;
        g.scale(1.0 / norm)
    };
    let (stack, resolution) = if exact {
        (stack, Resolution::Exact)
    } else {
        let factor = stream.uniform_in(0.3, 1.0);
        (stack.scale(factor), Resolution::Sub)
    };
    let blocks = (0..k).map(|i| stack.block(i * n, 0, n, m)).collect();
    ContractionTuple::new(blocks, resolution)
}

/// `U diag(s) V*` with Haar-like unitaries and `s` uniform in `[min_singular, 1]`.
pub fn rand_invertible_contraction(
    n: usize,
    min_singular: f64,
    stream: &mut Stream,
) -> Result<ComplexMatrix> {
    if !(min_singular > 0.0 && min_singular <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "min_singular must lie in (0, 1], got {min_singular}"
        )));
    }
    let u = rand_unitary(n, stream)?;
    let v = rand_unitary(n, stream)?;
    let s: Vec<f64> = (0..n).map(|_| stream.uniform_in(min_singular, 1.0)).collect();
    u.try_mul(&ComplexMatrix::from_real_diagonal(&s))?
        .try_mul(&v.adjoint())
}

/// Two PD matrices sharing a random eigenbasis, spectra `exp(±scale)`-bounded.
pub fn rand_commuting_pair(
    n: usize,
    scale: f64,
    stream: &mut Stream,
) -> Result<(PositiveDefiniteMatrix, PositiveDefiniteMatrix)> {
    let u = rand_unitary(n, stream)?;
    let a: Vec<f64> = (0..n).map(|_| stream.uniform_in(-scale, scale).exp()).collect();
    let b: Vec<f64> = (0..n).map(|_| stream.uniform_in(-scale, scale).exp()).collect();
    Ok((
        PositiveDefiniteMatrix::from_spectrum(u.clone(), a)?,
        PositiveDefiniteMatrix::from_spectrum(u, b)?,
    ))
}

/// Random Hermitian direction with operator norm at most `fraction · λ_min(A)`.
pub fn rand_direction_within(
    a: &PositiveDefiniteMatrix,
    fraction: f64,
    stream: &mut Stream,
) -> Result<HermitianMatrix> {
    rand_hermitian(a.dim(), fraction * a.min_eigenvalue(), stream)
}
