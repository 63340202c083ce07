//! Trace functions `Tr exp(L + Σ H_i* log(A_i) H_i)`, the block embedding that
//! reduces k-tuples to a single contraction, and concavity probes.
//!
//! Shape convention: each `H_i` is `n×m`, each `A_i` is `n×n`, and `L` and the
//! exponent are `m×m`. The resolution identity reads `Σ H_i* H_i = I_m`.

use crate::error::{Error, Result};
use crate::matcore::{
    hermitian_eig, matrix_exp, matrix_log, operator_norm, trace_real, ComplexMatrix,
    HermitianMatrix, PositiveDefiniteMatrix,
};
use crate::report::{Dims, TrialReport};

/// Contraction norm slack accepted by [`phi_single`].
pub const CONTRACTION_TOL: f64 = 1e-10;
/// Default exact-resolution tolerance factor, multiplied by `√m`.
pub const EXACT_RESOLUTION_TOL: f64 = 1e-10;
/// Smallest eigenvalue accepted for the augmenting block `(I − Σ H_i* H_i)^{1/2}`.
pub const AUGMENT_MIN_EIGENVALUE: f64 = 1e-8;
/// Second-difference tolerance factor, multiplied by `1 + |f|`.
pub const FD2_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolution {
    /// `Σ H_i* H_i = I_m`.
    Exact,
    /// `Σ H_i* H_i ≤ I_m`.
    Sub,
}

/// `(H_1, …, H_k)`, all `n×m`, with a validated resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionTuple {
    blocks: Vec<ComplexMatrix>,
    resolution: Resolution,
}

impl ContractionTuple {
    pub fn new(blocks: Vec<ComplexMatrix>, resolution: Resolution) -> Result<Self> {
        Self::with_tolerance(blocks, resolution, None)
    }

    /// Validates with an explicit absolute tolerance on `‖Σ H_i* H_i − I‖_F`
    /// (exact) or on `λ_max(Σ H_i* H_i) − 1` (sub). `None` selects the defaults.
    pub fn with_tolerance(
        blocks: Vec<ComplexMatrix>,
        resolution: Resolution,
        tolerance: Option<f64>,
    ) -> Result<Self> {
        let tuple = Self::new_unchecked(blocks, resolution)?;
        let m = tuple.m();
        match resolution {
            Resolution::Exact => {
                let tolerance = tolerance.unwrap_or(EXACT_RESOLUTION_TOL * (m as f64).sqrt());
                let residual = tuple.resolution_residual()?;
                if residual > tolerance {
                    return Err(Error::Resolution {
                        residual,
                        tolerance,
                    });
                }
            }
            Resolution::Sub => {
                let tolerance = tolerance.unwrap_or(EXACT_RESOLUTION_TOL);
                let top = *hermitian_eig(&tuple.gram()?)?
                    .eigenvalues
                    .last()
                    .expect("non-empty");
                if top > 1.0 + tolerance {
                    return Err(Error::Resolution {
                        residual: top - 1.0,
                        tolerance,
                    });
                }
            }
        }
        Ok(tuple)
    }

    /// Shape checks only. The resolution flag is trusted, which lets tests
    /// feed deliberately invalid tuples through the checkers.
    pub fn new_unchecked(blocks: Vec<ComplexMatrix>, resolution: Resolution) -> Result<Self> {
        let first = blocks
            .first()
            .ok_or_else(|| Error::InvalidArgument("contraction tuple needs k ≥ 1".into()))?;
        let shape = first.shape();
        if let Some(bad) = blocks.iter().find(|b| b.shape() != shape) {
            return Err(Error::DimensionMismatch {
                context: "contraction tuple blocks",
                expected: format!("{}x{}", shape.0, shape.1),
                found: format!("{}x{}", bad.rows(), bad.cols()),
            });
        }
        Ok(Self { blocks, resolution })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            blocks: vec![ComplexMatrix::identity(n)],
            resolution: Resolution::Exact,
        }
    }

    /// `H_i = √p_i · I_n`; exact when the weights sum to one.
    pub fn scalar_weights(n: usize, weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|&p| p.is_nan() || p < 0.0) {
            return Err(Error::InvalidArgument("weights must be non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        let resolution = if (total - 1.0).abs() <= 1e-12 {
            Resolution::Exact
        } else {
            Resolution::Sub
        };
        let blocks = weights
            .iter()
            .map(|&p| ComplexMatrix::identity(n).scale(p.sqrt()))
            .collect();
        Self::new(blocks, resolution)
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    pub fn is_exact(&self) -> bool {
        self.resolution == Resolution::Exact
    }

    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn n(&self) -> usize {
        self.blocks[0].rows()
    }

    pub fn m(&self) -> usize {
        self.blocks[0].cols()
    }

    pub fn dims(&self) -> Dims {
        Dims::new(self.n(), self.m(), self.k())
    }

    /// `Σ H_i* H_i`.
    pub fn gram(&self) -> Result<HermitianMatrix> {
        let mut acc = ComplexMatrix::zeros(self.m(), self.m());
        for h in &self.blocks {
            acc = acc.try_add(&h.adjoint().try_mul(h)?)?;
        }
        Ok(HermitianMatrix::symmetrize(acc))
    }

    /// `‖Σ H_i* H_i − I_m‖_F`.
    pub fn resolution_residual(&self) -> Result<f64> {
        Ok(self
            .gram()?
            .matrix()
            .try_sub(&ComplexMatrix::identity(self.m()))?
            .frobenius_norm())
    }

    /// `Σ H_i* M_i H_i` for Hermitian `n×n` matrices `M_i`.
    pub fn congruence_sum(&self, middles: &[HermitianMatrix]) -> Result<HermitianMatrix> {
        self.require_len(middles.len())?;
        let mut acc = ComplexMatrix::zeros(self.m(), self.m());
        for (h, mid) in self.blocks.iter().zip(middles) {
            self.require_square_n(mid.dim())?;
            acc = acc.try_add(&h.congruence(mid.matrix())?)?;
        }
        Ok(HermitianMatrix::symmetrize(acc))
    }

    /// `Σ H_i* log(A_i) H_i`.
    pub fn log_congruence_sum(&self, list: &[PositiveDefiniteMatrix]) -> Result<HermitianMatrix> {
        let logs: Vec<HermitianMatrix> = list.iter().map(matrix_log).collect();
        self.congruence_sum(&logs)
    }

    pub(crate) fn require_len(&self, len: usize) -> Result<()> {
        if len == self.k() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                context: "matrix list length",
                expected: format!("k = {}", self.k()),
                found: format!("{len}"),
            })
        }
    }

    pub(crate) fn require_square_n(&self, dim: usize) -> Result<()> {
        if dim == self.n() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                context: "tuple matrix",
                expected: format!("{0}x{0}", self.n()),
                found: format!("{dim}x{dim}"),
            })
        }
    }

    /// Appends `H_{k+1} = (I − Σ H_i* H_i)^{1/2}`, giving an exact tuple.
    ///
    /// Requires `n = m` and a strictly sub-unital tuple: the augmenting block
    /// must have smallest eigenvalue at least [`AUGMENT_MIN_EIGENVALUE`].
    pub fn augment(&self) -> Result<(ContractionTuple, PositiveDefiniteMatrix)> {
        if self.n() != self.m() {
            return Err(Error::DimensionMismatch {
                context: "augmentation requires square blocks",
                expected: format!("{0}x{0}", self.m()),
                found: format!("{}x{}", self.n(), self.m()),
            });
        }
        let deficit = HermitianMatrix::identity(self.m()).try_sub(&self.gram()?)?;
        let spectral = hermitian_eig(&deficit)?;
        let min = spectral.eigenvalues[0];
        if min < AUGMENT_MIN_EIGENVALUE * AUGMENT_MIN_EIGENVALUE {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: min.max(0.0).sqrt(),
                floor: AUGMENT_MIN_EIGENVALUE,
            });
        }
        let root_values: Vec<f64> = spectral.eigenvalues.iter().map(|v| v.sqrt()).collect();
        let root = PositiveDefiniteMatrix::from_spectrum(spectral.unitary, root_values)?;
        let mut blocks = self.blocks.clone();
        blocks.push(root.matrix().clone());
        let tuple = ContractionTuple::with_tolerance(
            blocks,
            Resolution::Exact,
            Some(1e-9 * (self.m() as f64).sqrt()),
        )?;
        Ok((tuple, root))
    }
}

/// The data defining `φ(A_1..A_k) = Tr exp(L + Σ H_i* log(A_i) H_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiSpec {
    l_term: Option<HermitianMatrix>,
    contraction: ContractionTuple,
}

impl PhiSpec {
    pub fn new(l_term: Option<HermitianMatrix>, contraction: ContractionTuple) -> Result<Self> {
        if let Some(l) = &l_term {
            if l.dim() != contraction.m() {
                return Err(Error::DimensionMismatch {
                    context: "L term",
                    expected: format!("{0}x{0}", contraction.m()),
                    found: format!("{0}x{0}", l.dim()),
                });
            }
        }
        Ok(Self {
            l_term,
            contraction,
        })
    }

    pub fn without_l(contraction: ContractionTuple) -> Self {
        Self {
            l_term: None,
            contraction,
        }
    }

    pub fn l_term(&self) -> Option<&HermitianMatrix> {
        self.l_term.as_ref()
    }

    pub fn contraction(&self) -> &ContractionTuple {
        &self.contraction
    }

    /// `L + Σ H_i* log(A_i) H_i`.
    pub fn exponent(&self, list: &[PositiveDefiniteMatrix]) -> Result<HermitianMatrix> {
        let sum = self.contraction.log_congruence_sum(list)?;
        match &self.l_term {
            Some(l) => l.try_add(&sum),
            None => Ok(sum),
        }
    }
}

/// `Tr exp(H* log(A) H)` for a contraction `H` (`n×m`) and PD `A` (`n×n`).
pub fn phi_single(h: &ComplexMatrix, a: &PositiveDefiniteMatrix) -> Result<f64> {
    if h.rows() != a.dim() {
        return Err(Error::DimensionMismatch {
            context: "phi_single",
            expected: format!("H with {} rows", a.dim()),
            found: format!("{} rows", h.rows()),
        });
    }
    let norm = operator_norm(h)?;
    if norm > 1.0 + CONTRACTION_TOL {
        return Err(Error::NotContraction { norm });
    }
    let exponent = matrix_log(a).congruence_by(h)?;
    trace_real(matrix_exp(&exponent)?.matrix())
}

/// `Tr exp(L + Σ H_i* log(A_i) H_i)`.
pub fn phi_multi(spec: &PhiSpec, list: &[PositiveDefiniteMatrix]) -> Result<f64> {
    let exponent = spec.exponent(list)?;
    trace_real(matrix_exp(&exponent)?.matrix())
}

/// Stacks `H_1..H_k` into the first column block of a `kn×km` matrix and
/// places `A_1..A_k` on the diagonal of a `kn×kn` matrix.
pub fn block_embed(
    tuple: &ContractionTuple,
    list: &[PositiveDefiniteMatrix],
) -> Result<(ComplexMatrix, PositiveDefiniteMatrix)> {
    tuple.require_len(list.len())?;
    let (n, m, k) = (tuple.n(), tuple.m(), tuple.k());
    let mut h_big = ComplexMatrix::zeros(k * n, k * m);
    for (i, h) in tuple.blocks().iter().enumerate() {
        h_big.set_block(i * n, 0, h);
    }
    let mut values = Vec::with_capacity(k * n);
    let mut unitaries = Vec::with_capacity(k);
    for a in list {
        tuple.require_square_n(a.dim())?;
        values.extend_from_slice(&a.spectral().eigenvalues);
        unitaries.push(&a.spectral().unitary);
    }
    let u_big = ComplexMatrix::block_diagonal(&unitaries)?;
    let a_big = PositiveDefiniteMatrix::from_spectrum(u_big, values)?;
    Ok((h_big, a_big))
}

/// `φ_single(H_big, A_big) − φ_multi(A_1..A_k) = (k−1)·m`, to `1e-9` absolute.
pub fn check_block_identity(
    tuple: &ContractionTuple,
    list: &[PositiveDefiniteMatrix],
) -> Result<TrialReport> {
    if !tuple.is_exact() {
        return Err(Error::InvalidArgument(
            "block identity requires exact resolution".into(),
        ));
    }
    let (h_big, a_big) = block_embed(tuple, list)?;
    let embedded = phi_single(&h_big, &a_big)?;
    let direct = phi_multi(&PhiSpec::without_l(tuple.clone()), list)?;
    let expected = ((tuple.k() - 1) * tuple.m()) as f64;
    Ok(TrialReport::identity(
        "block-identity",
        embedded - direct,
        expected,
        1e-9,
        tuple.dims(),
    ))
}

/// A trace function evaluated on tuples of PD matrices.
#[derive(Debug, Clone)]
pub enum Evaluator {
    /// `A ↦ Tr exp(H* log(A) H)`; points are one-element tuples.
    Single(ComplexMatrix),
    /// `(A_i) ↦ φ_multi(spec, A_i)`.
    Multi(PhiSpec),
}

impl Evaluator {
    pub fn evaluate(&self, point: &[PositiveDefiniteMatrix]) -> Result<f64> {
        match self {
            Self::Single(h) => match point {
                [a] => phi_single(h, a),
                _ => Err(Error::DimensionMismatch {
                    context: "phi_single point",
                    expected: "1 matrix".into(),
                    found: format!("{} matrices", point.len()),
                }),
            },
            Self::Multi(spec) => phi_multi(spec, point),
        }
    }

    fn dims(&self) -> Dims {
        match self {
            Self::Single(h) => Dims::new(h.rows(), h.cols(), 1),
            Self::Multi(spec) => spec.contraction().dims(),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Self::Single(_) => "phi-single",
            Self::Multi(_) => "phi-multi",
        }
    }
}

fn require_same_len(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context: "probe points",
            expected: format!("{a} matrices"),
            found: format!("{b} matrices"),
        })
    }
}

/// `f((p0+p1)/2) ≥ (f(p0)+f(p1))/2 − slack_tol`. Reported with
/// `lhs = (f(p0)+f(p1))/2` and `rhs = f(midpoint)`.
pub fn concavity_midpoint_probe(
    evaluator: &Evaluator,
    p0: &[PositiveDefiniteMatrix],
    p1: &[PositiveDefiniteMatrix],
) -> Result<TrialReport> {
    require_same_len(p0.len(), p1.len())?;
    let mid = p0
        .iter()
        .zip(p1)
        .map(|(a, b)| PositiveDefiniteMatrix::new(a.hermitian().try_add(b.hermitian())?.scale(0.5)))
        .collect::<Result<Vec<_>>>()?;
    let average = 0.5 * (evaluator.evaluate(p0)? + evaluator.evaluate(p1)?);
    let at_mid = evaluator.evaluate(&mid)?;
    Ok(TrialReport::inequality(
        &format!("{}-midpoint", evaluator.name()),
        average,
        at_mid,
        evaluator.dims(),
    ))
}

/// Central second difference of `t ↦ f(point + t·direction)` at `t = 0`,
/// bounded above by `FD2_TOL · (1 + |f(point)|)`.
pub fn concavity_second_derivative_probe(
    evaluator: &Evaluator,
    point: &[PositiveDefiniteMatrix],
    direction: &[HermitianMatrix],
    step: f64,
) -> Result<TrialReport> {
    require_same_len(point.len(), direction.len())?;
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    let shifted = |sign: f64| -> Result<Vec<PositiveDefiniteMatrix>> {
        point
            .iter()
            .zip(direction)
            .map(|(a, d)| {
                PositiveDefiniteMatrix::new(a.hermitian().try_add(&d.scale(sign * step))?)
                    .map_err(|e| match e {
                        Error::NotPositiveDefinite { .. } => Error::ShrinkStep { step },
                        other => other,
                    })
            })
            .collect()
    };
    let plus = evaluator.evaluate(&shifted(1.0)?)?;
    let minus = evaluator.evaluate(&shifted(-1.0)?)?;
    let center = evaluator.evaluate(point)?;
    let second = (plus - 2.0 * center + minus) / (step * step);
    Ok(TrialReport::bound(
        &format!("{}-second-difference", evaluator.name()),
        second,
        0.0,
        FD2_TOL * (1.0 + center.abs()),
        evaluator.dims(),
    ))
}

/// `φ_multi(s·A) = s·φ_multi(A)` to `1e-10` relative; exact resolution only.
pub fn check_homogeneity(
    spec: &PhiSpec,
    list: &[PositiveDefiniteMatrix],
    s: f64,
) -> Result<TrialReport> {
    if !spec.contraction().is_exact() {
        return Err(Error::InvalidArgument(
            "homogeneity holds only for exact resolution".into(),
        ));
    }
    let scaled = list
        .iter()
        .map(|a| a.scale(s))
        .collect::<Result<Vec<_>>>()?;
    let lhs = phi_multi(spec, &scaled)?;
    let rhs = s * phi_multi(spec, list)?;
    Ok(TrialReport::relative_identity(
        "homogeneity",
        lhs,
        rhs,
        1e-10,
        spec.contraction().dims(),
    ))
}

/// Removes `L` by augmenting the tuple with `H_{k+1} = (I − Σ H_i* H_i)^{1/2}`
/// and `A_{k+1} = exp(H_{k+1}⁻¹ L H_{k+1}⁻¹)`. Returns the L-free spec and the
/// extra PD argument; `φ(spec, A) = φ(augmented, A ++ [A_{k+1}])`.
pub fn absorb_l_term(spec: &PhiSpec) -> Result<(PhiSpec, PositiveDefiniteMatrix)> {
    let (tuple, root) = spec.contraction().augment()?;
    let m = spec.contraction().m();
    let l = spec
        .l_term()
        .cloned()
        .unwrap_or_else(|| HermitianMatrix::zeros(m));
    let inv_values: Vec<f64> = root.spectral().eigenvalues.iter().map(|v| 1.0 / v).collect();
    let root_inv = root.spectral().reassemble(&inv_values);
    let inner = l.congruence_by(root_inv.matrix())?;
    let extra = matrix_exp(&inner)?;
    Ok((PhiSpec::without_l(tuple), extra))
}
