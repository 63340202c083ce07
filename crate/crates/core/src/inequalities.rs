//! Both sides of each trace inequality, evaluated on concrete inputs and
//! returned as [`TrialReport`]s.

use crate::calculus::{frechet_log, q_form};
use crate::error::{Error, Result};
use crate::matcore::{
    matrix_exp, matrix_log, operator_norm, trace_real, ComplexMatrix, HermitianMatrix,
    PositiveDefiniteMatrix,
};
pub use crate::report::{slack_tol, CheckKind, Dims, TrialReport};
use crate::tracefn::{phi_multi, ContractionTuple, PhiSpec, CONTRACTION_TOL};

/// Condition number above which `X` counts as singular in [`check_q_contraction`].
pub const SINGULAR_CONDITION: f64 = 1e12;
/// Agreement required between two evaluation routes of the same quantity.
pub const ROUTE_AGREEMENT: f64 = 1e-12;

fn require_exact(tuple: &ContractionTuple, what: &str) -> Result<()> {
    if tuple.is_exact() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{what} requires an exact resolution Σ H_i* H_i = I"
        )))
    }
}

fn require_dim(expected: usize, found: usize, context: &'static str) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected: format!("{expected}x{expected}"),
            found: format!("{found}x{found}"),
        })
    }
}

/// `Tr(exp(X) · Y)`.
fn trace_exp_times(exponent: &HermitianMatrix, y: &ComplexMatrix) -> Result<f64> {
    trace_real(&matrix_exp(exponent)?.matrix().try_mul(y)?)
}

/// `Σ H_i* (d log(A_i) B_i) H_i`.
fn frechet_congruence_sum(
    tuple: &ContractionTuple,
    a_list: &[PositiveDefiniteMatrix],
    b_list: &[PositiveDefiniteMatrix],
) -> Result<ComplexMatrix> {
    tuple.require_len(a_list.len())?;
    tuple.require_len(b_list.len())?;
    let mut acc = ComplexMatrix::zeros(tuple.m(), tuple.m());
    for ((h, a), b) in tuple.blocks().iter().zip(a_list).zip(b_list) {
        tuple.require_square_n(a.dim())?;
        tuple.require_square_n(b.dim())?;
        let d = frechet_log(a, b.matrix())?;
        acc = acc.try_add(&h.congruence(&d)?)?;
    }
    Ok(acc)
}

/// `Q(XAX*, B) ≤ Q(A, X⁻¹B(X*)⁻¹)` for an invertible contraction `X`.
pub fn check_q_contraction(
    x: &ComplexMatrix,
    a: &PositiveDefiniteMatrix,
    b: &ComplexMatrix,
) -> Result<TrialReport> {
    let n = a.dim();
    if x.shape() != (n, n) || b.shape() != (n, n) {
        return Err(Error::DimensionMismatch {
            context: "check_q_contraction",
            expected: format!("{n}x{n}"),
            found: format!("X {}x{}, B {}x{}", x.rows(), x.cols(), b.rows(), b.cols()),
        });
    }
    let norm = operator_norm(x)?;
    if norm > 1.0 + CONTRACTION_TOL {
        return Err(Error::NotContraction { norm });
    }
    let x_inv = x.try_inverse()?;
    let condition = norm * operator_norm(&x_inv)?;
    if condition.is_nan() || condition > SINGULAR_CONDITION {
        return Err(Error::Singular { condition });
    }
    let congruent = PositiveDefiniteMatrix::new(HermitianMatrix::symmetrize(
        x.try_mul(a.matrix())?.try_mul(&x.adjoint())?,
    ))?;
    let lhs = q_form(&congruent, b)?;
    let pulled = x_inv.try_mul(b)?.try_mul(&x_inv.adjoint())?;
    let rhs = q_form(a, &pulled)?;
    Ok(TrialReport::inequality("q-contraction", lhs, rhs, Dims::square(n)))
}

/// `Tr exp(L + Σ H_j* log(B_j) H_j) ≤ Tr exp(L + Σ H_j* log(A_j) H_j) · Σ H_i* (d log(A_i) B_i) H_i`.
pub fn check_lemma_main(
    l: &HermitianMatrix,
    tuple: &ContractionTuple,
    a_list: &[PositiveDefiniteMatrix],
    b_list: &[PositiveDefiniteMatrix],
) -> Result<TrialReport> {
    require_exact(tuple, "check_lemma_main")?;
    require_dim(tuple.m(), l.dim(), "L")?;
    let spec = PhiSpec::new(Some(l.clone()), tuple.clone())?;
    let lhs = phi_multi(&spec, b_list)?;
    let weights = frechet_congruence_sum(tuple, a_list, b_list)?;
    let rhs = trace_exp_times(&spec.exponent(a_list)?, &weights)?;
    Ok(TrialReport::inequality("lemma", lhs, rhs, tuple.dims()))
}

/// `Tr exp(L + Σ H_i* B_i H_i) ≤ Tr exp(L) Σ H_i* exp(B_i) H_i`.
pub fn check_gt_multi(
    l: &HermitianMatrix,
    tuple: &ContractionTuple,
    b_list: &[HermitianMatrix],
) -> Result<TrialReport> {
    require_exact(tuple, "check_gt_multi")?;
    require_dim(tuple.m(), l.dim(), "L")?;
    let lhs = trace_real(matrix_exp(&l.try_add(&tuple.congruence_sum(b_list)?)?)?.matrix())?;
    let exps = b_list
        .iter()
        .map(|b| matrix_exp(b).map(|e| e.hermitian().clone()))
        .collect::<Result<Vec<_>>>()?;
    let rhs = trace_exp_times(l, tuple.congruence_sum(&exps)?.matrix())?;
    Ok(TrialReport::inequality("gt-multi", lhs, rhs, tuple.dims()))
}

/// `Tr e^{L+B} ≤ Tr e^L e^B`, evaluated through [`check_gt_multi`] with
/// `k = 1, H = I` and cross-checked against the direct formula.
pub fn check_classical_gt(l: &HermitianMatrix, b: &HermitianMatrix) -> Result<TrialReport> {
    require_dim(l.dim(), b.dim(), "B")?;
    let n = l.dim();
    let via_multi = check_gt_multi(l, &ContractionTuple::identity(n), std::slice::from_ref(b))?;
    let lhs = trace_real(matrix_exp(&l.try_add(b)?)?.matrix())?;
    let rhs = trace_exp_times(l, matrix_exp(b)?.matrix())?;
    let report = TrialReport::inequality("classical-gt", via_multi.lhs, via_multi.rhs, Dims::square(n));
    Ok(require_routes_agree(report, &[(lhs, via_multi.lhs), (rhs, via_multi.rhs)]))
}

fn routes_agree(a: f64, b: f64) -> bool {
    (a - b).abs() <= ROUTE_AGREEMENT * a.abs().max(b.abs())
}

fn require_routes_agree(mut report: TrialReport, pairs: &[(f64, f64)]) -> TrialReport {
    if !pairs.iter().all(|&(a, b)| routes_agree(a, b)) {
        log::warn!("{}: evaluation routes disagree: {pairs:?}", report.suite);
        report.pass = false;
    }
    report
}

/// `Tr exp(L + A/2 + B/2) ≤ Tr exp(L)(exp(A)/2 + exp(B)/2)`, as
/// [`check_gt_multi`] with `k = 2, H_1 = H_2 = I/√2` and directly.
pub fn check_interpolation(
    l: &HermitianMatrix,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
) -> Result<TrialReport> {
    require_dim(l.dim(), a.dim(), "A")?;
    require_dim(l.dim(), b.dim(), "B")?;
    let n = l.dim();
    let tuple = ContractionTuple::scalar_weights(n, &[0.5, 0.5])?;
    let via_multi = check_gt_multi(l, &tuple, &[a.clone(), b.clone()])?;
    let mean = a.try_add(b)?.scale(0.5);
    let lhs = trace_real(matrix_exp(&l.try_add(&mean)?)?.matrix())?;
    let mix = matrix_exp(a)?
        .hermitian()
        .try_add(matrix_exp(b)?.hermitian())?
        .scale(0.5);
    let rhs = trace_exp_times(l, mix.matrix())?;
    let report = TrialReport::inequality("interpolation", via_multi.lhs, via_multi.rhs, Dims::new(n, n, 2));
    Ok(require_routes_agree(report, &[(lhs, via_multi.lhs), (rhs, via_multi.rhs)]))
}

/// `Tr exp(Σ H_i* (log B_i − log A_i) H_i) ≤ Σ Tr H_i* (d log(A_i) B_i) H_i`.
pub fn check_gt_logdiff(
    tuple: &ContractionTuple,
    a_list: &[PositiveDefiniteMatrix],
    b_list: &[PositiveDefiniteMatrix],
) -> Result<TrialReport> {
    require_exact(tuple, "check_gt_logdiff")?;
    tuple.require_len(a_list.len())?;
    tuple.require_len(b_list.len())?;
    let diffs = a_list
        .iter()
        .zip(b_list)
        .map(|(a, b)| matrix_log(b).try_sub(&matrix_log(a)))
        .collect::<Result<Vec<_>>>()?;
    let lhs = trace_real(matrix_exp(&tuple.congruence_sum(&diffs)?)?.matrix())?;
    let rhs = trace_real(&frechet_congruence_sum(tuple, a_list, b_list)?)?;
    Ok(TrialReport::inequality("gt-logdiff", lhs, rhs, tuple.dims()))
}

/// `Σ Tr H_i* B_i A_i⁻¹ H_i`, the right-hand side of [`check_gt_logdiff`]
/// when each pair `(A_i, B_i)` commutes.
pub fn commuting_logdiff_rhs(
    tuple: &ContractionTuple,
    a_list: &[PositiveDefiniteMatrix],
    b_list: &[PositiveDefiniteMatrix],
) -> Result<f64> {
    tuple.require_len(a_list.len())?;
    tuple.require_len(b_list.len())?;
    let mut total = 0.0;
    for ((h, a), b) in tuple.blocks().iter().zip(a_list).zip(b_list) {
        let product = b.matrix().try_mul(&a.matrix().try_inverse()?)?;
        total += trace_real(&h.congruence(&product)?)?;
    }
    Ok(total)
}

/// `Tr exp(Σ H_i* (log B_i + log C_i − log A_i) H_i) ≤ Tr exp(Σ H_i* log(C_i) H_i) · Σ H_i* (d log(A_i) B_i) H_i`.
pub fn check_gt_extended(
    tuple: &ContractionTuple,
    a_list: &[PositiveDefiniteMatrix],
    b_list: &[PositiveDefiniteMatrix],
    c_list: &[PositiveDefiniteMatrix],
) -> Result<TrialReport> {
    require_exact(tuple, "check_gt_extended")?;
    for len in [a_list.len(), b_list.len(), c_list.len()] {
        tuple.require_len(len)?;
    }
    let mixed = a_list
        .iter()
        .zip(b_list)
        .zip(c_list)
        .map(|((a, b), c)| matrix_log(b).try_add(&matrix_log(c))?.try_sub(&matrix_log(a)))
        .collect::<Result<Vec<_>>>()?;
    let lhs = trace_real(matrix_exp(&tuple.congruence_sum(&mixed)?)?.matrix())?;
    let weights = frechet_congruence_sum(tuple, a_list, b_list)?;
    let rhs = trace_exp_times(&tuple.log_congruence_sum(c_list)?, &weights)?;
    Ok(TrialReport::inequality("gt-extended", lhs, rhs, tuple.dims()))
}

/// A finitely supported distribution over tuples of Hermitian matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    atoms: Vec<(f64, Vec<HermitianMatrix>)>,
}

impl DiscreteDistribution {
    pub const WEIGHT_TOL: f64 = 1e-12;

    pub fn new(atoms: Vec<(f64, Vec<HermitianMatrix>)>) -> Result<Self> {
        let first = atoms
            .first()
            .ok_or_else(|| Error::InvalidArgument("distribution has no atoms".into()))?;
        let shape: Vec<usize> = first.1.iter().map(|m| m.dim()).collect();
        if shape.is_empty() {
            return Err(Error::InvalidArgument("atoms must carry at least one matrix".into()));
        }
        for (w, tuple) in &atoms {
            if !(*w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidArgument(format!("atom weight must be positive, got {w}")));
            }
            let dims: Vec<usize> = tuple.iter().map(|m| m.dim()).collect();
            if dims != shape {
                return Err(Error::DimensionMismatch {
                    context: "distribution atoms",
                    expected: format!("{shape:?}"),
                    found: format!("{dims:?}"),
                });
            }
        }
        let total: f64 = atoms.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > Self::WEIGHT_TOL {
            return Err(Error::InvalidArgument(format!(
                "atom weights sum to {total}, expected 1"
            )));
        }
        Ok(Self { atoms })
    }

    pub fn atoms(&self) -> &[(f64, Vec<HermitianMatrix>)] {
        &self.atoms
    }

    pub fn slots(&self) -> usize {
        self.atoms[0].1.len()
    }

    /// `E exp(A_slot)`, exact over the atoms.
    pub fn mean_exp(&self, slot: usize) -> Result<PositiveDefiniteMatrix> {
        let dim = self.atoms[0].1[slot].dim();
        let mut acc = HermitianMatrix::zeros(dim);
        for (w, tuple) in &self.atoms {
            acc = acc.try_add(&matrix_exp(&tuple[slot])?.hermitian().scale(*w))?;
        }
        PositiveDefiniteMatrix::new(acc)
    }
}

/// `E Tr exp(L + Σ H_i* A_i H_i) ≤ Tr exp(L + Σ H_i* log(E e^{A_i}) H_i)`.
pub fn check_expectation(
    l: &HermitianMatrix,
    tuple: &ContractionTuple,
    dist: &DiscreteDistribution,
) -> Result<TrialReport> {
    require_dim(tuple.m(), l.dim(), "L")?;
    tuple.require_len(dist.slots())?;
    let mut lhs = 0.0;
    for (w, atom) in dist.atoms() {
        let exponent = l.try_add(&tuple.congruence_sum(atom)?)?;
        lhs += w * trace_real(matrix_exp(&exponent)?.matrix())?;
    }
    let means = (0..dist.slots())
        .map(|slot| dist.mean_exp(slot))
        .collect::<Result<Vec<_>>>()?;
    let spec = PhiSpec::new(Some(l.clone()), tuple.clone())?;
    let rhs = phi_multi(&spec, &means)?;
    Ok(TrialReport::inequality("expectation", lhs, rhs, tuple.dims()))
}

/// Free energy and its lower bound at inverse temperature `beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelmholtzBound {
    pub beta: f64,
    /// `−(1/β) log Tr exp(βL + Σ H_i* βB_i H_i)`.
    pub free_energy: f64,
    /// `−(1/β) log Tr exp(βL) Σ H_i* exp(βB_i) H_i`.
    pub bound: f64,
}

impl HelmholtzBound {
    pub fn gap(&self) -> f64 {
        self.free_energy - self.bound
    }
}

/// Thin monotone transform of the multivariate Golden-Thompson inequality:
/// inputs are scaled by `beta` and both sides mapped through `−(1/β) log`.
pub fn helmholtz_bound(
    l: &HermitianMatrix,
    tuple: &ContractionTuple,
    b_list: &[HermitianMatrix],
    beta: f64,
) -> Result<HelmholtzBound> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")));
    }
    let scaled: Vec<HermitianMatrix> = b_list.iter().map(|b| b.scale(beta)).collect();
    let report = check_gt_multi(&l.scale(beta), tuple, &scaled)?;
    if !(report.lhs > 0.0 && report.rhs > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "partition functions must be positive (lhs {}, rhs {})",
            report.lhs, report.rhs
        )));
    }
    Ok(HelmholtzBound {
        beta,
        free_energy: -report.lhs.ln() / beta,
        bound: -report.rhs.ln() / beta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tracefn::Resolution;

    fn herm(rows: &[&[f64]]) -> HermitianMatrix {
        HermitianMatrix::new(ComplexMatrix::from_real_rows(rows)).unwrap()
    }

    fn pd(diag: &[f64]) -> PositiveDefiniteMatrix {
        PositiveDefiniteMatrix::from_real_diagonal(diag).unwrap()
    }

    fn sigma_x() -> HermitianMatrix {
        herm(&[&[0.0, 1.0], &[1.0, 0.0]])
    }

    #[test]
    fn gt_multi_closed_form_pair() {
        let r = check_gt_multi(
            &sigma_x(),
            &ContractionTuple::identity(2),
            &[HermitianMatrix::from_real_diagonal(&[1.0, -1.0])],
        )
        .unwrap();
        let lhs = 2.0 * 2f64.sqrt().cosh();
        let rhs = 2.0 * 1f64.cosh().powi(2);
        assert!((r.lhs - lhs).abs() < 1e-13, "{} vs {lhs}", r.lhs);
        assert!((r.rhs - rhs).abs() < 1e-13, "{} vs {rhs}", r.rhs);
        assert!((lhs - 4.356_4).abs() < 1e-4 && (rhs - 4.762_2).abs() < 1e-4);
        assert!(r.pass);
    }

    #[test]
    fn gt_multi_zero_b_is_equality() {
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let tuple = ContractionTuple::new(
            vec![ComplexMatrix::identity(2).scale(c), ComplexMatrix::identity(2).scale(c)],
            Resolution::Exact,
        )
        .unwrap();
        let z = HermitianMatrix::zeros(2);
        let r = check_gt_multi(&sigma_x(), &tuple, &[z.clone(), z]).unwrap();
        assert!((r.lhs - r.rhs).abs() < 1e-13);
        assert!(r.pass);
    }

    #[test]
    fn gt_multi_rejects_sub_resolution() {
        let sub = ContractionTuple::new(vec![ComplexMatrix::identity(1).scale(0.5)], Resolution::Sub)
            .unwrap();
        let z = HermitianMatrix::zeros(1);
        assert!(check_gt_multi(&z, &sub, std::slice::from_ref(&z)).is_err());
    }

    #[test]
    fn classical_gt_cases() {
        let l = sigma_x();
        let r = check_classical_gt(&l, &HermitianMatrix::zeros(2)).unwrap();
        assert!((r.lhs - r.rhs).abs() < 1e-13 && r.pass);

        let commuting = check_classical_gt(
            &HermitianMatrix::from_real_diagonal(&[0.3, -1.0]),
            &HermitianMatrix::from_real_diagonal(&[2.0, 0.5]),
        )
        .unwrap();
        assert!((commuting.lhs - commuting.rhs).abs() <= 1e-10 * commuting.rhs);

        let r = check_classical_gt(&l, &HermitianMatrix::from_real_diagonal(&[1.0, -1.0])).unwrap();
        assert!((r.lhs - 2.0 * 2f64.sqrt().cosh()).abs() < 1e-13);
        assert!(r.pass);
    }

    #[test]
    fn interpolation_reduces_to_classical_at_equal_arguments() {
        let l = sigma_x();
        let a = herm(&[&[0.4, -0.3], &[-0.3, 1.1]]);
        let interp = check_interpolation(&l, &a, &a).unwrap();
        let classical = check_classical_gt(&l, &a).unwrap();
        assert!((interp.lhs - classical.lhs).abs() <= 1e-12 * classical.lhs);
        assert!((interp.rhs - classical.rhs).abs() <= 1e-12 * classical.rhs);
    }

    #[test]
    fn interpolation_jensen_case() {
        let z = HermitianMatrix::zeros(2);
        let a = herm(&[&[1.0, 0.5], &[0.5, -1.0]]);
        let b = HermitianMatrix::from_real_diagonal(&[-0.5, 2.0]);
        let r = check_interpolation(&z, &a, &b).unwrap();
        let mean = a.try_add(&b).unwrap().scale(0.5);
        let direct = trace_real(matrix_exp(&mean).unwrap().matrix()).unwrap();
        assert!((r.lhs - direct).abs() < 1e-12 * direct);
        assert!(r.pass && r.slack > 0.0);
    }

    #[test]
    fn q_contraction_identity_and_scalar() {
        let a = pd(&[2.0, 5.0]);
        let b = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[-1.0, 0.0]]);
        let r = check_q_contraction(&ComplexMatrix::identity(2), &a, &b).unwrap();
        assert!((r.lhs - r.rhs).abs() < 1e-13 && r.pass);

        let (c, av, bv) = (0.6, 3.0, 2.0);
        let r = check_q_contraction(
            &ComplexMatrix::from_real_rows(&[&[c]]),
            &pd(&[av]),
            &ComplexMatrix::from_real_rows(&[&[bv]]),
        )
        .unwrap();
        assert!((r.lhs - bv * bv / (c * c * av)).abs() < 1e-12);
        assert!((r.rhs - bv * bv / (c.powi(4) * av)).abs() < 1e-12);
        assert!(r.pass);
    }

    #[test]
    fn q_contraction_rejections() {
        let a = pd(&[1.0]);
        let b = ComplexMatrix::from_real_rows(&[&[1.0]]);
        assert!(matches!(
            check_q_contraction(&ComplexMatrix::from_real_rows(&[&[1.5]]), &a, &b),
            Err(Error::NotContraction { .. })
        ));
        let singular = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 1e-14]]);
        assert!(matches!(
            check_q_contraction(&singular, &pd(&[1.0, 1.0]), &ComplexMatrix::identity(2)),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn lemma_equality_when_b_equals_a_scalar() {
        let a = pd(&[3.0]);
        let r = check_lemma_main(
            &HermitianMatrix::from_real_diagonal(&[0.2]),
            &ContractionTuple::identity(1),
            std::slice::from_ref(&a),
            std::slice::from_ref(&a),
        )
        .unwrap();
        assert!((r.lhs - r.rhs).abs() < 1e-13);
    }

    #[test]
    fn lemma_at_identity_matches_gt_multi() {
        let l = sigma_x();
        let b = herm(&[&[0.5, 0.2], &[0.2, -0.7]]);
        let expb = matrix_exp(&b).unwrap();
        let lemma = check_lemma_main(
            &l,
            &ContractionTuple::identity(2),
            &[PositiveDefiniteMatrix::identity(2)],
            &[expb],
        )
        .unwrap();
        let gt = check_gt_multi(&l, &ContractionTuple::identity(2), &[b]).unwrap();
        assert!((lemma.lhs - gt.lhs).abs() <= 1e-12 * gt.lhs);
        assert!((lemma.rhs - gt.rhs).abs() <= 1e-12 * gt.rhs);
    }

    #[test]
    fn logdiff_classical_and_equal_arguments() {
        let a = PositiveDefiniteMatrix::from_matrix(ComplexMatrix::from_real_rows(&[
            &[2.0, 0.5],
            &[0.5, 1.0],
        ]))
        .unwrap();
        let b = pd(&[0.7, 3.0]);
        let r = check_gt_logdiff(&ContractionTuple::identity(2), std::slice::from_ref(&a), std::slice::from_ref(&b)).unwrap();
        let tr_ainv_b = trace_real(&a.matrix().try_inverse().unwrap().try_mul(b.matrix()).unwrap())
            .unwrap();
        assert!((r.rhs - tr_ainv_b).abs() < 1e-12 * tr_ainv_b);
        assert!(r.pass);

        let same = check_gt_logdiff(&ContractionTuple::identity(2), std::slice::from_ref(&a), std::slice::from_ref(&a)).unwrap();
        assert!((same.lhs - 2.0).abs() < 1e-13 && (same.rhs - 2.0).abs() < 1e-13);
    }

    #[test]
    fn logdiff_commuting_pair_closed_form() {
        let a = pd(&[1.5, 0.25]);
        let b = pd(&[4.0, 0.5]);
        let tuple = ContractionTuple::identity(2);
        let r = check_gt_logdiff(&tuple, std::slice::from_ref(&a), std::slice::from_ref(&b)).unwrap();
        let closed = commuting_logdiff_rhs(&tuple, &[a], &[b]).unwrap();
        assert!((r.rhs - closed).abs() < 1e-12);
        assert!((closed - (4.0 / 1.5 + 2.0)).abs() < 1e-13);
    }

    #[test]
    fn extended_reduces_when_c_equals_a() {
        let a = PositiveDefiniteMatrix::from_matrix(ComplexMatrix::from_real_rows(&[
            &[1.0, 0.3],
            &[0.3, 2.0],
        ]))
        .unwrap();
        let b = pd(&[0.5, 1.7]);
        let t = ContractionTuple::identity(2);
        let ext = check_gt_extended(&t, std::slice::from_ref(&a), std::slice::from_ref(&b), std::slice::from_ref(&a)).unwrap();
        let logdiff = check_gt_logdiff(&t, std::slice::from_ref(&a), std::slice::from_ref(&b)).unwrap();
        // Σ H*(log B + log A − log A)H = log B, and Tr A·d log(A)B = Tr B
        assert!((ext.lhs - trace_real(b.matrix()).unwrap()).abs() < 1e-12 * ext.lhs);
        assert!((ext.rhs - ext.lhs).abs() < 1e-12 * ext.lhs);
        assert!(ext.pass && logdiff.pass);
    }

    #[test]
    fn expectation_single_atom_is_equality() {
        let l = sigma_x();
        let a = herm(&[&[0.1, 0.4], &[0.4, -0.3]]);
        let dist = DiscreteDistribution::new(vec![(1.0, vec![a])]).unwrap();
        let r = check_expectation(&l, &ContractionTuple::identity(2), &dist).unwrap();
        assert!((r.lhs - r.rhs).abs() < 1e-12 * r.rhs);
    }

    #[test]
    fn expectation_scalar_two_atoms() {
        // with H = 1, L = 0 both sides are E e^a; with H = √p the bound is strict
        let h = ContractionTuple::new(vec![ComplexMatrix::identity(1).scale(0.5f64.sqrt())], Resolution::Sub)
            .unwrap();
        let dist = DiscreteDistribution::new(vec![
            (0.5, vec![HermitianMatrix::from_real_diagonal(&[-1.0])]),
            (0.5, vec![HermitianMatrix::from_real_diagonal(&[2.0])]),
        ])
        .unwrap();
        let r = check_expectation(&HermitianMatrix::zeros(1), &h, &dist).unwrap();
        let lhs = 0.5 * ((-0.5f64).exp() + 1f64.exp());
        let rhs = (0.5 * (0.5 * ((-1f64).exp() + 2f64.exp())).ln()).exp();
        assert!((r.lhs - lhs).abs() < 1e-14 && (r.rhs - rhs).abs() < 1e-14);
        assert!(r.slack > 0.0);
    }

    #[test]
    fn distribution_validation() {
        assert!(DiscreteDistribution::new(vec![]).is_err());
        let z = HermitianMatrix::zeros(1);
        assert!(DiscreteDistribution::new(vec![(0.5, vec![z.clone()])]).is_err());
        assert!(DiscreteDistribution::new(vec![(1.0, vec![])]).is_err());
        assert!(DiscreteDistribution::new(vec![
            (0.5, vec![z.clone()]),
            (0.5, vec![HermitianMatrix::zeros(2)])
        ])
        .is_err());
    }

    #[test]
    fn helmholtz_zero_b_has_no_gap() {
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let tuple = ContractionTuple::new(
            vec![ComplexMatrix::identity(2).scale(c), ComplexMatrix::identity(2).scale(c)],
            Resolution::Exact,
        )
        .unwrap();
        let z = HermitianMatrix::zeros(2);
        let h = helmholtz_bound(&sigma_x(), &tuple, &[z.clone(), z], 2.0).unwrap();
        assert!(h.gap().abs() < 1e-14);
        assert!(helmholtz_bound(&sigma_x(), &tuple, &[], 0.0).is_err());
    }

    #[test]
    fn helmholtz_classical_case() {
        let b = HermitianMatrix::from_real_diagonal(&[1.0, -1.0]);
        let h = helmholtz_bound(&sigma_x(), &ContractionTuple::identity(2), std::slice::from_ref(&b), 1.0).unwrap();
        let gt = check_classical_gt(&sigma_x(), &b).unwrap();
        assert!((h.free_energy + gt.lhs.ln()).abs() < 1e-14);
        assert!((h.bound + gt.rhs.ln()).abs() < 1e-14);
        assert!(h.free_energy >= h.bound);
    }
}
