use super::{Capture, HarnessConfig};
use crate::calculus::{check_dq_inequality, check_homogeneous_convex_quotient, q_form, FormPoint, HomogeneousForm};
use crate::error::{Error, Result};
use crate::inequalities::{
    check_classical_gt, check_expectation, check_gt_extended, check_gt_logdiff, check_gt_multi,
    check_interpolation, check_lemma_main, check_q_contraction, commuting_logdiff_rhs,
    DiscreteDistribution,
};
use crate::matcore::{matrix_exp, matrix_log, trace_real, ComplexMatrix, HermitianMatrix, PositiveDefiniteMatrix};
use crate::randgen::{
    rand_commuting_pair, rand_contraction_tuple, rand_direction_within, rand_hermitian,
    rand_invertible_contraction, rand_pd, Stream,
};
use crate::report::{Dims, TrialReport};
use crate::tracefn::{
    absorb_l_term, check_block_identity, check_homogeneity, concavity_midpoint_probe,
    concavity_second_derivative_probe, phi_multi, ContractionTuple, Evaluator, PhiSpec, Resolution,
};

const T_GRID: [f64; 6] = [1e-3, 1e-2, 0.1, 0.25, 0.5, 1.0];
const FD_STEP: f64 = 1e-3;
const REDUCTION_REL: f64 = 1e-12;
const COMMUTING_REL: f64 = 1e-9;
const ABSORB_REL: f64 = 1e-10;

fn herm(cfg: &HarnessConfig, n: usize, s: &mut Stream) -> Result<HermitianMatrix> {
    rand_hermitian(n, cfg.gen.scale, s)
}

fn herms(cfg: &HarnessConfig, n: usize, count: usize, s: &mut Stream) -> Result<Vec<HermitianMatrix>> {
    (0..count).map(|_| herm(cfg, n, s)).collect()
}

fn pd(cfg: &HarnessConfig, n: usize, s: &mut Stream) -> Result<PositiveDefiniteMatrix> {
    rand_pd(n, cfg.gen.cond_cap, s)
}

fn pds(cfg: &HarnessConfig, n: usize, count: usize, s: &mut Stream) -> Result<Vec<PositiveDefiniteMatrix>> {
    (0..count).map(|_| pd(cfg, n, s)).collect()
}

fn exact_tuple(cfg: &HarnessConfig, s: &mut Stream) -> Result<ContractionTuple> {
    let (n, m, k) = cfg.gen.draw_dims(s, true);
    rand_contraction_tuple(k, n, m, true, s)
}

/// Exact or sub resolution with equal odds.
fn any_tuple(cfg: &HarnessConfig, s: &mut Stream) -> Result<ContractionTuple> {
    let exact = s.uniform() < 0.5;
    let (n, m, k) = cfg.gen.draw_dims(s, exact);
    rand_contraction_tuple(k, n, m, exact, s)
}

fn dim(range: (usize, usize), s: &mut Stream) -> usize {
    s.integer(range.0, range.1)
}

fn spec_with_l(cfg: &HarnessConfig, tuple: ContractionTuple, s: &mut Stream, cap: &mut Capture) -> Result<PhiSpec> {
    let l = herm(cfg, tuple.m(), s)?;
    cap.hermitian("L", &l);
    cap.tuple("H", &tuple);
    PhiSpec::new(Some(l), tuple)
}

fn relative_deviation(pairs: &[(f64, f64)]) -> f64 {
    pairs
        .iter()
        .map(|&(a, b)| (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

/// Bound report on the largest relative disagreement among `pairs`.
fn agreement(suite: &str, pairs: &[(f64, f64)], tolerance: f64, dims: Dims) -> TrialReport {
    TrialReport::bound(suite, relative_deviation(pairs), 0.0, tolerance, dims)
}

pub(super) fn q_contraction(cfg: &HarnessConfig, s: &mut Stream, cap: &mut Capture) -> Result<TrialReport> {
    let n = dim(cfg.gen.n_range, s);
    let x = rand_invertible_contraction(n, cfg.gen.min_singular, s)?;
    let a = pd(cfg, n, s)?;
    let b = s.complex_gaussian_matrix(n, n);
    cap.matrix("X", &x);
    cap.pd("A", &a);
    cap.matrix("B", &b);
    check_q_contraction(&x, &a, &b)
}

pub(super) fn dq_quotient(cfg: &HarnessConfig, s: &mut Stream, cap: &mut Capture) -> Result<TrialReport> {
    let n = dim(cfg.gen.n_range, s);
    let x = pd(cfg, n, s)?;
    let h = s.complex_gaussian_matrix(n, n);
    let y = pd(cfg, n, s)?;
    let k = s.complex_gaussian_matrix(n, n);
    cap.pd("x", &x);
    cap.matrix("h", &h);
    cap.pd("y", &y);
    cap.matrix("k", &k);
    check_dq_inequality(&x, &h, &y, &k, &T_GRID)
}

/// `Q(x, h) ≥ 0`, reported as `−Q ≤ 0` within `1e-12`.
pub(super) fn q_positivity(cfg: &HarnessConfig, s: &mut Stream, cap: &mut Capture) -> Result<TrialReport> {
    let n = dim(cfg.gen.n_range, s);
    let x = pd(cfg, n, s)?;
    let h = s.complex_gaussian_matrix(n, n);
    cap.pd("x", &x);
    cap.matrix("h", &h);
    let q = q_form(&x, &h)?;
    Ok(TrialReport::bound("q-positivity", -q, 0.0, 1e-12, Dims::square(n)))
}

pub(super) fn q_homogeneity(cfg: &HarnessConfig, s: &mut Stream, cap: &mut Capture) -> Result<TrialReport> {
    let n = dim(cfg.gen.n_range, s);
    let x = pd(cfg, n, s)?;
    let h = s.complex_gaussian_matrix(n, n);
    let t = s.uniform_in(0.1, 10.0);
    cap.pd("x", &x);
    cap.matrix("h", &h);
    cap.scalar("t", t);
    let lhs = q_form(&x.scale(t)?, &h.scale(t))?;
    let rhs = t * q_form(&x, &h)?;
    Ok(TrialReport::relative_identity("q-homogeneity", lhs, rhs, 1e-10, Dims::square(n)))
}

pub(super) fn q_midpoint(cfg: &HarnessConfig, s: &mut Stream, cap: &mut Capture) -> Result<TrialReport> {
    let n = dim(cfg.gen.n_range, s);
    let x0 = pd(cfg, n, s)?;
    let h0 = s.complex_gaussian_matrix(n, n);
    let x1 = pd(cfg, n, s)?;
    let h1 = s.complex_gaussian_matrix(n, n);
    cap.pd("x0", &x0);
    cap.matrix("h0", &h0);
    cap.pd("x1", &x1);
    cap.matrix("h1", &h1);
    let xm = PositiveDefiniteMatrix::new(x0.hermitian().try_add(x1.hermitian())?.scale(0.5))?;
    let hm = h0.try_add(&h1)?.scale(0.5);
    let lhs = q_form(&xm, &hm)?;
    let rhs = 0.5 * (q_form(&x0, &h0)? + q_form(&x1, &h1)?);
    Ok(TrialReport::inequality("q-midpoint", lhs, rhs, Dims::square(n)))
}

fn single_contraction(cfg: &HarnessConfig, s: &mut Stream) -> Result<ComplexMatrix> {
    let n = dim(cfg.gen.n_range, s);
    let m = dim(cfg.gen.m_range, s);
    let exact = n >= m && s.uniform() < 0.5;
    let tuple = rand_contraction_tuple(1, n, m, exact, s)?;
    Ok(tuple.blocks()[0].clone())
}

pub(super) fn phi_single_midpoint(cfg: &HarnessConfig, s: &mut Stream, cap: &mut Capture) -> Result<TrialReport> {
    let h = single_contraction(cfg, s)?;
    let a0 = pd(cfg, h.rows(), s)?;
    let a1 = pd(cfg, h.rows(), s)?;
    cap.matrix("H", &h);
    cap.pd("A0", &a0);
    cap.pd("A1", &a1);
    concavity_midpoint_probe(&Evaluator::Single(h), &[a0], &[a1])
}

pub(super) fn phi_multi_midpoint(cfg: &HarnessConfig, s: &mut Stream, cap: &mut Capture) -> Result<TrialReport> {
    let tuple = any_tuple(cfg, s)?;
    let (n, k) = (tuple.n(), tuple.k());
    let spec = spec_with_l(cfg, tuple, s, cap)?;
    let p0 = pds(cfg, n, k, s)?;
    let p1 = pds(cfg, n, k, s)?;
    cap.pds("A0", &p0);
    cap.pds("A1", &p1);
    concavity_midpoint_probe(&Evaluator::Multi(spec), &p0, &p1)
}

/// `H_i = √p_i · I` with `Σ p_i ≤ 1`.
fn scalar_weight_tuple(cfg: &HarnessConfig, n: usize, s: &mut Stream, cap: &mut Capture) -> Result<ContractionTuple> {
    let k = dim(cfg.gen.k_range, s);
    let total = s.uniform_in(0.5, 1.0);
    let raw: Vec<f64> = (0..k).map(|_| s.uniform_in(0.1, 1.0)).collect();
    let sum: f64 = raw.iter().sum();
    let weights: Vec<f64> = raw.iter().map(|w| total * w / sum).collect();
    cap.scalars("p", &weights);
    ContractionTuple::scalar_weights(n, &weights)
}

pub(super) fn lieb_midpoint(cfg: &HarnessConfig, s: &mut Stream, cap: &mut Capture) -> Result<TrialReport> {
    let n = dim(cfg.gen.n_range, s);
    let tuple = scalar_weight_tuple(cfg, n, s, cap)?;
    let k = tuple.k();
    let spec = spec_with_l(cfg, tuple, s, cap)?;
    let p0 = pds(cfg, n, k, s)?;
    let p1 = pds(cfg, n, k, s)?;
    cap.pds("A0", &p0);
    cap.pds("A1", &p1);
    concavity_midpoint_probe(&Evaluator::Multi(spec), &p0, &p1)
}

fn second_difference(
    evaluator: &Evaluator,
    point: &[PositiveDefiniteMatrix],
    direction: &[HermitianMatrix],
) -> Result<TrialReport> {
    let mut step = FD_STEP;
    loop {
        match concavity_second_derivative_probe(evaluator, point, direction, step) {
            Err(Error::ShrinkStep { .. }) if step > FD_STEP / 1024.0 => step /= 2.0,
            other => return other,
        }
    }
}

pub(super) fn phi_single_second_difference(
    cfg: &HarnessConfig,
    s: &mut Stream,
    cap: &mut Capture,
) -> Result<TrialReport> {
    let h = single_contraction(cfg, s)?;
    let a = pd(cfg, h.rows(), s)?;
    let d = rand_direction_within(&a, 1.0, s)?;
    cap.matrix("H", &h);
    cap.pd("A", &a);
    cap.hermitian("D", &d);
    second_difference(&Evaluator::Single(h), &[a], &[d])
}

pub(super) fn phi_multi_second_difference(
    cfg: &HarnessConfig,
    s: &mut Stream,
    cap: &mut Capture,
) -> Result<TrialReport> {
    let tuple = any_tuple(cfg, s)?;
    let (n, k) = (tuple.n(), tuple.k());
    let spec = spec_with_l(cfg, tuple, s, cap)?;
    let point = pds(cfg, n, k, s)?;
    let direction = point
        .iter()
        .map(|a| rand_direction_within(a, 1.0, s))
        .collect::<Result<Vec<_>>>()?;
    cap.pds("A", &point);
    cap.hermitians("D", &direction);
    second_difference(&Evaluator::Multi(spec), &point, &direction)
}

pub(super) fn phi_quotient(cfg: &HarnessConfig, s: &mut Stream, cap: &mut Capture) -> Result<TrialReport> {
    let tuple = exact_tuple(cfg, s)?;
    let (n, k) = (tuple.n(), tuple.k());
    let spec = spec_with_l(cfg, tuple, s, cap)?;
    let x = pds(cfg, n, k, s)?;
    let h = pds(cfg, n, k, s)?;
    cap.pds("x", &x);
    cap.pds("h", &h);
    let form = HomogeneousForm::from_name("phi_multi", Some(spec))?;
    check_homogeneous_convex_quotient(&form, &FormPoint::Tuple(x), &FormPoint::Tuple(h), &T_GRID)
}

pub(super) fn gt_multi(cfg: &HarnessConfig, s: &mut Stream, cap: &mut Capture) -> Result<TrialReport> {
    let tuple = exact_tuple(cfg, s)?;
    let l = herm(cfg, tuple.m(), s)?;
    let b = herms(cfg, tuple.n(), tuple.k(), s)?;
    cap.hermitian("L", &l);
    cap.tuple("H", &tuple);
    cap.hermitians("B", &b);
    check_gt_multi(&l, &tuple, &b)
}

pub(super) fn classical_gt(cfg: &HarnessConfig, s: &mut Stream, cap: &mut Capture) -> Result<TrialReport> {
    let n = dim(cfg.gen.n_range, s);
    let l = herm(cfg, n, s)?;
    let b = herm(cfg, n, s)?;
    cap.hermitian("L", &l);
    cap.hermitians("B", std::slice::from_ref(&b));
    check_classical_gt(&l, &b)
}

pub(super) fn gt_logdiff(cfg: &HarnessConfig, s: &mut Stream, cap: &mut Capture) -> Result<TrialReport> {
    let tuple = exact_tuple(cfg, s)?;
    let a = pds(cfg, tuple.n(), tuple.k(), s)?;
    let b = pds(cfg, tuple.n(), tuple.k(), s)?;
    cap.tuple("H", &tuple);
    cap.pds("A", &a);
    cap.pds("B", &b);
    check_gt_logdiff(&tuple, &a, &b)
}

pub(super) fn gt_extended(cfg: &HarnessConfig, s: &mut Stream, cap: &mut Capture) -> Result<TrialReport> {
    let tuple = exact_tuple(cfg, s)?;
    let a = pds(cfg, tuple.n(), tuple.k(), s)?;
    let b = pds(cfg, tuple.n(), tuple.k(), s)?;
    let c = pds(cfg, tuple.n(), tuple.k(), s)?;
    cap.tuple("H", &tuple);
    cap.pds("A", &a);
    cap.pds("B", &b);
    cap.pds("C", &c);
    check_gt_extended(&tuple, &a, &b, &c)
}

pub(super) fn interpolation(cfg: &HarnessConfig, s: &mut Stream, cap: &mut Capture) -> Result<TrialReport> {
    let n = dim(cfg.gen.n_range, s);
    let l = herm(cfg, n, s)?;
    let a = herm(cfg, n, s)?;
    let b = herm(cfg, n, s)?;
    cap.hermitian("L", &l);
    cap.hermitians("A", std::slice::from_ref(&a));
    cap.hermitians("B", std::slice::from_ref(&b));
    check_interpolation(&l, &a, &b)
}

pub(super) fn lemma(cfg: &HarnessConfig, s: &mut Stream, cap: &mut Capture) -> Result<TrialReport> {
    let tuple = exact_tuple(cfg, s)?;
    let l = herm(cfg, tuple.m(), s)?;
    let a = pds(cfg, tuple.n(), tuple.k(), s)?;
    let b = pds(cfg, tuple.n(), tuple.k(), s)?;
    cap.hermitian("L", &l);
    cap.tuple("H", &tuple);
    cap.pds("A", &a);
    cap.pds("B", &b);
    check_lemma_main(&l, &tuple, &a, &b)
}

pub(super) fn expectation(cfg: &HarnessConfig, s: &mut Stream, cap: &mut Capture) -> Result<TrialReport> {
    let tuple = any_tuple(cfg, s)?;
    let l = herm(cfg, tuple.m(), s)?;
    let atoms = s.integer(2, 4);
    let raw: Vec<f64> = (0..atoms).map(|_| s.uniform_in(0.1, 1.0)).collect();
    let sum: f64 = raw.iter().sum();
    let mut weights: Vec<f64> = raw.iter().map(|w| w / sum).collect();
    let head: f64 = weights[..atoms - 1].iter().sum();
    weights[atoms - 1] = 1.0 - head;
    let mut support = Vec::with_capacity(atoms);
    for &w in &weights {
        support.push((w, herms(cfg, tuple.n(), tuple.k(), s)?));
    }
    cap.hermitian("L", &l);
    cap.tuple("H", &tuple);
    cap.scalars("weights", &weights);
    for (i, (_, atom)) in support.iter().enumerate() {
        cap.hermitians(&format!("atom{i}"), atom);
    }
    let dist = DiscreteDistribution::new(support)?;
    check_expectation(&l, &tuple, &dist)
}

pub(super) fn block_identity(cfg: &HarnessConfig, s: &mut Stream, cap: &mut Capture) -> Result<TrialReport> {
    let tuple = exact_tuple(cfg, s)?;
    let a = pds(cfg, tuple.n(), tuple.k(), s)?;
    cap.tuple("H", &tuple);
    cap.pds("A", &a);
    check_block_identity(&tuple, &a)
}

/// `check_gt_multi(k=1, H=I)`, `check_classical_gt` and
/// `check_interpolation(A=B)` on the same `(L, B)`.
pub(super) fn reduction_classical(cfg: &HarnessConfig, s: &mut Stream, cap: &mut Capture) -> Result<TrialReport> {
    let n = dim(cfg.gen.n_range, s);
    let l = herm(cfg, n, s)?;
    let b = herm(cfg, n, s)?;
    cap.hermitian("L", &l);
    cap.hermitians("B", std::slice::from_ref(&b));
    let multi = check_gt_multi(&l, &ContractionTuple::identity(n), std::slice::from_ref(&b))?;
    let classical = check_classical_gt(&l, &b)?;
    let interp = check_interpolation(&l, &b, &b)?;
    let pairs = [
        (multi.lhs, classical.lhs),
        (multi.rhs, classical.rhs),
        (multi.lhs, interp.lhs),
        (multi.rhs, interp.rhs),
    ];
    Ok(agreement("reduction-classical", &pairs, REDUCTION_REL, Dims::square(n)))
}

/// `check_lemma_main` with `A_i = I` and `B_i ← exp(B_i)` against `check_gt_multi`.
pub(super) fn reduction_lemma_gt(cfg: &HarnessConfig, s: &mut Stream, cap: &mut Capture) -> Result<TrialReport> {
    let tuple = exact_tuple(cfg, s)?;
    let l = herm(cfg, tuple.m(), s)?;
    let b = herms(cfg, tuple.n(), tuple.k(), s)?;
    cap.hermitian("L", &l);
    cap.tuple("H", &tuple);
    cap.hermitians("B", &b);
    let gt = check_gt_multi(&l, &tuple, &b)?;
    let identities = vec![PositiveDefiniteMatrix::identity(tuple.n()); tuple.k()];
    let exps = b.iter().map(matrix_exp).collect::<Result<Vec<_>>>()?;
    let lemma = check_lemma_main(&l, &tuple, &identities, &exps)?;
    let pairs = [(gt.lhs, lemma.lhs), (gt.rhs, lemma.rhs)];
    Ok(agreement("reduction-lemma-gt", &pairs, REDUCTION_REL, tuple.dims()))
}

/// `check_lemma_main` with `L = −Σ H_i* log(A_i) H_i` against `check_gt_logdiff`.
pub(super) fn reduction_lemma_logdiff(cfg: &HarnessConfig, s: &mut Stream, cap: &mut Capture) -> Result<TrialReport> {
    let tuple = exact_tuple(cfg, s)?;
    let a = pds(cfg, tuple.n(), tuple.k(), s)?;
    let b = pds(cfg, tuple.n(), tuple.k(), s)?;
    cap.tuple("H", &tuple);
    cap.pds("A", &a);
    cap.pds("B", &b);
    let logdiff = check_gt_logdiff(&tuple, &a, &b)?;
    let l = tuple.log_congruence_sum(&a)?.scale(-1.0);
    let lemma = check_lemma_main(&l, &tuple, &a, &b)?;
    let pairs = [(logdiff.lhs, lemma.lhs), (logdiff.rhs, lemma.rhs)];
    Ok(agreement("reduction-lemma-logdiff", &pairs, REDUCTION_REL, tuple.dims()))
}

/// `check_lemma_main` with `L = Σ H_i* (log C_i − log A_i) H_i` against `check_gt_extended`.
pub(super) fn reduction_lemma_extended(cfg: &HarnessConfig, s: &mut Stream, cap: &mut Capture) -> Result<TrialReport> {
    let tuple = exact_tuple(cfg, s)?;
    let a = pds(cfg, tuple.n(), tuple.k(), s)?;
    let b = pds(cfg, tuple.n(), tuple.k(), s)?;
    let c = pds(cfg, tuple.n(), tuple.k(), s)?;
    cap.tuple("H", &tuple);
    cap.pds("A", &a);
    cap.pds("B", &b);
    cap.pds("C", &c);
    let extended = check_gt_extended(&tuple, &a, &b, &c)?;
    let l = tuple.log_congruence_sum(&c)?.try_sub(&tuple.log_congruence_sum(&a)?)?;
    let lemma = check_lemma_main(&l, &tuple, &a, &b)?;
    let pairs = [(extended.lhs, lemma.lhs), (extended.rhs, lemma.rhs)];
    Ok(agreement("reduction-lemma-extended", &pairs, REDUCTION_REL, tuple.dims()))
}

/// For commuting pairs the right side of `check_gt_logdiff` is `Σ Tr H_i* B_i A_i⁻¹ H_i`.
pub(super) fn reduction_commuting(cfg: &HarnessConfig, s: &mut Stream, cap: &mut Capture) -> Result<TrialReport> {
    let tuple = exact_tuple(cfg, s)?;
    let spread = 0.5 * cfg.gen.cond_cap.ln();
    let (a, b): (Vec<_>, Vec<_>) = (0..tuple.k())
        .map(|_| rand_commuting_pair(tuple.n(), spread, s))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    cap.tuple("H", &tuple);
    cap.pds("A", &a);
    cap.pds("B", &b);
    let report = check_gt_logdiff(&tuple, &a, &b)?;
    let closed = commuting_logdiff_rhs(&tuple, &a, &b)?;
    Ok(agreement("reduction-commuting", &[(report.rhs, closed)], COMMUTING_REL, tuple.dims()))
}

pub(super) fn reduction_homogeneity(cfg: &HarnessConfig, s: &mut Stream, cap: &mut Capture) -> Result<TrialReport> {
    let tuple = exact_tuple(cfg, s)?;
    let (n, k) = (tuple.n(), tuple.k());
    let spec = spec_with_l(cfg, tuple, s, cap)?;
    let a = pds(cfg, n, k, s)?;
    let t = s.uniform_in(0.1, 10.0);
    cap.pds("A", &a);
    cap.scalar("t", t);
    check_homogeneity(&spec, &a, t)
}

/// A sub-unital tuple with `L` equals the augmented L-free tuple evaluated
/// with the extra argument `exp(H_{k+1}⁻¹ L H_{k+1}⁻¹)`.
pub(super) fn reduction_absorb(cfg: &HarnessConfig, s: &mut Stream, cap: &mut Capture) -> Result<TrialReport> {
    let n = dim(cfg.gen.n_range, s);
    let k = dim(cfg.gen.k_range, s);
    let exact = rand_contraction_tuple(k, n, n, true, s)?;
    let shrink = s.uniform_in(0.3, 0.9);
    let blocks = exact.blocks().iter().map(|h| h.scale(shrink)).collect();
    let tuple = ContractionTuple::new(blocks, Resolution::Sub)?;
    let spec = spec_with_l(cfg, tuple, s, cap)?;
    let a = pds(cfg, n, k, s)?;
    cap.pds("A", &a);
    let direct = phi_multi(&spec, &a)?;
    let (augmented, extra) = absorb_l_term(&spec)?;
    let mut extended = a;
    extended.push(extra);
    let absorbed = phi_multi(&augmented, &extended)?;
    Ok(agreement(
        "reduction-absorb",
        &[(direct, absorbed)],
        ABSORB_REL,
        spec.contraction().dims(),
    ))
}

/// Scalar weights: `φ = Tr exp(L + Σ p_i log A_i)`, evaluated both ways.
pub(super) fn reduction_scalar_weights(cfg: &HarnessConfig, s: &mut Stream, cap: &mut Capture) -> Result<TrialReport> {
    let n = dim(cfg.gen.n_range, s);
    let tuple = scalar_weight_tuple(cfg, n, s, cap)?;
    let weights: Vec<f64> = tuple.blocks().iter().map(|h| h.get(0, 0).re.powi(2)).collect();
    let k = tuple.k();
    let spec = spec_with_l(cfg, tuple, s, cap)?;
    let a = pds(cfg, n, k, s)?;
    cap.pds("A", &a);
    let via_tuple = phi_multi(&spec, &a)?;
    let mut exponent = spec.l_term().expect("spec carries L").clone();
    for (p, ai) in weights.iter().zip(&a) {
        exponent = exponent.try_add(&matrix_log(ai).scale(*p))?;
    }
    let direct = trace_real(matrix_exp(&exponent)?.matrix())?;
    Ok(agreement(
        "reduction-scalar-weights",
        &[(via_tuple, direct)],
        REDUCTION_REL,
        spec.contraction().dims(),
    ))
}
