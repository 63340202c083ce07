//! Fréchet differentials of `log` and `exp`, the integral-representation
//! quadrature oracle for `d log`, and the quadratic trace form
//! `Q(x, h) = Tr h* d log(x) h`.
//!
//! Closed forms use the Daleckii–Krein formula: in the eigenbasis of the base
//! point, entry `(i, j)` of the direction is multiplied by the divided
//! difference `f[λ_i, λ_j]`.

mod quadrature;

pub use quadrature::QuadratureRule;

use crate::error::{Error, Result};
use crate::matcore::{hermitian_eig, ComplexMatrix, HermitianMatrix, PositiveDefiniteMatrix};
use crate::report::{Dims, TrialReport};
use crate::tracefn::{phi_multi, PhiSpec};

const SERIES_SWITCH: f64 = 1e-4;

/// `(log a − log b)/(a − b)`, with `1/a` on the diagonal.
///
/// Evaluated as `2·atanh(r)/(r(a+b))` with `r = (a−b)/(a+b)`; below
/// `|r| < 1e-4` the ratio `atanh(r)/r` comes from its series.
pub fn divided_difference_log(a: f64, b: f64) -> f64 {
    let sum = a + b;
    let r = (a - b) / sum;
    if r.abs() < SERIES_SWITCH {
        let r2 = r * r;
        (2.0 / sum) * (1.0 + r2 / 3.0 + r2 * r2 / 5.0)
    } else {
        (a.ln() - b.ln()) / (a - b)
    }
}

/// `(e^a − e^b)/(a − b)`, with `e^a` on the diagonal.
///
/// Evaluated as `e^{(a+b)/2}·sinh(d)/d` with `d = (a−b)/2`; `sinh(d)/d` comes
/// from its series below `|d| < 1e-4`.
pub fn divided_difference_exp(a: f64, b: f64) -> f64 {
    let d = 0.5 * (a - b);
    let mid = (0.5 * (a + b)).exp();
    if d.abs() < SERIES_SWITCH {
        let d2 = d * d;
        mid * (1.0 + d2 / 6.0 + d2 * d2 / 120.0)
    } else {
        mid * d.sinh() / d
    }
}

fn require_direction(dim: usize, b: &ComplexMatrix, context: &'static str) -> Result<()> {
    if b.shape() == (dim, dim) {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected: format!("{dim}x{dim}"),
            found: format!("{}x{}", b.rows(), b.cols()),
        })
    }
}

/// `d log(A) B`.
pub fn frechet_log(a: &PositiveDefiniteMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    require_direction(a.dim(), b, "frechet_log")?;
    Ok(a.spectral()
        .divided_difference_map(b, divided_difference_log))
}

/// `d log(A) B` for Hermitian `B`, returned Hermitian.
pub fn frechet_log_hermitian(
    a: &PositiveDefiniteMatrix,
    b: &HermitianMatrix,
) -> Result<HermitianMatrix> {
    frechet_log(a, b.matrix()).map(HermitianMatrix::symmetrize)
}

/// `∫₀^∞ (A+t)⁻¹ B (A+t)⁻¹ dt` evaluated literally.
///
/// Uses `t = u/(1−u)` with Jacobian `1/(1−u)²` and Gauss–Legendre nodes on
/// `[0, 1]`. Resolvents come from LU inversion so no eigendecomposition is
/// involved. With the default 64 nodes this agrees with [`frechet_log`] to
/// `1e-6` relative for condition ≤ 1e3 when the spectrum straddles one; the
/// closed form is authoritative.
pub fn frechet_log_quadrature(
    a: &PositiveDefiniteMatrix,
    b: &ComplexMatrix,
    rule: &QuadratureRule,
) -> Result<ComplexMatrix> {
    let n = a.dim();
    require_direction(n, b, "frechet_log_quadrature")?;
    let base = a.matrix();
    let id = ComplexMatrix::identity(n);
    let mut acc = ComplexMatrix::zeros(n, n);
    for (&u, &w) in rule.nodes().iter().zip(rule.weights()) {
        let one_minus = 1.0 - u;
        let t = u / one_minus;
        let jacobian = 1.0 / (one_minus * one_minus);
        let resolvent = base.try_add(&id.scale(t))?.try_inverse()?;
        let term = resolvent.try_mul(b)?.try_mul(&resolvent)?;
        acc = acc.try_add(&term.scale(w * jacobian))?;
    }
    Ok(acc)
}

/// `d exp(C) D`.
pub fn frechet_exp(c: &HermitianMatrix, d: &ComplexMatrix) -> Result<ComplexMatrix> {
    require_direction(c.dim(), d, "frechet_exp")?;
    let spectral = hermitian_eig(c)?;
    let max = *spectral.eigenvalues.last().expect("non-empty spectrum");
    if max > crate::matcore::OVERFLOW_GUARD {
        return Err(Error::ExpOverflow {
            max_eigenvalue: max,
            guard: crate::matcore::OVERFLOW_GUARD,
        });
    }
    Ok(spectral.divided_difference_map(d, divided_difference_exp))
}

/// `Q(x, h) = Tr h* d log(x) h = Σ_ij |h̃_ij|² · log[λ_i, λ_j]` with `h̃ = U* h U`.
pub fn q_form(x: &PositiveDefiniteMatrix, h: &ComplexMatrix) -> Result<f64> {
    require_direction(x.dim(), h, "q_form")?;
    let spectral = x.spectral();
    let rotated = spectral.to_eigenbasis(h);
    let n = x.dim();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            total += rotated.get(i, j).norm_sqr()
                * divided_difference_log(spectral.eigenvalues[i], spectral.eigenvalues[j]);
        }
    }
    Ok(total)
}

fn validate_t_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::InvalidArgument("t grid is empty".into()));
    }
    if let Some(bad) = t_grid.iter().find(|&&t| !(t > 0.0 && t <= 1.0)) {
        return Err(Error::InvalidArgument(format!(
            "t values must lie in (0, 1], got {bad}"
        )));
    }
    Ok(())
}

fn pd_combination(
    x: &PositiveDefiniteMatrix,
    t: f64,
    y: &PositiveDefiniteMatrix,
) -> Result<PositiveDefiniteMatrix> {
    let sum = x.hermitian().try_add(&y.hermitian().scale(t))?;
    PositiveDefiniteMatrix::new(sum)
}

/// Checks `(Q(x+ty, h+tk) − Q(x,h))/t ≤ Q(y,k)` at every `t` in the grid and
/// reports the worst case.
pub fn check_dq_inequality(
    x: &PositiveDefiniteMatrix,
    h: &ComplexMatrix,
    y: &PositiveDefiniteMatrix,
    k: &ComplexMatrix,
    t_grid: &[f64],
) -> Result<TrialReport> {
    check_homogeneous_convex_quotient(
        &HomogeneousForm::Q,
        &FormPoint::Q {
            x: x.clone(),
            h: h.clone(),
        },
        &FormPoint::Q {
            x: y.clone(),
            h: k.clone(),
        },
        t_grid,
    )
    .map(|r| TrialReport { suite: "dq-quotient".into(), ..r })
}

/// Direction of the quotient inequality for a registered form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Curvature {
    /// Convex and homogeneous: `(φ(x+th) − φ(x))/t ≤ φ(h)`.
    Convex,
    /// Concave and homogeneous: `(φ(x+th) − φ(x))/t ≥ φ(h)`.
    Concave,
}

/// Positively homogeneous functionals with a known curvature.
#[derive(Debug, Clone)]
pub enum HomogeneousForm {
    /// `(x, h) ↦ Q(x, h)`, jointly convex.
    Q,
    /// `(A_1..A_k) ↦ Tr exp(L + Σ H_i* log(A_i) H_i)` with exact resolution, concave.
    PhiMulti(PhiSpec),
}

/// A point in the domain of a [`HomogeneousForm`].
#[derive(Debug, Clone)]
pub enum FormPoint {
    Q {
        x: PositiveDefiniteMatrix,
        h: ComplexMatrix,
    },
    Tuple(Vec<PositiveDefiniteMatrix>),
}

impl HomogeneousForm {
    pub const REGISTERED: [&'static str; 2] = ["q", "phi_multi"];

    /// Looks a form up by name. `phi_multi` needs a spec with exact resolution.
    pub fn from_name(name: &str, spec: Option<PhiSpec>) -> Result<Self> {
        match (name, spec) {
            ("q", _) => Ok(Self::Q),
            ("phi_multi", Some(spec)) => {
                if !spec.contraction().is_exact() {
                    return Err(Error::InvalidArgument(
                        "phi_multi is homogeneous only for exact resolution".into(),
                    ));
                }
                Ok(Self::PhiMulti(spec))
            }
            ("phi_multi", None) => Err(Error::InvalidArgument(
                "phi_multi requires a PhiSpec".into(),
            )),
            (other, _) => Err(Error::InvalidArgument(format!(
                "unregistered form '{other}' (known: {})",
                Self::REGISTERED.join(", ")
            ))),
        }
    }

    pub fn curvature(&self) -> Curvature {
        match self {
            Self::Q => Curvature::Convex,
            Self::PhiMulti(_) => Curvature::Concave,
        }
    }

    pub fn evaluate(&self, point: &FormPoint) -> Result<f64> {
        match (self, point) {
            (Self::Q, FormPoint::Q { x, h }) => q_form(x, h),
            (Self::PhiMulti(spec), FormPoint::Tuple(list)) => phi_multi(spec, list),
            _ => Err(Error::InvalidArgument(
                "point does not belong to the form's domain".into(),
            )),
        }
    }

    /// `p + t·q`.
    fn step(&self, p: &FormPoint, t: f64, q: &FormPoint) -> Result<FormPoint> {
        match (p, q) {
            (FormPoint::Q { x, h }, FormPoint::Q { x: y, h: k }) => Ok(FormPoint::Q {
                x: pd_combination(x, t, y)?,
                h: h.try_add(&k.scale(t))?,
            }),
            (FormPoint::Tuple(a), FormPoint::Tuple(b)) => {
                if a.len() != b.len() {
                    return Err(Error::DimensionMismatch {
                        context: "form step",
                        expected: format!("{} matrices", a.len()),
                        found: format!("{} matrices", b.len()),
                    });
                }
                a.iter()
                    .zip(b)
                    .map(|(x, y)| pd_combination(x, t, y))
                    .collect::<Result<Vec<_>>>()
                    .map(FormPoint::Tuple)
            }
            _ => Err(Error::InvalidArgument("mixed form points".into())),
        }
    }

    fn dims(&self, point: &FormPoint) -> Dims {
        match (self, point) {
            (Self::PhiMulti(spec), _) => {
                let c = spec.contraction();
                Dims::new(c.n(), c.m(), c.k())
            }
            (_, FormPoint::Q { x, .. }) => Dims::square(x.dim()),
            (_, FormPoint::Tuple(list)) => {
                Dims::new(list.first().map_or(0, |a| a.dim()), 0, list.len())
            }
        }
    }
}

/// Finite-`t` quotient inequality for a convex (or concave) positively
/// homogeneous form, checked at each `t` in `t_grid`; the worst `t` is reported.
///
/// For convex forms `lhs` is the largest quotient and `rhs = φ(h)`; for
/// concave forms `lhs = φ(h)` and `rhs` is the smallest quotient.
pub fn check_homogeneous_convex_quotient(
    form: &HomogeneousForm,
    x: &FormPoint,
    h: &FormPoint,
    t_grid: &[f64],
) -> Result<TrialReport> {
    validate_t_grid(t_grid)?;
    let at_x = form.evaluate(x)?;
    let at_h = form.evaluate(h)?;
    let dims = form.dims(x);
    let suite = match form {
        HomogeneousForm::Q => "q-quotient",
        HomogeneousForm::PhiMulti(_) => "phi-quotient",
    };
    let mut reports = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let moved = form.evaluate(&form.step(x, t, h)?)?;
        let quotient = (moved - at_x) / t;
        let report = match form.curvature() {
            Curvature::Convex => TrialReport::inequality(suite, quotient, at_h, dims),
            Curvature::Concave => TrialReport::inequality(suite, at_h, quotient, dims),
        };
        reports.push(report);
    }
    Ok(TrialReport::worst_of(reports).expect("non-empty grid"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{matrix_exp, C64};

    fn pd(diag: &[f64]) -> PositiveDefiniteMatrix {
        PositiveDefiniteMatrix::from_real_diagonal(diag).unwrap()
    }

    #[test]
    fn dd_log_diagonal_and_off_diagonal() {
        assert_eq!(divided_difference_log(2.0, 2.0), 0.5);
        assert!((divided_difference_log(1.0, 2.0) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(divided_difference_log(1.0, 2.0), divided_difference_log(2.0, 1.0));
    }

    #[test]
    fn dd_log_near_coincident_is_continuous() {
        for &a in &[1e-6, 0.3, 1.0, 7.0, 1e5] {
            for &rel in &[1e-14, 1e-10, 1e-8] {
                let delta = rel * a;
                let got = divided_difference_log(a, a + delta);
                assert!(
                    (got - 1.0 / a).abs() <= delta / (a * a),
                    "a={a} delta={delta}: {got} vs {}",
                    1.0 / a
                );
            }
        }
    }

    #[test]
    fn dd_log_branch_switch_is_smooth() {
        // across |r| = 1e-4 the two evaluations must agree to rounding
        let a = 1.0;
        let below = divided_difference_log(a, a * (1.0 + 1.9999e-4));
        let above = divided_difference_log(a, a * (1.0 + 2.0001e-4));
        let exact = |b: f64| (b.ln() - a.ln()) / (b - a);
        assert!((below - exact(1.0 + 1.9999e-4)).abs() < 1e-12);
        assert!((above - exact(1.0 + 2.0001e-4)).abs() < 1e-12);
    }

    #[test]
    fn dd_exp_cases() {
        assert_eq!(divided_difference_exp(0.0, 0.0), 1.0);
        assert!((divided_difference_exp(1.0, 1.0) - 1f64.exp()).abs() < 1e-15);
        let direct = (2f64.exp() - 1f64.exp()) / 1.0;
        assert!((divided_difference_exp(2.0, 1.0) - direct).abs() < 1e-14);
        let a = 3.0;
        let near = divided_difference_exp(a, a + 1e-9);
        assert!((near - (a + 0.5e-9).exp()).abs() < 1e-13);
    }

    #[test]
    fn frechet_log_at_identity_is_identity_map() {
        let b = ComplexMatrix::from_row_major(
            2,
            2,
            vec![
                C64::new(1.0, 2.0),
                C64::new(-3.0, 0.5),
                C64::new(0.0, 1.0),
                C64::new(4.0, 0.0),
            ],
        )
        .unwrap();
        let d = frechet_log(&PositiveDefiniteMatrix::identity(2), &b).unwrap();
        assert!(d.relative_distance(&b) < 1e-15);
    }

    #[test]
    fn frechet_log_off_diagonal_unit() {
        let e12 = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let d = frechet_log(&pd(&[1.0, 2.0]), &e12).unwrap();
        let expected = e12.scale(2f64.ln());
        assert!(d.relative_distance(&expected) < 1e-15);
        // quadrature agrees at 64 nodes
        let q = frechet_log_quadrature(&pd(&[1.0, 2.0]), &e12, &QuadratureRule::default()).unwrap();
        assert!(q.relative_distance(&expected) < 1e-12);
    }

    #[test]
    fn quadrature_scalar_and_identity() {
        let rule = QuadratureRule::default();
        let q = frechet_log_quadrature(
            &pd(&[2.0]),
            &ComplexMatrix::from_real_rows(&[&[3.0]]),
            &rule,
        )
        .unwrap();
        assert!((q.get(0, 0).re - 1.5).abs() < 1e-8);
        let i = frechet_log_quadrature(
            &PositiveDefiniteMatrix::identity(3),
            &ComplexMatrix::identity(3),
            &rule,
        )
        .unwrap();
        assert!(i.relative_distance(&ComplexMatrix::identity(3)) < 1e-8);
    }

    #[test]
    fn quadrature_matches_closed_form_on_diag_1_4() {
        let a = pd(&[1.0, 4.0]);
        let ones = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let closed = frechet_log(&a, &ones).unwrap();
        let quad = frechet_log_quadrature(&a, &ones, &QuadratureRule::default()).unwrap();
        assert!(quad.try_sub(&closed).unwrap().frobenius_norm() / closed.frobenius_norm() < 1e-6);
    }

    #[test]
    fn frechet_exp_cases() {
        let d = ComplexMatrix::from_real_rows(&[&[0.0, 2.0], &[-1.0, 3.0]]);
        let out = frechet_exp(&HermitianMatrix::zeros(2), &d).unwrap();
        assert!(out.relative_distance(&d) < 1e-15);
        let scalar = frechet_exp(
            &HermitianMatrix::from_real_diagonal(&[1.0]),
            &ComplexMatrix::from_real_rows(&[&[2.0]]),
        )
        .unwrap();
        assert!((scalar.get(0, 0).re - 2.0 * 1f64.exp()).abs() < 1e-14);
    }

    #[test]
    fn inverse_map_identity_on_example() {
        let c = HermitianMatrix::new(ComplexMatrix::from_real_rows(&[&[0.3, -1.2], &[-1.2, 2.0]]))
            .unwrap();
        let d = ComplexMatrix::from_real_rows(&[&[1.0, 0.5], &[0.5, -2.0]]);
        let forward = frechet_exp(&c, &d).unwrap();
        let back = frechet_log(&matrix_exp(&c).unwrap(), &forward).unwrap();
        assert!(back.relative_distance(&d) < 1e-12);
    }

    #[test]
    fn q_form_examples() {
        let q = q_form(&pd(&[2.0]), &ComplexMatrix::from_real_rows(&[&[3.0]])).unwrap();
        assert!((q - 4.5).abs() < 1e-15);
        let h = ComplexMatrix::from_row_major(
            2,
            2,
            vec![
                C64::new(1.0, 1.0),
                C64::new(0.0, -2.0),
                C64::new(3.0, 0.0),
                C64::new(0.5, 0.5),
            ],
        )
        .unwrap();
        let q = q_form(&PositiveDefiniteMatrix::identity(2), &h).unwrap();
        assert!((q - h.frobenius_norm().powi(2)).abs() < 1e-13);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = PositiveDefiniteMatrix::identity(2);
        let b = ComplexMatrix::zeros(3, 3);
        assert!(matches!(frechet_log(&a, &b), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(q_form(&a, &b), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(
            frechet_exp(&HermitianMatrix::zeros(2), &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn dq_quotient_equality_under_homogeneity() {
        let x = pd(&[1.0, 3.0]);
        let h = ComplexMatrix::from_real_rows(&[&[1.0, -1.0], &[2.0, 0.5]]);
        let r = check_dq_inequality(&x, &h, &x, &h, &[1.0]).unwrap();
        assert!(r.pass);
        assert!(r.slack.abs() < 1e-12, "slack {}", r.slack);
    }

    #[test]
    fn dq_quotient_scalar_example() {
        let one = pd(&[1.0]);
        let zero = ComplexMatrix::zeros(1, 1);
        let unit = ComplexMatrix::from_real_rows(&[&[1.0]]);
        let r = check_dq_inequality(&one, &zero, &one, &unit, &[1.0]).unwrap();
        assert!((r.lhs - 0.5).abs() < 1e-15);
        assert!((r.rhs - 1.0).abs() < 1e-15);
        assert!(r.pass);
    }

    #[test]
    fn t_grid_validation() {
        let one = pd(&[1.0]);
        let z = ComplexMatrix::zeros(1, 1);
        assert!(check_dq_inequality(&one, &z, &one, &z, &[]).is_err());
        assert!(check_dq_inequality(&one, &z, &one, &z, &[0.0]).is_err());
        assert!(check_dq_inequality(&one, &z, &one, &z, &[1.5]).is_err());
    }

    #[test]
    fn unregistered_form_rejected() {
        assert!(HomogeneousForm::from_name("entropy", None).is_err());
        assert!(HomogeneousForm::from_name("phi_multi", None).is_err());
        assert!(matches!(HomogeneousForm::from_name("q", None), Ok(HomogeneousForm::Q)));
    }
}
