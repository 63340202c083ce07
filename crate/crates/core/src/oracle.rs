//! Cross-validation of the closed-form differentials against independent
//! evaluations: the resolvent integral, central finite differences, and the
//! inverse relation between `d log` and `d exp`.

use serde::Serialize;

use crate::calculus::{frechet_exp, frechet_log, frechet_log_quadrature, QuadratureRule};
use crate::error::{Error, Result};
use crate::matcore::{matrix_exp, matrix_log, operator_norm, ComplexMatrix, PositiveDefiniteMatrix};
use crate::randgen::{rand_hermitian, rand_pd, Stream};

pub const QUADRATURE_TOL: f64 = 1e-6;
pub const IDENTITY_TOL: f64 = 1e-8;
pub const FINITE_DIFFERENCE_TOL: f64 = 1e-4;
pub const INVERSE_TOL: f64 = 1e-9;
/// Finite-difference step relative to `λ_min(A) / ‖B‖`.
pub const FD_RELATIVE_STEP: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleConfig {
    pub seed: u64,
    pub trials: u64,
    pub n_range: (usize, usize),
    pub cond_cap: f64,
    pub quad_nodes: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: 200,
            n_range: (1, 5),
            cond_cap: 1e3,
            quad_nodes: QuadratureRule::DEFAULT_NODES,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        let (lo, hi) = self.n_range;
        if lo == 0 || lo > hi {
            return Err(Error::InvalidArgument(format!("invalid dimension range {lo}..={hi}")));
        }
        if !(self.cond_cap >= 1.0 && self.cond_cap.is_finite()) {
            return Err(Error::InvalidArgument(format!("cond_cap must be ≥ 1, got {}", self.cond_cap)));
        }
        QuadratureRule::gauss_legendre(self.quad_nodes).map(|_| ())
    }
}

/// Largest relative error of one comparison over all trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleCheck {
    pub check: String,
    pub trials: u64,
    pub max_rel_error: f64,
    pub worst_trial: u64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub checks: Vec<OracleCheck>,
    pub config: OracleConfig,
}

impl OracleReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn csv_summary(&self) -> String {
        let mut out = String::from("check,trials,max_rel_error,worst_trial,tolerance,pass\n");
        for c in &self.checks {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                c.check,
                c.trials,
                crate::jsonfmt::format_f64(c.max_rel_error),
                c.worst_trial,
                crate::jsonfmt::format_f64(c.tolerance),
                c.pass
            ));
        }
        out
    }
}

/// `‖x − reference‖_F / ‖reference‖_F`, or the absolute error when the
/// reference vanishes.
pub fn relative_error(x: &ComplexMatrix, reference: &ComplexMatrix) -> Result<f64> {
    let diff = x.try_sub(reference)?.frobenius_norm();
    let scale = reference.frobenius_norm();
    Ok(if scale > 0.0 { diff / scale } else { diff })
}

fn run_check(
    name: &str,
    cfg: &OracleConfig,
    tolerance: f64,
    mut trial: impl FnMut(&mut Stream, usize) -> Result<f64>,
) -> Result<OracleCheck> {
    let mut worst = (0.0f64, 0u64);
    for i in 0..cfg.trials {
        let mut stream = Stream::for_trial(cfg.seed, name, i);
        let n = stream.integer(cfg.n_range.0, cfg.n_range.1);
        let err = trial(&mut stream, n)?;
        if err.is_nan() || err > worst.0 {
            worst = (err, i);
            if err.is_nan() {
                break;
            }
        }
    }
    Ok(OracleCheck {
        check: name.to_string(),
        trials: cfg.trials,
        max_rel_error: worst.0,
        worst_trial: worst.1,
        tolerance,
        pass: worst.0 <= tolerance,
    })
}

/// Closed form against the quadrature at `A = I`.
pub fn quadrature_identity(cfg: &OracleConfig) -> Result<OracleCheck> {
    let rule = QuadratureRule::gauss_legendre(cfg.quad_nodes)?;
    run_check("quadrature-identity", cfg, IDENTITY_TOL, |s, n| {
        let a = PositiveDefiniteMatrix::identity(n);
        let b = s.complex_gaussian_matrix(n, n);
        relative_error(&frechet_log_quadrature(&a, &b, &rule)?, &frechet_log(&a, &b)?)
    })
}

/// Closed form against the quadrature on the `cond_cap` ensemble.
pub fn quadrature_agreement(cfg: &OracleConfig) -> Result<OracleCheck> {
    let rule = QuadratureRule::gauss_legendre(cfg.quad_nodes)?;
    run_check("quadrature", cfg, QUADRATURE_TOL, |s, n| {
        let a = rand_pd(n, cfg.cond_cap, s)?;
        let b = s.complex_gaussian_matrix(n, n);
        relative_error(&frechet_log_quadrature(&a, &b, &rule)?, &frechet_log(&a, &b)?)
    })
}

/// Closed form against `(log(A + hB) − log(A − hB)) / 2h` for Hermitian `B`.
pub fn finite_difference_agreement(cfg: &OracleConfig) -> Result<OracleCheck> {
    run_check("finite-difference", cfg, FINITE_DIFFERENCE_TOL, |s, n| {
        let a = rand_pd(n, cfg.cond_cap, s)?;
        let b = rand_hermitian(n, 1.0, s)?;
        let norm = operator_norm(b.matrix())?;
        if norm == 0.0 {
            return Ok(0.0);
        }
        let h = FD_RELATIVE_STEP * a.min_eigenvalue() / norm;
        let plus = PositiveDefiniteMatrix::new(a.hermitian().try_add(&b.scale(h))?)?;
        let minus = PositiveDefiniteMatrix::new(a.hermitian().try_sub(&b.scale(h))?)?;
        let fd = matrix_log(&plus)
            .matrix()
            .try_sub(matrix_log(&minus).matrix())?
            .scale(0.5 / h);
        relative_error(&fd, &frechet_log(&a, b.matrix())?)
    })
}

/// `d log(exp C) ∘ d exp(C) = id` with `‖C‖ ≤ ln(cond_cap)/2`.
pub fn inverse_identity(cfg: &OracleConfig) -> Result<OracleCheck> {
    run_check("inverse-identity", cfg, INVERSE_TOL, |s, n| {
        let c = rand_hermitian(n, 0.5 * cfg.cond_cap.ln(), s)?;
        let d = s.complex_gaussian_matrix(n, n);
        let forward = frechet_exp(&c, &d)?;
        let back = frechet_log(&matrix_exp(&c)?, &forward)?;
        relative_error(&back, &d)
    })
}

pub fn run_all(cfg: &OracleConfig) -> Result<OracleReport> {
    cfg.validate()?;
    let checks = vec![
        quadrature_identity(cfg)?,
        quadrature_agreement(cfg)?,
        finite_difference_agreement(cfg)?,
        inverse_identity(cfg)?,
    ];
    Ok(OracleReport {
        checks,
        config: cfg.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(cond_cap: f64) -> OracleConfig {
        OracleConfig {
            trials: 20,
            cond_cap,
            ..OracleConfig::default()
        }
    }

    #[test]
    fn default_ensemble_passes() {
        let report = run_all(&small(1e3)).unwrap();
        assert!(report.all_pass(), "{report:?}");
    }

    #[test]
    fn ill_conditioned_quadrature_fails() {
        let check = quadrature_agreement(&small(1e6)).unwrap();
        assert!(!check.pass, "{check:?}");
    }

    #[test]
    fn rejects_bad_config() {
        assert!(run_all(&OracleConfig { trials: 0, ..OracleConfig::default() }).is_err());
        assert!(run_all(&OracleConfig { quad_nodes: 0, ..OracleConfig::default() }).is_err());
        assert!(run_all(&OracleConfig { cond_cap: 0.5, ..OracleConfig::default() }).is_err());
    }
}
