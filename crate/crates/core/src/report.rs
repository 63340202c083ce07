use serde::Serialize;

/// Relative-plus-absolute factor of the default slack tolerance.
pub const SLACK_REL: f64 = 1e-9;

/// `SLACK_REL · (1 + |lhs| + |rhs|)`.
pub fn slack_tol(lhs: f64, rhs: f64) -> f64 {
    slack_tol_with(SLACK_REL, lhs, rhs)
}

pub fn slack_tol_with(factor: f64, lhs: f64, rhs: f64) -> f64 {
    factor * (1.0 + lhs.abs() + rhs.abs())
}

/// How `slack` and `pass` were derived from `lhs` and `rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    /// `lhs ≤ rhs`, slack `rhs − lhs`, tolerance from [`slack_tol`].
    Inequality,
    /// `lhs ≤ rhs` against a fixed tolerance (finite-difference bounds).
    Bound,
    /// `lhs = rhs`, slack `−|lhs − rhs|`.
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Dims {
    pub n: usize,
    pub m: usize,
    pub k: usize,
}

impl Dims {
    pub fn new(n: usize, m: usize, k: usize) -> Self {
        Self { n, m, k }
    }

    pub fn square(n: usize) -> Self {
        Self { n, m: n, k: 1 }
    }
}

/// Outcome of a single check. `pass ⇔ slack ≥ −tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub suite: String,
    pub trial_index: u64,
    pub seed: u64,
    pub kind: CheckKind,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub dims: Dims,
}

impl TrialReport {
    fn build(suite: &str, kind: CheckKind, lhs: f64, rhs: f64, tolerance: f64, dims: Dims) -> Self {
        let slack = match kind {
            CheckKind::Inequality | CheckKind::Bound => rhs - lhs,
            CheckKind::Identity => -(lhs - rhs).abs(),
        };
        Self {
            suite: suite.to_string(),
            trial_index: 0,
            seed: 0,
            kind,
            lhs,
            rhs,
            slack,
            tolerance,
            pass: slack >= -tolerance,
            dims,
        }
    }

    pub fn inequality(suite: &str, lhs: f64, rhs: f64, dims: Dims) -> Self {
        Self::build(suite, CheckKind::Inequality, lhs, rhs, slack_tol(lhs, rhs), dims)
    }

    pub fn bound(suite: &str, value: f64, limit: f64, tolerance: f64, dims: Dims) -> Self {
        Self::build(suite, CheckKind::Bound, value, limit, tolerance, dims)
    }

    pub fn identity(suite: &str, lhs: f64, rhs: f64, tolerance: f64, dims: Dims) -> Self {
        Self::build(suite, CheckKind::Identity, lhs, rhs, tolerance, dims)
    }

    /// Identity with tolerance `rel · max(|lhs|, |rhs|, floor)`.
    pub fn relative_identity(suite: &str, lhs: f64, rhs: f64, rel: f64, dims: Dims) -> Self {
        let scale = lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
        Self::identity(suite, lhs, rhs, rel * scale, dims)
    }

    pub fn with_trial(mut self, suite: &str, trial_index: u64, seed: u64) -> Self {
        self.suite = suite.to_string();
        self.trial_index = trial_index;
        self.seed = seed;
        self
    }

    /// Re-judges an inequality under a different slack factor. Other kinds
    /// carry their own fixed tolerances and are returned unchanged.
    pub fn with_slack_factor(mut self, factor: f64) -> Self {
        if self.kind == CheckKind::Inequality {
            self.tolerance = slack_tol_with(factor, self.lhs, self.rhs);
            self.pass = self.slack >= -self.tolerance;
        }
        self
    }

    /// Slack normalised by `1 + |lhs| + |rhs|`.
    pub fn relative_slack(&self) -> f64 {
        self.slack / (1.0 + self.lhs.abs() + self.rhs.abs())
    }

    /// The report with the smallest margin `slack + tolerance`; failing
    /// reports always rank below passing ones.
    pub fn worst_of(reports: impl IntoIterator<Item = TrialReport>) -> Option<TrialReport> {
        fn margin(r: &TrialReport) -> f64 {
            let m = r.slack + r.tolerance;
            if m.is_nan() {
                f64::NEG_INFINITY
            } else {
                m
            }
        }
        reports.into_iter().reduce(|a, b| {
            let b_worse = match (a.pass, b.pass) {
                (true, false) => true,
                (false, true) => false,
                _ => margin(&b) < margin(&a),
            };
            if b_worse {
                b
            } else {
                a
            }
        })
    }
}
