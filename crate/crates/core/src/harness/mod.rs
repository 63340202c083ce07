//! Randomized verification suites.
//!
//! A suite is a named trial generator plus a default trial count. Trial `i`
//! of suite `s` draws all of its inputs from `Stream::for_trial(seed, s, i)`,
//! so any trial can be regenerated on its own. Trials run in index order and
//! the first violation stops the suite; its inputs are then regenerated with
//! capture enabled and attached to the report.

mod capture;
mod trials;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::randgen::{GenConfig, Stream};
use crate::report::{CheckKind, TrialReport, SLACK_REL};

pub use capture::Capture;

/// Trials closer than this (relative) to equality are counted as near-equality.
pub const NEAR_EQUALITY_REL: f64 = 1e-6;
/// Hermitian norm cap under `--stress`.
pub const STRESS_SCALE: f64 = 50.0;

/// Everything a suite run depends on besides the suite itself.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarnessConfig {
    #[serde(flatten)]
    pub gen: GenConfig,
    /// Factor in `factor · (1 + |lhs| + |rhs|)` for inequality checks.
    pub slack_factor: f64,
    /// Overrides every suite's default trial count.
    pub trials: Option<u64>,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            gen: GenConfig::default(),
            slack_factor: SLACK_REL,
            trials: None,
        }
    }
}

impl HarnessConfig {
    pub fn with_seed(seed: u64) -> Self {
        let mut cfg = Self::default();
        cfg.gen.seed = seed;
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        self.gen.validate()?;
        if !(self.slack_factor > 0.0 && self.slack_factor.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be positive, got {}",
                self.slack_factor
            )));
        }
        if self.trials == Some(0) {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        Ok(())
    }
}

type TrialFn = fn(&HarnessConfig, &mut Stream, &mut Capture) -> Result<TrialReport>;

/// A registered suite.
#[derive(Clone, Copy)]
pub struct SuiteDef {
    pub name: &'static str,
    pub group: &'static str,
    pub default_trials: u64,
    run: TrialFn,
}

impl std::fmt::Debug for SuiteDef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SuiteDef")
            .field("name", &self.name)
            .field("group", &self.group)
            .field("default_trials", &self.default_trials)
            .finish()
    }
}

macro_rules! suite {
    ($name:literal, $group:literal, $trials:literal, $run:path) => {
        SuiteDef {
            name: $name,
            group: $group,
            default_trials: $trials,
            run: $run,
        }
    };
}

/// All suites in execution order.
pub const SUITES: &[SuiteDef] = &[
    suite!("q-contraction", "q", 500, trials::q_contraction),
    suite!("dq-quotient", "q", 500, trials::dq_quotient),
    suite!("q-positivity", "q", 500, trials::q_positivity),
    suite!("q-homogeneity", "q", 500, trials::q_homogeneity),
    suite!("q-midpoint", "q", 500, trials::q_midpoint),
    suite!("phi-single-midpoint", "concavity", 1000, trials::phi_single_midpoint),
    suite!("phi-multi-midpoint", "concavity", 1000, trials::phi_multi_midpoint),
    suite!("lieb-midpoint", "concavity", 200, trials::lieb_midpoint),
    suite!("phi-single-second-difference", "concavity", 500, trials::phi_single_second_difference),
    suite!("phi-multi-second-difference", "concavity", 500, trials::phi_multi_second_difference),
    suite!("phi-quotient", "concavity", 500, trials::phi_quotient),
    suite!("gt-multi", "gt-multi", 1000, trials::gt_multi),
    suite!("classical-gt", "gt-multi", 500, trials::classical_gt),
    suite!("gt-logdiff", "gt-logdiff", 500, trials::gt_logdiff),
    suite!("gt-extended", "gt-extended", 500, trials::gt_extended),
    suite!("interpolation", "interpolation", 500, trials::interpolation),
    suite!("lemma", "lemma", 1000, trials::lemma),
    suite!("expectation", "expectation", 500, trials::expectation),
    suite!("block-identity", "block-identity", 200, trials::block_identity),
    suite!("reduction-classical", "reductions", 200, trials::reduction_classical),
    suite!("reduction-lemma-gt", "reductions", 200, trials::reduction_lemma_gt),
    suite!("reduction-lemma-logdiff", "reductions", 200, trials::reduction_lemma_logdiff),
    suite!("reduction-lemma-extended", "reductions", 200, trials::reduction_lemma_extended),
    suite!("reduction-commuting", "reductions", 200, trials::reduction_commuting),
    suite!("reduction-homogeneity", "reductions", 200, trials::reduction_homogeneity),
    suite!("reduction-absorb", "reductions", 200, trials::reduction_absorb),
    suite!("reduction-scalar-weights", "reductions", 200, trials::reduction_scalar_weights),
];

/// Selector names accepted by [`select`] besides individual suite names.
pub const GROUPS: &[&str] = &[
    "all",
    "q",
    "concavity",
    "gt-multi",
    "gt-logdiff",
    "gt-extended",
    "interpolation",
    "lemma",
    "expectation",
    "block-identity",
    "reductions",
];

/// Resolves `all`, a group name or a single suite name.
pub fn select(selector: &str) -> Result<Vec<&'static SuiteDef>> {
    let chosen: Vec<&SuiteDef> = if selector == "all" {
        SUITES.iter().collect()
    } else if GROUPS.contains(&selector) {
        SUITES.iter().filter(|s| s.group == selector).collect()
    } else {
        SUITES.iter().filter(|s| s.name == selector).collect()
    };
    if chosen.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "unknown suite '{selector}' (groups: {})",
            GROUPS.join(", ")
        )));
    }
    Ok(chosen)
}

/// Inputs of the first failing trial, in a form that can be replayed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub trial_index: u64,
    pub inputs: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub trials: Vec<TrialReport>,
    pub passed: u64,
    pub failed: u64,
    /// Trials dropped because an exponential left the representable range.
    pub skipped: u64,
    /// Passing inequality trials with relative slack below [`NEAR_EQUALITY_REL`].
    pub near_equality: u64,
    pub worst_slack: f64,
    pub seed: u64,
    pub config: HarnessConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<Violation>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }
}

/// The output of `verify`: one report per selected suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suites: Vec<SuiteReport>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.suites.iter().all(SuiteReport::all_pass)
    }

    /// One CSV row per suite, with a header line.
    pub fn csv_summary(&self) -> String {
        let mut out = String::from("suite,trials,passed,failed,skipped,near_equality,worst_slack,seed\n");
        for s in &self.suites {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                s.suite,
                s.trials.len(),
                s.passed,
                s.failed,
                s.skipped,
                s.near_equality,
                crate::jsonfmt::format_f64(s.worst_slack),
                s.seed
            ));
        }
        out
    }
}

fn is_near_equality(r: &TrialReport) -> bool {
    r.pass && r.kind == CheckKind::Inequality && r.relative_slack() < NEAR_EQUALITY_REL
}

/// A numerical failure inside a trial that is not a verdict on the inequality.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("suite {suite}, trial {trial_index}: {source}")]
pub struct TrialError {
    pub suite: &'static str,
    pub trial_index: u64,
    pub source: Error,
}

/// Regenerates and evaluates one trial, returning its report and inputs.
pub fn replay(def: &SuiteDef, cfg: &HarnessConfig, trial_index: u64) -> Result<(TrialReport, serde_json::Value)> {
    let mut stream = Stream::for_trial(cfg.gen.seed, def.name, trial_index);
    let mut capture = Capture::enabled();
    let report = (def.run)(cfg, &mut stream, &mut capture)?
        .with_trial(def.name, trial_index, cfg.gen.seed)
        .with_slack_factor(cfg.slack_factor);
    Ok((report, capture.into_value()))
}

pub fn run_suite(def: &SuiteDef, cfg: &HarnessConfig) -> std::result::Result<SuiteReport, TrialError> {
    let count = cfg.trials.unwrap_or(def.default_trials);
    let seed = cfg.gen.seed;
    let mut trials = Vec::with_capacity(count as usize);
    let (mut skipped, mut near_equality) = (0, 0);
    let mut violation = None;
    for index in 0..count {
        let mut stream = Stream::for_trial(seed, def.name, index);
        let outcome = (def.run)(cfg, &mut stream, &mut Capture::disabled());
        let report = match outcome {
            Ok(r) => r
                .with_trial(def.name, index, seed)
                .with_slack_factor(cfg.slack_factor),
            Err(Error::ExpOverflow { .. } | Error::ExpUnderflow { .. }) => {
                log::warn!("{}: trial {index} skipped (exponential out of range)", def.name);
                skipped += 1;
                continue;
            }
            Err(source) => {
                return Err(TrialError {
                    suite: def.name,
                    trial_index: index,
                    source,
                })
            }
        };
        if is_near_equality(&report) {
            near_equality += 1;
        }
        let pass = report.pass;
        trials.push(report);
        if !pass {
            let inputs = replay(def, cfg, index)
                .map(|(_, inputs)| inputs)
                .map_err(|source| TrialError {
                    suite: def.name,
                    trial_index: index,
                    source,
                })?;
            log::error!("{}: violation at trial {index}", def.name);
            violation = Some(Violation {
                trial_index: index,
                inputs,
            });
            break;
        }
    }
    let failed = trials.iter().filter(|t| !t.pass).count() as u64;
    let worst_slack = trials
        .iter()
        .map(|t| t.slack)
        .fold(f64::NAN, |acc, s| if acc.is_nan() || s < acc { s } else { acc });
    Ok(SuiteReport {
        suite: def.name.to_string(),
        passed: trials.len() as u64 - failed,
        failed,
        skipped,
        near_equality,
        worst_slack,
        seed,
        config: cfg.clone(),
        violation,
        trials,
    })
}

/// Runs every suite matched by `selector`.
pub fn run_selected(selector: &str, cfg: &HarnessConfig) -> std::result::Result<VerifyReport, RunError> {
    cfg.validate().map_err(RunError::Config)?;
    let defs = select(selector).map_err(RunError::Config)?;
    let suites = defs
        .into_iter()
        .map(|d| run_suite(d, cfg))
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(RunError::Trial)?;
    Ok(VerifyReport { suites })
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RunError {
    #[error("invalid configuration: {0}")]
    Config(Error),
    #[error(transparent)]
    Trial(TrialError),
}
