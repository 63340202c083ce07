//! Command-line front end. [`run`] is the whole program minus process exit,
//! so it can be driven from tests with in-memory streams.
//!
//! Exit codes: 0 when every check is satisfied, 1 when an inequality or
//! tolerance is violated, 2 for usage, input and configuration errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::harness::{self, HarnessConfig, RunError, STRESS_SCALE};
use crate::inequalities::{
    check_classical_gt, check_gt_extended, check_gt_logdiff, check_gt_multi, check_interpolation,
    check_lemma_main, helmholtz_bound, TrialReport,
};
use crate::jsonfmt;
use crate::matcore::{ComplexMatrix, HermitianMatrix, PositiveDefiniteMatrix};
use crate::oracle::{self, OracleConfig};
use crate::randgen::{rand_contraction_tuple, rand_hermitian, GenConfig, Stream};
use crate::report::{slack_tol_with, SLACK_REL};
use crate::tracefn::{ContractionTuple, Resolution};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

/// Largest `‖Σ H_i* H_i − I‖_F` accepted from input files.
pub const INPUT_RESOLUTION_TOL: f64 = 1e-8;
pub const DEFAULT_BETAS: [f64; 7] = [0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0];

#[derive(Debug, Parser)]
#[command(name = "gtlab", version, about = "Verify multivariate Golden-Thompson trace inequalities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run randomized verification suites.
    Verify(VerifyArgs),
    /// Evaluate one inequality on matrices from a JSON file.
    Bound(BoundArgs),
    /// Cross-validate the Fréchet differential against independent oracles.
    Oracle(OracleArgs),
    /// Tabulate the free-energy bound over a grid of inverse temperatures.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    CsvSummary,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Master seed.
    #[arg(long, env = "GTLAB_SEED")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub m_max: Option<usize>,
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Condition cap for random positive definite matrices.
    #[arg(long)]
    pub cond_cap: Option<f64>,
    /// JSON file with generator settings; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Trials per suite (default: each suite's own count).
    #[arg(long)]
    pub trials: Option<u64>,
    /// Slack factor in `tol · (1 + |lhs| + |rhs|)`.
    #[arg(long, default_value_t = SLACK_REL)]
    pub tol: f64,
    /// Raise the Hermitian norm cap to 50.
    #[arg(long)]
    pub stress: bool,
    #[command(flatten)]
    pub gen: GenArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Inequality {
    GtMulti,
    ClassicalGt,
    Interpolation,
    Lemma,
    GtLogdiff,
    GtExtended,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "gt-multi")]
    pub inequality: Inequality,
    #[arg(long, default_value_t = SLACK_REL)]
    pub tol: f64,
    /// Accept the H tuple without checking the resolution identity.
    #[arg(long, hide = true)]
    pub skip_validation: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 200)]
    pub trials: u64,
    #[arg(long, default_value_t = crate::calculus::QuadratureRule::DEFAULT_NODES)]
    pub quad_nodes: usize,
    #[command(flatten)]
    pub gen: GenArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Instance file with `L`, `H` and `B`; a seeded random instance otherwise.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Comma-separated inverse temperatures.
    #[arg(long, value_parser = parse_beta_grid)]
    pub betas: Option<BetaGrid>,
    #[arg(long, default_value_t = SLACK_REL)]
    pub tol: f64,
    #[command(flatten)]
    pub gen: GenArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// Matrices for `bound` and `sweep`, in the matrix JSON encoding.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputFile {
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub l: Option<ComplexMatrix>,
    #[serde(rename = "H", default, skip_serializing_if = "Vec::is_empty")]
    pub h: Vec<ComplexMatrix>,
    #[serde(rename = "B", default, skip_serializing_if = "Vec::is_empty")]
    pub b: Vec<ComplexMatrix>,
    #[serde(rename = "A", default, skip_serializing_if = "Vec::is_empty")]
    pub a: Vec<ComplexMatrix>,
    #[serde(rename = "C", default, skip_serializing_if = "Vec::is_empty")]
    pub c: Vec<ComplexMatrix>,
}

pub fn parse_input(text: &str) -> Result<InputFile, Error> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_gen_config(text: &str) -> Result<GenConfig, Error> {
    let cfg: GenConfig = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Parses a comma-separated β grid; every entry must be positive and finite.
pub fn parse_betas(text: &str) -> Result<Vec<f64>, Error> {
    let betas = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("beta '{}': {e}", t.trim())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    validate_betas(&betas)?;
    Ok(betas)
}

/// A validated β grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaGrid(pub Vec<f64>);

fn parse_beta_grid(text: &str) -> Result<BetaGrid, Error> {
    parse_betas(text).map(BetaGrid)
}

fn validate_betas(betas: &[f64]) -> Result<(), Error> {
    if betas.is_empty() {
        return Err(Error::InvalidArgument("beta grid is empty".into()));
    }
    if let Some(b) = betas.iter().find(|b| !(**b > 0.0 && b.is_finite())) {
        return Err(Error::InvalidArgument(format!("beta must be positive and finite, got {b}")));
    }
    Ok(())
}

/// A user-facing failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::usage(e)
    }
}

type Outcome = Result<u8, Failure>;

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, args: &OutputArgs, body: &str) -> Result<(), Failure> {
    match &args.output {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => out
            .write_all(body.as_bytes())
            .map_err(|e| Failure::usage(format!("cannot write output: {e}"))),
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    jsonfmt::to_string(value).map_err(|e| Failure::usage(format!("serialization failed: {e}")))
}

fn check_tol(tol: f64) -> Result<(), Failure> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Failure::usage(format!("--tol must be positive, got {tol}")))
    }
}

fn gen_config(args: &GenArgs) -> Result<GenConfig, Failure> {
    let mut cfg = match &args.config {
        Some(path) => parse_gen_config(&read_file(path)?)?,
        None => GenConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    for (max, range) in [
        (args.n_max, &mut cfg.n_range),
        (args.m_max, &mut cfg.m_range),
        (args.k_max, &mut cfg.k_range),
    ] {
        if let Some(max) = max {
            *range = (range.0.min(max), max);
        }
    }
    if let Some(cap) = args.cond_cap {
        cfg.cond_cap = cap;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    check_tol(args.tol)?;
    let mut gen = gen_config(&args.gen)?;
    if args.stress {
        gen.scale = STRESS_SCALE;
    }
    let cfg = HarnessConfig {
        gen,
        slack_factor: args.tol,
        trials: args.trials,
    };
    let report = harness::run_selected(&args.suite, &cfg).map_err(|e| match e {
        RunError::Config(e) => Failure::usage(e),
        RunError::Trial(e) => Failure::usage(format!("numerical failure: {e}")),
    })?;
    let body = match args.out.format {
        Format::Json => to_json(&report)?,
        Format::CsvSummary => report.csv_summary(),
    };
    emit(out, &args.out, &body)?;
    for suite in report.suites.iter().filter(|s| !s.all_pass()) {
        let index = suite.violation.as_ref().map_or(0, |v| v.trial_index);
        let _ = writeln!(
            err,
            "violation in suite {} at trial {index} (seed {}); inputs are in the report",
            suite.suite, suite.seed
        );
    }
    Ok(if report.all_pass() { EXIT_OK } else { EXIT_VIOLATION })
}

fn require<'a, T>(list: &'a [T], count: usize, name: &str) -> Result<&'a [T], Error> {
    if list.len() < count {
        return Err(Error::InvalidArgument(format!(
            "input needs at least {count} matrices under \"{name}\", found {}",
            list.len()
        )));
    }
    Ok(list)
}

fn labelled(name: &str, i: usize) -> impl Fn(Error) -> Error + '_ {
    move |e| Error::InvalidArgument(format!("{name}[{i}]: {e}"))
}

fn hermitians(list: &[ComplexMatrix], name: &str) -> Result<Vec<HermitianMatrix>, Error> {
    list.iter()
        .enumerate()
        .map(|(i, m)| HermitianMatrix::new(m.clone()).map_err(labelled(name, i)))
        .collect()
}

fn positive_definites(list: &[ComplexMatrix], name: &str) -> Result<Vec<PositiveDefiniteMatrix>, Error> {
    list.iter()
        .enumerate()
        .map(|(i, m)| PositiveDefiniteMatrix::from_matrix(m.clone()).map_err(labelled(name, i)))
        .collect()
}

fn l_term(input: &InputFile) -> Result<HermitianMatrix, Error> {
    let l = input
        .l
        .clone()
        .ok_or_else(|| Error::InvalidArgument("input is missing \"L\"".into()))?;
    HermitianMatrix::new(l).map_err(|e| Error::InvalidArgument(format!("L: {e}")))
}

fn tuple(input: &InputFile, skip_validation: bool) -> Result<ContractionTuple, Error> {
    let blocks = require(&input.h, 1, "H")?.to_vec();
    let result = if skip_validation {
        ContractionTuple::new_unchecked(blocks, Resolution::Exact)
    } else {
        ContractionTuple::with_tolerance(blocks, Resolution::Exact, Some(INPUT_RESOLUTION_TOL))
    };
    result.map_err(|e| Error::InvalidArgument(format!("H: {e}")))
}

#[derive(Debug, Serialize)]
struct BoundOutput {
    inequality: String,
    lhs: f64,
    rhs: f64,
    slack: f64,
    satisfied: bool,
}

/// Validates `input` for `inequality` and evaluates both sides. With
/// `skip_validation` the `H` tuple is taken as given.
pub fn evaluate_input(
    inequality: Inequality,
    input: &InputFile,
    tol: f64,
    skip_validation: bool,
) -> Result<TrialReport, Error> {
    let report = match inequality {
        Inequality::GtMulti => {
            let h = tuple(input, skip_validation)?;
            let b = hermitians(require(&input.b, h.k(), "B")?, "B")?;
            check_gt_multi(&l_term(input)?, &h, &b)?
        }
        Inequality::ClassicalGt => {
            let b = hermitians(require(&input.b, 1, "B")?, "B")?;
            check_classical_gt(&l_term(input)?, &b[0])?
        }
        Inequality::Interpolation => {
            let a = hermitians(require(&input.a, 1, "A")?, "A")?;
            let b = hermitians(require(&input.b, 1, "B")?, "B")?;
            check_interpolation(&l_term(input)?, &a[0], &b[0])?
        }
        Inequality::Lemma => {
            let h = tuple(input, skip_validation)?;
            let a = positive_definites(&input.a, "A")?;
            let b = positive_definites(&input.b, "B")?;
            check_lemma_main(&l_term(input)?, &h, &a, &b)?
        }
        Inequality::GtLogdiff => {
            let h = tuple(input, skip_validation)?;
            let a = positive_definites(&input.a, "A")?;
            let b = positive_definites(&input.b, "B")?;
            check_gt_logdiff(&h, &a, &b)?
        }
        Inequality::GtExtended => {
            let h = tuple(input, skip_validation)?;
            let a = positive_definites(&input.a, "A")?;
            let b = positive_definites(&input.b, "B")?;
            let c = positive_definites(&input.c, "C")?;
            check_gt_extended(&h, &a, &b, &c)?
        }
    };
    Ok(report.with_slack_factor(tol))
}

fn cmd_bound(args: &BoundArgs, out: &mut dyn Write) -> Outcome {
    check_tol(args.tol)?;
    let input = parse_input(&read_file(&args.input)?)?;
    let report = evaluate_input(args.inequality, &input, args.tol, args.skip_validation)?;
    let name = args
        .inequality
        .to_possible_value()
        .map(|v| v.get_name().to_string())
        .unwrap_or_default();
    let result = BoundOutput {
        inequality: name,
        lhs: report.lhs,
        rhs: report.rhs,
        slack: report.slack,
        satisfied: report.pass,
    };
    let body = match args.out.format {
        Format::Json => to_json(&result)?,
        Format::CsvSummary => format!(
            "inequality,lhs,rhs,slack,satisfied\n{},{},{},{},{}\n",
            result.inequality,
            jsonfmt::format_f64(result.lhs),
            jsonfmt::format_f64(result.rhs),
            jsonfmt::format_f64(result.slack),
            result.satisfied
        ),
    };
    emit(out, &args.out, &body)?;
    Ok(if result.satisfied { EXIT_OK } else { EXIT_VIOLATION })
}

fn cmd_oracle(args: &OracleArgs, out: &mut dyn Write) -> Outcome {
    let gen = gen_config(&args.gen)?;
    let cfg = OracleConfig {
        seed: gen.seed,
        trials: args.trials,
        n_range: gen.n_range,
        cond_cap: args.gen.cond_cap.unwrap_or(OracleConfig::default().cond_cap),
        quad_nodes: args.quad_nodes,
    };
    let report = oracle::run_all(&cfg)?;
    let body = match args.out.format {
        Format::Json => to_json(&report)?,
        Format::CsvSummary => report.csv_summary(),
    };
    emit(out, &args.out, &body)?;
    Ok(if report.all_pass() { EXIT_OK } else { EXIT_VIOLATION })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub beta: f64,
    pub free_energy: f64,
    pub bound: f64,
    pub gap: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub instance: String,
    pub dims: crate::report::Dims,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn csv(&self) -> String {
        let mut out = String::from("beta,free_energy,bound,gap\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                jsonfmt::format_f64(r.beta),
                jsonfmt::format_f64(r.free_energy),
                jsonfmt::format_f64(r.bound),
                jsonfmt::format_f64(r.gap)
            ));
        }
        out
    }
}

/// Seeded instance: exact tuple, `L` and `B_i` at the generator's scale.
pub fn random_sweep_instance(gen: &GenConfig) -> Result<(HermitianMatrix, ContractionTuple, Vec<HermitianMatrix>), Error> {
    let mut s = Stream::for_trial(gen.seed, "sweep", 0);
    let (n, m, k) = gen.draw_dims(&mut s, true);
    let tuple = rand_contraction_tuple(k, n, m, true, &mut s)?;
    let l = rand_hermitian(m, gen.scale, &mut s)?;
    let b = (0..k)
        .map(|_| rand_hermitian(n, gen.scale, &mut s))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((l, tuple, b))
}

pub fn sweep(
    l: &HermitianMatrix,
    tuple: &ContractionTuple,
    b: &[HermitianMatrix],
    betas: &[f64],
    tol: f64,
    instance: &str,
) -> Result<SweepTable, Error> {
    validate_betas(betas)?;
    let rows = betas
        .iter()
        .map(|&beta| {
            let h = helmholtz_bound(l, tuple, b, beta)?;
            let gap = h.gap();
            Ok(SweepRow {
                beta,
                free_energy: h.free_energy,
                bound: h.bound,
                gap,
                satisfied: gap >= -slack_tol_with(tol, h.free_energy, h.bound),
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(SweepTable {
        instance: instance.to_string(),
        dims: tuple.dims(),
        rows,
    })
}

fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> Outcome {
    check_tol(args.tol)?;
    let betas = args
        .betas
        .clone()
        .map_or_else(|| DEFAULT_BETAS.to_vec(), |g| g.0);
    let (l, h, b, instance) = match &args.input {
        Some(path) => {
            let input = parse_input(&read_file(path)?)?;
            let h = tuple(&input, false)?;
            let b = hermitians(require(&input.b, h.k(), "B")?, "B")?;
            (l_term(&input)?, h, b, path.display().to_string())
        }
        None => {
            let gen = gen_config(&args.gen)?;
            let (l, h, b) = random_sweep_instance(&gen)?;
            (l, h, b, format!("random seed {}", gen.seed))
        }
    };
    let table = sweep(&l, &h, &b, &betas, args.tol, &instance)?;
    let body = match args.out.format {
        Format::Json => to_json(&table)?,
        Format::CsvSummary => table.csv(),
    };
    emit(out, &args.out, &body)?;
    Ok(if table.rows.iter().all(|r| r.satisfied) { EXIT_OK } else { EXIT_VIOLATION })
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Verify(a) => cmd_verify(a, out, err),
        Command::Bound(a) => cmd_bound(a, out),
        Command::Oracle(a) => cmd_oracle(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
