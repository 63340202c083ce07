//! Acceptance criteria, one line of output each. Run with
//! `cargo test -p gtlab --test acceptance`.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use gtlab::harness::{run_suite, select, HarnessConfig, SuiteReport};
use gtlab::oracle::{self, OracleConfig};

const SEED: u64 = 20_240_601;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn suite(name: &str, cfg: &HarnessConfig) -> Result<SuiteReport, String> {
    let def = select(name).map_err(|e| e.to_string())?[0];
    run_suite(def, cfg).map_err(|e| e.to_string())
}

/// Runs `names` with their default counts and requires `min_trials` clean trials each.
fn clean_suites(names: &[&str], cfg: &HarnessConfig, min_trials: u64) -> Outcome {
    let mut summary = Vec::new();
    for name in names {
        let r = suite(name, cfg)?;
        if !r.all_pass() || r.skipped > 0 || r.passed < min_trials {
            return Err(format!(
                "{name}: {} passed, {} failed, {} skipped (worst slack {:e})",
                r.passed, r.failed, r.skipped, r.worst_slack
            ));
        }
        summary.push(format!("{name} {}", r.passed));
    }
    Ok(summary.join(", "))
}

fn criterion_1() -> Outcome {
    let cfg = HarnessConfig::with_seed(SEED);
    let start = Instant::now();
    let r = suite("gt-multi", &cfg)?;
    let elapsed = start.elapsed();
    if r.passed != 1000 || !r.all_pass() {
        return Err(format!("{} passed, {} failed", r.passed, r.failed));
    }
    if elapsed >= Duration::from_secs(60) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("1000/1000 in {:.2?}, worst slack {:e}", elapsed, r.worst_slack))
}

fn criterion_2() -> Outcome {
    let names = [
        "lemma",
        "gt-logdiff",
        "gt-extended",
        "interpolation",
        "q-contraction",
        "dq-quotient",
        "expectation",
    ];
    clean_suites(&names, &HarnessConfig::with_seed(SEED), 500)
}

fn criterion_3() -> Outcome {
    let cfg = HarnessConfig::with_seed(SEED);
    let midpoints = clean_suites(&["phi-single-midpoint", "phi-multi-midpoint"], &cfg, 1000)?;
    let second = clean_suites(
        &["phi-single-second-difference", "phi-multi-second-difference"],
        &cfg,
        500,
    )?;
    Ok(format!("{midpoints}, {second}"))
}

fn criterion_4() -> Outcome {
    clean_suites(&["block-identity"], &HarnessConfig::with_seed(SEED), 200)
}

fn criterion_5() -> Outcome {
    let report = oracle::run_all(&OracleConfig {
        seed: SEED,
        ..OracleConfig::default()
    })
    .map_err(|e| e.to_string())?;
    let lines: Vec<String> = report
        .checks
        .iter()
        .map(|c| format!("{} {:.1e} ≤ {:.0e}", c.check, c.max_rel_error, c.tolerance))
        .collect();
    if report.all_pass() && report.checks.iter().all(|c| c.trials >= 200) {
        Ok(lines.join(", "))
    } else {
        Err(lines.join(", "))
    }
}

fn criterion_6() -> Outcome {
    let names: Vec<&str> = select("reductions")
        .map_err(|e| e.to_string())?
        .iter()
        .map(|d| d.name)
        .collect();
    clean_suites(&names, &HarnessConfig::with_seed(SEED), 200)
}

fn criterion_7() -> Outcome {
    let mut cfg = HarnessConfig::with_seed(SEED);
    cfg.gen.n_range = (1, 8);
    clean_suites(&["q-positivity", "q-homogeneity", "q-midpoint"], &cfg, 500)
}

fn run_bin(args: &[&str]) -> Result<std::process::Output, String> {
    Command::new(common::bin())
        .args(args)
        .env_remove("GTLAB_SEED")
        .output()
        .map_err(|e| e.to_string())
}

fn criterion_8() -> Outcome {
    let args = ["verify", "--suite", "all", "--trials", "100", "--seed", "42"];
    let first = run_bin(&args)?;
    let second = run_bin(&args)?;
    if first.status.code() != Some(0) {
        return Err(format!("verify exited with {:?}", first.status.code()));
    }
    if first.stdout != second.stdout {
        return Err("two runs produced different bytes".into());
    }
    common::check_golden("generators.json", &common::generator_snapshot())?;
    Ok(format!("{} identical bytes, generator fixture matches", first.stdout.len()))
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let malformed = [
        "",
        "{",
        r#"{"L": [1, 2]}"#,
        r#"{"L": {"rows": 2, "cols": 2, "data": [[1, 0]]}, "H": [], "B": []}"#,
        r#"{"L": {"rows": 1, "cols": 1, "data": [[1, 0]]}, "H": [{"rows": 1, "cols": 1, "data": [[0.5, 0]]}], "B": [{"rows": 1, "cols": 1, "data": [[1, 0]]}]}"#,
    ];
    for (i, body) in malformed.iter().enumerate() {
        let path = dir.path().join(format!("bad{i}.json"));
        std::fs::write(&path, body).map_err(|e| e.to_string())?;
        let out = run_bin(&["bound", "--input", path.to_str().unwrap()])?;
        if out.status.code() != Some(2) || out.stderr.is_empty() {
            return Err(format!("malformed case {i} exited with {:?}", out.status.code()));
        }
    }
    let injected = dir.path().join("injected.json");
    std::fs::write(
        &injected,
        r#"{"L": {"rows": 1, "cols": 1, "data": [[0, 0]]},
            "H": [{"rows": 1, "cols": 1, "data": [[2, 0]]}],
            "B": [{"rows": 1, "cols": 1, "data": [[1, 0]]}]}"#,
    )
    .map_err(|e| e.to_string())?;
    let out = run_bin(&["bound", "--input", injected.to_str().unwrap(), "--skip-validation"])?;
    if out.status.code() != Some(1) {
        return Err(format!("injected violation exited with {:?}", out.status.code()));
    }
    Ok(format!("{} malformed inputs → 2, injected violation → 1", malformed.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("multivariate Golden-Thompson suite", criterion_1),
        ("lemma, theorems, interpolation, Q suites, expectation", criterion_2),
        ("concavity probes", criterion_3),
        ("block-embedding identity", criterion_4),
        ("oracle agreement", criterion_5),
        ("reduction identities", criterion_6),
        ("Q-form properties", criterion_7),
        ("determinism and golden files", criterion_8),
        ("CLI exit-code contract", criterion_9),
    ];
    let mut failures = 0;
    for (i, (title, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} PASS  {title}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {} FAIL  {title}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
