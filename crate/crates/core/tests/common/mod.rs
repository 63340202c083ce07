#![allow(dead_code)]

use std::path::PathBuf;

use gtlab::randgen::{
    rand_commuting_pair, rand_contraction_tuple, rand_hermitian, rand_invertible_contraction,
    rand_pd, Stream,
};
use serde_json::{json, Value};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
        .join(name)
}

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_gtlab")
}

/// Objects drawn from fixed streams, rendered with the report formatter.
pub fn generator_snapshot() -> String {
    let mut raw = Stream::new(42, 0);
    let uniforms: Vec<f64> = (0..4).map(|_| raw.uniform()).collect();
    let gaussians: Vec<f64> = (0..4).map(|_| raw.gaussian()).collect();
    let hermitian = rand_hermitian(3, 4.0, &mut Stream::new(42, 1)).unwrap();
    let pd = rand_pd(3, 1e2, &mut Stream::new(42, 2)).unwrap();
    let tuple = rand_contraction_tuple(2, 2, 3, true, &mut Stream::new(42, 3)).unwrap();
    let contraction = rand_invertible_contraction(3, 0.2, &mut Stream::new(42, 4)).unwrap();
    let (a, b) = rand_commuting_pair(2, 1.5, &mut Stream::new(42, 5)).unwrap();
    let value: Value = json!({
        "uniform": uniforms,
        "gaussian": gaussians,
        "rand_hermitian": hermitian.matrix(),
        "rand_pd": pd.matrix(),
        "rand_contraction_tuple": tuple.blocks(),
        "rand_invertible_contraction": contraction,
        "rand_commuting_pair": [a.matrix(), b.matrix()],
    });
    gtlab::jsonfmt::to_string(&value).unwrap()
}

/// Compares `actual` with the fixture, rewriting it when `GTLAB_BLESS` is set.
pub fn check_golden(name: &str, actual: &str) -> Result<(), String> {
    let path = fixture(name);
    if std::env::var_os("GTLAB_BLESS").is_some() {
        std::fs::write(&path, actual).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let expected = std::fs::read_to_string(&path)
        .map_err(|e| format!("missing fixture {}: {e}", path.display()))?;
    if expected == actual {
        Ok(())
    } else {
        Err(format!("{} differs from the generated output", path.display()))
    }
}
