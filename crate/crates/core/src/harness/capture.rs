use serde_json::{Map, Value};

use crate::matcore::{ComplexMatrix, HermitianMatrix, PositiveDefiniteMatrix};
use crate::tracefn::ContractionTuple;

/// Records the named inputs of a trial when enabled; a no-op otherwise.
#[derive(Debug, Default)]
pub struct Capture {
    inputs: Option<Map<String, Value>>,
}

fn encode(m: &ComplexMatrix) -> Value {
    serde_json::to_value(m).expect("matrices serialize")
}

impl Capture {
    pub fn disabled() -> Self {
        Self { inputs: None }
    }

    pub fn enabled() -> Self {
        Self {
            inputs: Some(Map::new()),
        }
    }

    pub fn into_value(self) -> Value {
        Value::Object(self.inputs.unwrap_or_default())
    }

    fn put(&mut self, name: &str, value: impl FnOnce() -> Value) {
        if let Some(map) = self.inputs.as_mut() {
            map.insert(name.to_string(), value());
        }
    }

    pub fn matrix(&mut self, name: &str, m: &ComplexMatrix) {
        self.put(name, || encode(m));
    }

    pub fn hermitian(&mut self, name: &str, m: &HermitianMatrix) {
        self.matrix(name, m.matrix());
    }

    pub fn pd(&mut self, name: &str, m: &PositiveDefiniteMatrix) {
        self.matrix(name, m.matrix());
    }

    pub fn matrices<'a>(&mut self, name: &str, list: impl IntoIterator<Item = &'a ComplexMatrix>) {
        self.put(name, || Value::Array(list.into_iter().map(encode).collect()));
    }

    pub fn hermitians(&mut self, name: &str, list: &[HermitianMatrix]) {
        self.matrices(name, list.iter().map(HermitianMatrix::matrix));
    }

    pub fn pds(&mut self, name: &str, list: &[PositiveDefiniteMatrix]) {
        self.matrices(name, list.iter().map(PositiveDefiniteMatrix::matrix));
    }

    pub fn tuple(&mut self, name: &str, tuple: &ContractionTuple) {
        self.matrices(name, tuple.blocks());
    }

    pub fn scalar(&mut self, name: &str, x: f64) {
        self.put(name, || Value::from(x));
    }

    pub fn scalars(&mut self, name: &str, xs: &[f64]) {
        self.put(name, || Value::from(xs.to_vec()));
    }
}
