//! JSON matrix encoding: `{"rows": n, "cols": m, "data": [[re, im], ...]}`,
//! row-major, one `[re, im]` pair per entry.

use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = Error;

    fn try_from(value: MatrixJson) -> Result<Self> {
        let data = value
            .data
            .into_iter()
            .map(|[re, im]| C64::new(re, im))
            .collect();
        ComplexMatrix::from_row_major(value.rows, value.cols, data)
    }
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: m.to_row_major().into_iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(deserializer)?;
        ComplexMatrix::try_from(raw).map_err(serde::de::Error::custom)
    }
}

/// Parses a single matrix from JSON text.
pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    serde_json::from_str::<ComplexMatrix>(text).map_err(|e| Error::Parse(e.to_string()))
}
