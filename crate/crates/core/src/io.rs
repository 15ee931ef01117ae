//! Matrix files.
//!
//! CSV: comma-separated decimal floats, one row per line; blank lines and
//! lines starting with `#` are ignored.
//!
//! JSON: `{"rows": m, "cols": n, "data": [row-major numbers]}`. The
//! canonical form written by [`to_canonical_json`] uses exactly that key
//! order and shortest round-trip float formatting; its SHA-256 is the
//! matrix digest.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Csv,
    Json,
}

impl MatrixFormat {
    /// `.json` means JSON, anything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => MatrixFormat::Json,
            _ => MatrixFormat::Csv,
        }
    }
}

impl FromStr for MatrixFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(MatrixFormat::Csv),
            "json" => Ok(MatrixFormat::Json),
            other => Err(format!(
                "unknown matrix format '{other}' (expected csv or json)"
            )),
        }
    }
}

impl fmt::Display for MatrixFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatrixFormat::Csv => "csv",
            MatrixFormat::Json => "json",
        })
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixDoc {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

pub fn parse_matrix(path: &Path, format: MatrixFormat) -> Result<Matrix> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    match format {
        MatrixFormat::Csv => parse_csv(&text),
        MatrixFormat::Json => parse_json(&text),
    }
}

pub fn parse_csv(text: &str) -> Result<Matrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut row = Vec::new();
        let mut column = 1;
        for field in line.split(',') {
            let field = field.trim();
            let value: f64 = field.parse().map_err(|_| Error::Parse {
                line: line_no,
                column,
                message: format!("'{field}' is not a number"),
            })?;
            if !value.is_finite() {
                return Err(Error::NonFiniteEntry {
                    line: line_no,
                    column,
                });
            }
            row.push(value);
            column += field.len() + 1;
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::RaggedRows {
                    line: line_no,
                    found: row.len(),
                    expected: w,
                })
            }
            _ => {}
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 0,
            column: 0,
            message: "no data rows".into(),
        });
    }
    Matrix::from_rows(&rows)
}

pub fn parse_json(text: &str) -> Result<Matrix> {
    let doc: MatrixDoc = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if doc.rows * doc.cols != doc.data.len() {
        return Err(Error::ShapeMismatch {
            expected: doc.rows * doc.cols,
            found: doc.data.len(),
        });
    }
    Matrix::new(doc.rows, doc.cols, doc.data)
}

pub fn to_canonical_json(t: &Matrix) -> String {
    let doc = MatrixDoc {
        rows: t.rows(),
        cols: t.cols(),
        data: t.data().to_vec(),
    };
    serde_json::to_string(&doc).expect("finite floats always serialize")
}

/// Lowercase hex SHA-256 of [`to_canonical_json`].
pub fn matrix_digest(t: &Matrix) -> String {
    hex::encode(Sha256::digest(to_canonical_json(t).as_bytes()))
}
