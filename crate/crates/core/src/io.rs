//! Matrix and family file formats.
//!
//! A matrix is either a JSON object `{"rows": m, "cols": n, "data": [...]}` with `m·n` floats in
//! row-major order, or CSV with one row per line. CSV fields are separated by commas and may be
//! padded with spaces or tabs; blank lines and lines starting with `#` are skipped, and every row
//! must have the same number of fields. A file whose first non-blank character is `{` is read as
//! JSON. Line and column numbers in diagnostics are one-based.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seq::VectorFamily;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl MatrixFile {
    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        let data = m.row_iter().flat_map(|r| r.iter().copied().collect::<Vec<_>>()).collect();
        MatrixFile { rows: m.nrows(), cols: m.ncols(), data }
    }
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse { line: e.line(), column: e.column(), message: e.to_string() }
}

/// One-based position of byte `offset`.
fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

pub fn parse_matrix_json(text: &str) -> Result<DMatrix<f64>> {
    let f: MatrixFile = serde_json::from_str(text).map_err(json_error)?;
    if f.data.len() != f.rows * f.cols {
        let (line, column) = position(text, text.find("\"data\"").unwrap_or(0));
        return Err(Error::Parse {
            line,
            column,
            message: format!("expected rows*cols = {} entries, found {}", f.rows * f.cols, f.data.len()),
        });
    }
    if f.rows == 0 || f.cols == 0 {
        return Err(Error::Parse { line: 1, column: 1, message: format!("empty {}x{} matrix", f.rows, f.cols) });
    }
    Ok(DMatrix::from_row_slice(f.rows, f.cols, &f.data))
}

pub fn parse_matrix_csv(text: &str) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut row = Vec::new();
        let mut col = 1;
        for field in line.split(',') {
            let lead = field.chars().take_while(|c| c.is_whitespace()).count();
            let v = field.trim();
            let parsed = v.parse::<f64>().ok().filter(|x| x.is_finite());
            match parsed {
                Some(x) => row.push(x),
                None => {
                    return Err(Error::Parse {
                        line: i + 1,
                        column: col + lead,
                        message: format!("expected a finite number, found {v:?}"),
                    })
                }
            }
            col += field.chars().count() + 1;
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Parse {
                    line: i + 1,
                    column: 1,
                    message: format!("row has {} fields, expected {}", row.len(), first.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse { line: 1, column: 1, message: "no matrix rows".into() });
    }
    let (m, n) = (rows.len(), rows[0].len());
    Ok(DMatrix::from_fn(m, n, |i, j| rows[i][j]))
}

/// JSON when the first non-blank character is `{`, CSV otherwise.
pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>> {
    if text.trim_start().starts_with('{') {
        parse_matrix_json(text)
    } else {
        parse_matrix_csv(text)
    }
}

pub fn load_matrix(path: &Path) -> Result<DMatrix<f64>> {
    parse_matrix(&std::fs::read_to_string(path)?)
}

pub fn matrix_to_json(m: &DMatrix<f64>) -> String {
    serde_json::to_string(&MatrixFile::from_matrix(m)).expect("plain data serializes")
}

/// `{"space": {"dim": n, "p": ...}, "vectors": [[...], ...]}`, re-validated after decoding.
pub fn parse_family_json(text: &str) -> Result<VectorFamily> {
    let raw: VectorFamily = serde_json::from_str(text).map_err(json_error)?;
    VectorFamily::new(raw.space, raw.vectors)
}

pub fn load_family(path: &Path) -> Result<VectorFamily> {
    parse_family_json(&std::fs::read_to_string(path)?)
}
