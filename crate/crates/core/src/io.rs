//! Text formats: delimited matrices, flat `key = value` configuration files
//! and comma-separated argument lists.
//!
//! All parsers take untrusted input and report the offending line.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::data::DataSet;
use crate::error::{Result, SdrError};
use crate::linalg::SymMatrix;

/// Parses a matrix, one row per line, fields separated by commas or by
/// whitespace. Blank lines and lines starting with `#` are skipped. Every
/// value must be a finite number and all rows must have the same length.
pub fn parse_matrix(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = if line.contains(',') {
            line.split(',').map(str::trim).collect()
        } else {
            line.split_whitespace().collect()
        };
        let mut row = Vec::with_capacity(fields.len());
        for (col, field) in fields.iter().enumerate() {
            if field.is_empty() {
                return Err(SdrError::parse(line_no, format!("empty field in column {}", col + 1)));
            }
            let value: f64 = field
                .parse()
                .map_err(|_| SdrError::parse(line_no, format!("`{field}` is not a number")))?;
            if !value.is_finite() {
                return Err(SdrError::parse(line_no, format!("non-finite value `{field}`")));
            }
            row.push(value);
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(SdrError::parse(
                    line_no,
                    format!("expected {} fields, found {}", first.len(), row.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(SdrError::parse(0, "no data rows"));
    }
    Ok(rows)
}

pub fn parse_dataset(text: &str) -> Result<DataSet> {
    DataSet::from_rows(&parse_matrix(text)?)
}

/// Square, symmetric up to `1e-9` relative to the largest entry.
pub fn parse_sym_matrix(text: &str) -> Result<SymMatrix> {
    let rows = parse_matrix(text)?;
    let q = rows.len();
    if rows[0].len() != q {
        return Err(SdrError::parse(0, format!("matrix is {q}×{}, expected square", rows[0].len())));
    }
    let scale = rows.iter().flatten().fold(0.0_f64, |a, v| a.max(v.abs()));
    for (i, row) in rows.iter().enumerate() {
        for (j, other) in rows.iter().enumerate().take(i) {
            if (row[j] - other[i]).abs() > 1e-9 * scale {
                return Err(SdrError::parse(
                    i + 1,
                    format!("matrix is not symmetric at ({}, {})", i + 1, j + 1),
                ));
            }
        }
    }
    SymMatrix::from_rows(&rows)
}

pub fn read_dataset(path: &Path) -> Result<DataSet> {
    parse_dataset(&fs::read_to_string(path)?)
}

pub fn read_sym_matrix(path: &Path) -> Result<SymMatrix> {
    parse_sym_matrix(&fs::read_to_string(path)?)
}

/// Parses `key = value` lines. Keys use `-` or `_` interchangeably and are
/// returned with `-`. Blank lines and `#` comments are skipped; a repeated
/// key is an error.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| SdrError::parse(line_no, "expected `key = value`"))?;
        let key = key.trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return Err(SdrError::parse(line_no, format!("invalid key `{key}`")));
        }
        let key = key.replace('_', "-").to_ascii_lowercase();
        let value = value.trim().to_string();
        if out.insert(key.clone(), value).is_some() {
            return Err(SdrError::parse(line_no, format!("duplicate key `{key}`")));
        }
    }
    Ok(out)
}

/// Comma-separated, non-empty list such as `100,200,500`.
pub fn parse_list<T: FromStr>(text: &str) -> Result<Vec<T>> {
    let items: Vec<&str> = text.split(',').map(str::trim).collect();
    if items.iter().any(|s| s.is_empty()) {
        return Err(SdrError::parse(1, format!("empty item in list `{text}`")));
    }
    items
        .into_iter()
        .map(|s| s.parse().map_err(|_| SdrError::parse(1, format!("invalid list item `{s}`"))))
        .collect()
}

/// Writes one value per line with 17 significant digits.
pub fn format_vector(values: &[f64]) -> String {
    values.iter().map(|v| format!("{}\n", format_float(*v))).collect()
}

/// 17 significant digits in scientific notation; `NaN` for NaN.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.16e}")
    }
}
