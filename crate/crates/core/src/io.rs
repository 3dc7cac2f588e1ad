//! Transition-matrix input formats.
//!
//! Two formats are accepted: plain CSV (`m` lines of `m` comma-separated
//! decimal floats) and a structured JSON document
//! `{"m": <int>, "rows": [[...], ...]}`. Ragged rows are rejected in both.

use crate::error::{Error, Result};
use crate::matrix::Mat;

/// Parse either supported format, deciding by the leading non-space byte.
pub fn parse_matrix(text: &str) -> Result<Mat<f64>> {
    if text.trim_start().starts_with('{') {
        parse_structured(text)
    } else {
        parse_csv(text)
    }
}

/// CSV: one row per line, entries separated by commas.
pub fn parse_csv(text: &str) -> Result<Mat<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|cell| {
                cell.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}: {:?}", lineno + 1, cell)))
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Parse(format!(
                    "line {}: {} entries, expected {}",
                    lineno + 1,
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("empty matrix input".into()));
    }
    Mat::from_rows(&rows)
}

/// Structured text: `{"m": <int>, "rows": [[...], ...]}`.
pub fn parse_structured(text: &str) -> Result<Mat<f64>> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let m = value
        .get("m")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| Error::Parse("missing integer field \"m\"".into()))? as usize;
    let rows_value = value
        .get("rows")
        .and_then(serde_json::Value::as_array)
        .ok_or_else(|| Error::Parse("missing array field \"rows\"".into()))?;
    if rows_value.len() != m {
        return Err(Error::Parse(format!(
            "\"m\" is {m} but \"rows\" has {} rows",
            rows_value.len()
        )));
    }
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(m);
    for (i, row_value) in rows_value.iter().enumerate() {
        let row = row_value
            .as_array()
            .ok_or_else(|| Error::Parse(format!("row {i} is not an array")))?
            .iter()
            .map(|x| {
                x.as_f64()
                    .ok_or_else(|| Error::Parse(format!("row {i} holds a non-number")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if row.len() != m {
            return Err(Error::Parse(format!(
                "row {i} has {} entries, expected {m}",
                row.len()
            )));
        }
        rows.push(row);
    }
    Mat::from_rows(&rows)
}
