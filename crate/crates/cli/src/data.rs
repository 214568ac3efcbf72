//! Univariate sample files.

use std::fs;
use std::path::Path;

use crate::CliError;

/// Nonnegative sample read from one CSV column.
#[derive(Debug, Clone)]
pub struct DataFile {
    pub values: Vec<f64>,
}

fn parse_value(field: &str) -> Option<f64> {
    field.trim().parse::<f64>().ok()
}

impl DataFile {
    /// One value per line, or the `column` (name or 0-based index) of a
    /// delimited file. A first row that does not parse as numbers is taken
    /// as the header.
    pub fn read(path: &Path, column: Option<&str>) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        let values = parse_text(&text, column)
            .map_err(|m| CliError::Usage(format!("{}: {m}", path.display())))?;
        Ok(DataFile { values })
    }
}

pub fn parse_text(text: &str, column: Option<&str>) -> Result<Vec<f64>, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut records = Vec::new();
    for r in reader.records() {
        let r = r.map_err(|e| format!("malformed CSV: {e}"))?;
        if r.iter().all(|f| f.is_empty()) {
            continue;
        }
        records.push(r);
    }
    let header = match records.first() {
        Some(first) if first.iter().any(|f| parse_value(f).is_none()) => Some(records.remove(0)),
        _ => None,
    };
    let idx = match (column, &header) {
        (None, _) => 0,
        (Some(c), Some(h)) => match h.iter().position(|f| f == c) {
            Some(i) => i,
            None => c
                .parse::<usize>()
                .map_err(|_| format!("no column named '{c}'"))?,
        },
        (Some(c), None) => c
            .parse::<usize>()
            .map_err(|_| format!("file has no header, so column '{c}' must be an index"))?,
    };
    let mut values = Vec::with_capacity(records.len());
    for (line, r) in records.iter().enumerate() {
        let field = r
            .get(idx)
            .ok_or_else(|| format!("row {} has no column {idx}", line + 1))?;
        if field.is_empty() {
            continue;
        }
        let v = parse_value(field).ok_or_else(|| format!("'{field}' is not a number"))?;
        if !v.is_finite() || v < 0.0 {
            return Err(format!("values must be finite and nonnegative, got {v}"));
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err("no values".into());
    }
    Ok(values)
}
