//! CSV and JSON reports of grid results.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde_json::{Map, Value};

use crate::grid::{Coordinate, SCHEMA_VERSION};
use crate::run::{CellResult, MethodTally};

const TALLY_COLUMNS: [&str; 7] = [
    "method",
    "correct",
    "wrong",
    "indeterminate",
    "errors",
    "mean_crit",
    "seconds",
];

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("nothing to report: {0}")]
    Empty(&'static str),
    #[error("malformed report: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown report format {other:?} (csv or json)")),
        }
    }
}

/// One row per cell and method: the axes first, then the tally columns.
pub fn write_report(
    results: &[CellResult],
    format: ReportFormat,
    path: &Path,
) -> Result<(), ReportError> {
    if results.is_empty() {
        return Err(ReportError::Empty("no cells"));
    }
    if results.iter().any(|r| r.methods.is_empty()) {
        return Err(ReportError::Empty("no methods"));
    }
    match format {
        ReportFormat::Csv => fs::write(path, to_csv(results)?)?,
        ReportFormat::Json => fs::write(path, to_json(results)?)?,
    }
    Ok(())
}

pub fn to_csv(results: &[CellResult]) -> Result<Vec<u8>, ReportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = results[0]
        .coordinates
        .iter()
        .map(|c| c.name.as_str())
        .collect();
    header.extend(TALLY_COLUMNS);
    w.write_record(&header)?;
    for cell in results {
        for t in &cell.methods {
            let mut row: Vec<String> = cell
                .coordinates
                .iter()
                .map(|c| value_text(&c.value))
                .collect();
            row.extend([
                t.method.clone(),
                t.correct.to_string(),
                t.wrong.to_string(),
                t.indeterminate.to_string(),
                t.errors.to_string(),
                t.mean_crit.map(|v| v.to_string()).unwrap_or_default(),
                t.seconds.to_string(),
            ]);
            w.write_record(&row)?;
        }
    }
    w.into_inner().map_err(|e| ReportError::Io(e.into_error()))
}

fn value_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn to_json(results: &[CellResult]) -> Result<String, ReportError> {
    let mut rows = Vec::new();
    for cell in results {
        for t in &cell.methods {
            let mut row = Map::new();
            for c in &cell.coordinates {
                row.insert(c.name.clone(), c.value.clone());
            }
            let Value::Object(tally) = serde_json::to_value(t)? else {
                unreachable!("tallies serialize to objects")
            };
            row.extend(tally);
            rows.push(Value::Object(row));
        }
    }
    let mut doc = Map::new();
    doc.insert("schema_version".into(), SCHEMA_VERSION.into());
    doc.insert("rows".into(), Value::Array(rows));
    Ok(serde_json::to_string_pretty(&Value::Object(doc))?)
}

/// Parses a JSON report back into cells. Consecutive rows with equal
/// coordinates form one cell.
pub fn read_report(path: &Path) -> Result<Vec<CellResult>, ReportError> {
    parse_json(&fs::read_to_string(path)?)
}

pub fn parse_json(text: &str) -> Result<Vec<CellResult>, ReportError> {
    let doc: Value = serde_json::from_str(text)?;
    match doc.get("schema_version").and_then(Value::as_u64) {
        Some(v) if v == SCHEMA_VERSION as u64 => {}
        other => return Err(ReportError::Malformed(format!("schema_version {other:?}"))),
    }
    let rows = doc
        .get("rows")
        .and_then(Value::as_array)
        .ok_or_else(|| ReportError::Malformed("missing rows".into()))?;
    let mut cells: Vec<CellResult> = Vec::new();
    for row in rows {
        let obj = row
            .as_object()
            .ok_or_else(|| ReportError::Malformed("row is not an object".into()))?;
        let mut coordinates = Vec::new();
        let mut tally = Map::new();
        for (k, v) in obj {
            if TALLY_COLUMNS.contains(&k.as_str()) {
                tally.insert(k.clone(), v.clone());
            } else {
                coordinates.push(Coordinate {
                    name: k.clone(),
                    value: v.clone(),
                });
            }
        }
        let tally: MethodTally = serde_json::from_value(Value::Object(tally))?;
        match cells.last_mut() {
            Some(last) if last.coordinates == coordinates => last.methods.push(tally),
            _ => cells.push(CellResult {
                coordinates,
                methods: vec![tally],
            }),
        }
    }
    Ok(cells)
}
