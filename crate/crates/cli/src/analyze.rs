//! `veccause analyze`: direction inference on a two-group CSV file.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use veccause::algorithms::{trace_method, vanilla_pc, vecci_full, vecci_pc_with};
use veccause::citest::NonlinearSettings;
use veccause::{CiBackend, ConditioningMode, DataMatrix, Group};
use veccause_bench::MethodKind;

use crate::error::{from_algorithm, from_stats, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CiBackendKind {
    #[default]
    Parcorr,
    Nonlinear,
}

fn default_method() -> MethodKind {
    MethodKind::VecciFull
}

fn default_alpha_sig() -> f64 {
    0.01
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub x_columns: Vec<String>,
    pub y_columns: Vec<String>,
    #[serde(default = "default_method")]
    pub method: MethodKind,
    /// Defaults to 0.01, or 1e-4 for Vanilla-PC.
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default = "default_alpha_sig")]
    pub alpha_sig: f64,
    #[serde(default)]
    pub ci_backend: CiBackendKind,
    #[serde(default)]
    pub conditioning_mode: ConditioningMode,
    #[serde(default)]
    pub one_sided: Option<Group>,
    #[serde(default)]
    pub max_cond: Option<usize>,
    /// Permutation seed of the nonlinear backend.
    #[serde(default)]
    pub seed: Option<u64>,
}

impl AnalysisConfig {
    /// Config file fields overlaid with flag values.
    pub fn merge(file: Option<&Path>, overrides: Map<String, Value>) -> Result<Self, CliError> {
        let mut fields = match file {
            None => Map::new(),
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::input(format!("cannot read config {}: {e}", path.display()))
                })?;
                match serde_json::from_str(&text) {
                    Ok(Value::Object(m)) => m,
                    Ok(_) => return Err(CliError::input("config must be a JSON object")),
                    Err(e) => {
                        return Err(CliError::input(format!("config {}: {e}", path.display())))
                    }
                }
            }
        };
        fields.extend(overrides);
        let config: Self = serde_json::from_value(Value::Object(fields))
            .map_err(|e| CliError::input(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.x_columns.is_empty() || self.y_columns.is_empty() {
            return Err(CliError::input(
                "x_columns and y_columns must both be non-empty",
            ));
        }
        let mut all: Vec<&String> = self.x_columns.iter().chain(&self.y_columns).collect();
        all.sort();
        if let Some(w) = all.windows(2).find(|w| w[0] == w[1]) {
            return Err(CliError::input(format!(
                "column {:?} listed twice or in both groups",
                w[0]
            )));
        }
        let alpha = self.alpha();
        if !(0.0..=1.0).contains(&alpha) {
            return Err(CliError::input(format!("alpha {alpha} outside [0, 1]")));
        }
        if !(self.alpha_sig > 0.0 && self.alpha_sig < 1.0) {
            return Err(CliError::input(format!(
                "alpha_sig {} outside (0, 1)",
                self.alpha_sig
            )));
        }
        Ok(())
    }

    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or_else(|| self.method.default_alpha())
    }
}

/// Header row, comma-separated numeric fields.
pub fn read_csv(path: &Path) -> Result<DataMatrix, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::input(format!("cannot open {}: {e}", path.display())))?;
    let names: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::input(format!("header: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut values = Vec::new();
    let mut rows = 0;
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::input(format!("row {}: {e}", r + 1)))?;
        for (c, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                CliError::input(format!(
                    "row {}, column {:?}: not a number: {field:?}",
                    r + 1,
                    names[c]
                ))
            })?;
            values.push(v);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(CliError::input(format!(
            "{} has no data rows",
            path.display()
        )));
    }
    let matrix = DMatrix::from_row_slice(rows, names.len(), &values);
    DataMatrix::new(matrix, names).map_err(|e| match e {
        veccause::stats::StatsError::InsufficientSamples { .. } => from_stats(&e),
        other => CliError::input(other.to_string()),
    })
}

fn indices(data: &DataMatrix, names: &[String]) -> Result<Vec<usize>, CliError> {
    names
        .iter()
        .map(|n| {
            data.column_index(n)
                .ok_or_else(|| CliError::input(format!("column {n:?} not found")))
        })
        .collect()
}

/// Runs the configured method and returns its report as JSON.
pub fn analyze(data: &DataMatrix, config: &AnalysisConfig, seed: u64) -> Result<Value, CliError> {
    let x = indices(data, &config.x_columns)?;
    let y = indices(data, &config.y_columns)?;
    let samples = data.n_samples();
    let needed = x.len() + y.len() + 3;
    if samples <= needed {
        return Err(CliError::samples(format!(
            "{samples} rows; more than {needed} needed for {} variables",
            x.len() + y.len()
        )));
    }
    let values = data.values();
    for &c in x.iter().chain(&y) {
        let col = values.column(c);
        if col.iter().all(|&v| v == col[0]) {
            return Err(CliError::numeric(format!(
                "column {:?} is constant",
                data.column_names()[c]
            )));
        }
    }
    let json =
        |v: Result<Value, serde_json::Error>| v.map_err(|e| CliError::numeric(e.to_string()));
    if config.method == MethodKind::Trace {
        let r = trace_method(data, &x, &y).map_err(|e| from_stats(&e))?;
        return json(serde_json::to_value(r));
    }
    let backend = match config.ci_backend {
        CiBackendKind::Parcorr => CiBackend::par_corr(
            data.clone(),
            x,
            y,
            config.alpha_sig,
            config.conditioning_mode,
        ),
        CiBackendKind::Nonlinear => CiBackend::nonlinear(
            data.clone(),
            x,
            y,
            NonlinearSettings {
                alpha_sig: config.alpha_sig,
                seed,
                ..NonlinearSettings::default()
            },
        ),
    }
    .map_err(|e| CliError::input(e.to_string()))?;
    let alpha = config.alpha();
    match config.method {
        MethodKind::VecciPc => json(serde_json::to_value(
            vecci_pc_with(&backend, alpha, config.one_sided, config.max_cond)
                .map_err(|e| from_algorithm(&e))?,
        )),
        MethodKind::VecciFull => json(serde_json::to_value(
            vecci_full(&backend, alpha, config.one_sided).map_err(|e| from_algorithm(&e))?,
        )),
        MethodKind::VanillaPc => json(serde_json::to_value(
            vanilla_pc(&backend, alpha, config.max_cond).map_err(|e| from_algorithm(&e))?,
        )),
        MethodKind::Trace => unreachable!("handled above"),
    }
}
