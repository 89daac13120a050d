//! Experiment grid definition and cell expansion.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use veccause::citest::ConditioningMode;
use veccause::synth::ModelParams;
use veccause::Group;

pub const SCHEMA_VERSION: u32 = 1;

/// Axis name that sets `dens_x` and `dens_y` together.
pub const DENS_XY: &str = "dens_xy";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GridError {
    #[error("unsupported schema version {0}")]
    Schema(u32),
    #[error("invalid grid: {0}")]
    Invalid(String),
    #[error("grid has {cells} cells, above the cap of {cap}")]
    TooManyCells { cells: usize, cap: usize },
    #[error("thread pool: {0}")]
    Threads(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    VecciPc,
    VecciFull,
    VanillaPc,
    Trace,
}

impl MethodKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MethodKind::VecciPc => "vecci_pc",
            MethodKind::VecciFull => "vecci_full",
            MethodKind::VanillaPc => "vanilla_pc",
            MethodKind::Trace => "trace",
        }
    }

    /// 1e-4 for Vanilla-PC, 0.01 otherwise. Unused by the trace method.
    pub fn default_alpha(self) -> f64 {
        match self {
            MethodKind::VanillaPc => 1e-4,
            _ => 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    #[default]
    Parcorr,
    Nonlinear,
    /// d-separation on the model's true structure.
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSpec {
    pub method: MethodKind,
    /// Row label in reports; derived from the other fields when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default = "default_alpha_sig")]
    pub alpha_sig: f64,
    #[serde(default)]
    pub backend: BackendKind,
    #[serde(default)]
    pub conditioning_mode: ConditioningMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub one_sided: Option<Group>,
    /// Largest skeleton conditioning set (PC-based methods).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_cond: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutations: Option<usize>,
    /// Fixed kernel ridge penalty for the nonlinear backend, which
    /// otherwise tunes its kernel by marginal likelihood.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ridge: Option<f64>,
}

fn default_alpha_sig() -> f64 {
    0.01
}

impl MethodSpec {
    pub fn new(method: MethodKind) -> Self {
        Self {
            method,
            label: None,
            alpha: None,
            alpha_sig: default_alpha_sig(),
            backend: BackendKind::default(),
            conditioning_mode: ConditioningMode::default(),
            one_sided: None,
            max_cond: None,
            permutations: None,
            ridge: None,
        }
    }

    pub fn with_backend(mut self, backend: BackendKind) -> Self {
        self.backend = backend;
        self
    }

    pub fn with_max_cond(mut self, max_cond: usize) -> Self {
        self.max_cond = Some(max_cond);
        self
    }

    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or_else(|| self.method.default_alpha())
    }

    pub fn label(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        let mut s = self.method.as_str().to_string();
        if let Some(g) = self.one_sided {
            s.push_str(match g {
                Group::X => "_x",
                Group::Y => "_y",
            });
        }
        match (self.method, self.backend) {
            (MethodKind::Trace, _) | (_, BackendKind::Parcorr) => {}
            (_, BackendKind::Nonlinear) => s.push_str("/nonlinear"),
            (_, BackendKind::Oracle) => s.push_str("/oracle"),
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub values: Vec<Value>,
}

impl Axis {
    pub fn new(name: &str, values: impl IntoIterator<Item = impl Into<Value>>) -> Self {
        Self {
            name: name.to_string(),
            values: values.into_iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentGrid {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    #[serde(default)]
    pub base: ModelParams,
    /// Cartesian product in the given order; the first axis varies slowest.
    #[serde(default)]
    pub axes: Vec<Axis>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    pub methods: Vec<MethodSpec>,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_max_cells")]
    pub max_cells: usize,
    /// Redraw structures until (C1) or (C2) holds. Needs graphs small
    /// enough for exhaustive checking; larger ones count as errors.
    #[serde(default)]
    pub filter_identifiable: bool,
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

fn default_repetitions() -> usize {
    100
}

fn default_max_cells() -> usize {
    10_000
}

/// One named coordinate of a cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coordinate {
    pub name: String,
    pub value: Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub coordinates: Vec<Coordinate>,
    pub params: ModelParams,
    /// Depends only on the master seed and the coordinates.
    pub seed: u64,
}

impl ExperimentGrid {
    pub fn new(base: ModelParams, methods: Vec<MethodSpec>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            base,
            axes: Vec::new(),
            repetitions: default_repetitions(),
            methods,
            master_seed: 0,
            max_cells: default_max_cells(),
            filter_identifiable: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, GridError> {
        let grid: Self =
            serde_json::from_str(text).map_err(|e| GridError::Invalid(e.to_string()))?;
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<(), GridError> {
        let bad = |msg: String| Err(GridError::Invalid(msg));
        if self.schema_version != SCHEMA_VERSION {
            return Err(GridError::Schema(self.schema_version));
        }
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1".into());
        }
        if self.methods.is_empty() {
            return bad("no methods selected".into());
        }
        let mut labels: Vec<String> = self.methods.iter().map(MethodSpec::label).collect();
        labels.sort();
        if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
            return bad(format!("duplicate method label {}", w[0]));
        }
        for spec in &self.methods {
            let a = spec.alpha();
            if !(0.0..=1.0).contains(&a) || !(spec.alpha_sig > 0.0 && spec.alpha_sig < 1.0) {
                return bad(format!("{}: alpha or alpha_sig out of range", spec.label()));
            }
            if spec.permutations.is_some_and(|p| p < 99) {
                return bad(format!(
                    "{}: at least 99 permutations required",
                    spec.label()
                ));
            }
        }
        for (k, axis) in self.axes.iter().enumerate() {
            if axis.values.is_empty() {
                return bad(format!("axis {} has no values", axis.name));
            }
            if axis.name == "seed" {
                return bad("seeds come from master_seed, not an axis".into());
            }
            if self.axes[..k].iter().any(|a| a.name == axis.name) {
                return bad(format!("axis {} appears twice", axis.name));
            }
        }
        let cells = self.cell_count();
        if cells > self.max_cells {
            return Err(GridError::TooManyCells {
                cells,
                cap: self.max_cells,
            });
        }
        self.base
            .validate()
            .map_err(|e| GridError::Invalid(e.to_string()))?;
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    /// All cells in row-major order.
    pub fn cells(&self) -> Result<Vec<Cell>, GridError> {
        self.validate()?;
        let mut out = Vec::with_capacity(self.cell_count());
        let mut index = vec![0usize; self.axes.len()];
        loop {
            let coordinates: Vec<Coordinate> = self
                .axes
                .iter()
                .zip(&index)
                .map(|(a, &i)| Coordinate {
                    name: a.name.clone(),
                    value: a.values[i].clone(),
                })
                .collect();
            let params = apply(&self.base, &coordinates)?;
            let seed = cell_seed(self.master_seed, &coordinates);
            out.push(Cell {
                coordinates,
                params,
                seed,
            });
            // Odometer increment, last axis fastest.
            let mut k = self.axes.len();
            loop {
                if k == 0 {
                    return Ok(out);
                }
                k -= 1;
                index[k] += 1;
                if index[k] < self.axes[k].values.len() {
                    break;
                }
                index[k] = 0;
            }
        }
    }
}

fn apply(base: &ModelParams, coordinates: &[Coordinate]) -> Result<ModelParams, GridError> {
    let Value::Object(mut fields) = serde_json::to_value(base).expect("params serialize") else {
        unreachable!("params serialize to an object")
    };
    for c in coordinates {
        let names: &[&str] = if c.name == DENS_XY {
            &["dens_x", "dens_y"]
        } else {
            &[c.name.as_str()]
        };
        for &name in names {
            if !fields.contains_key(name) {
                return Err(GridError::Invalid(format!("unknown axis {name}")));
            }
            fields.insert(name.to_string(), c.value.clone());
        }
    }
    let params: ModelParams = serde_json::from_value(Value::Object(fields))
        .map_err(|e| GridError::Invalid(format!("axis value: {e}")))?;
    params
        .validate()
        .map_err(|e| GridError::Invalid(e.to_string()))?;
    Ok(params)
}

/// FNV-1a over the canonical coordinate text, mixed into the master seed.
fn cell_seed(master: u64, coordinates: &[Coordinate]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for c in coordinates {
        for b in format!("{}={};", c.name, c.value).bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    veccause::seed::mix_seed(master, [h])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> ExperimentGrid {
        let mut g = ExperimentGrid::new(
            ModelParams::default(),
            vec![MethodSpec::new(MethodKind::VecciFull)],
        );
        g.axes = vec![
            Axis::new("dens_a", [0.1, 0.5]),
            Axis::new(DENS_XY, [0.01, 0.3, 0.5]),
        ];
        g
    }

    #[test]
    fn expands_row_major() {
        let cells = grid().cells().unwrap();
        assert_eq!(cells.len(), 6);
        assert_eq!(cells[1].params.dens_a, 0.1);
        assert_eq!(cells[1].params.dens_x, 0.3);
        assert_eq!(cells[1].params.dens_y, 0.3);
        assert_eq!(cells[3].params.dens_a, 0.5);
    }

    #[test]
    fn cell_seeds_ignore_other_cells() {
        let a = grid().cells().unwrap();
        let mut wider = grid();
        wider.axes[1].values.push(0.9.into());
        let b = wider.cells().unwrap();
        assert_eq!(a[0].seed, b[0].seed);
        assert_eq!(a[5].seed, b[6].seed);
        assert_ne!(a[0].seed, a[1].seed);
    }

    #[test]
    fn rejects_bad_grids() {
        let mut g = grid();
        g.repetitions = 0;
        assert!(g.validate().is_err());
        let mut g = grid();
        g.methods.clear();
        assert!(g.validate().is_err());
        let mut g = grid();
        g.max_cells = 5;
        assert!(matches!(
            g.validate(),
            Err(GridError::TooManyCells { cells: 6, cap: 5 })
        ));
        let mut g = grid();
        g.axes.push(Axis::new("bogus", [1]));
        assert!(g.cells().is_err());
        let mut g = grid();
        g.axes.push(Axis::new("dens_a", [2.0]));
        assert!(g.validate().is_err());
        let mut g = grid();
        g.axes = vec![Axis::new("dens_a", [2.0])];
        assert!(g.cells().is_err());
        let mut g = grid();
        g.methods.push(MethodSpec::new(MethodKind::VecciFull));
        assert!(g.validate().is_err());
        let mut g = grid();
        g.methods[0].permutations = Some(50);
        assert!(g.validate().is_err());
    }

    #[test]
    fn json_defaults() {
        let g = ExperimentGrid::from_json(
            r#"{"methods": [{"method": "vanilla_pc"}, {"method": "trace"}]}"#,
        )
        .unwrap();
        assert_eq!(g.repetitions, 100);
        assert_eq!(g.methods[0].alpha(), 1e-4);
        assert_eq!(g.methods[1].alpha(), 0.01);
        assert_eq!(g.cells().unwrap().len(), 1);
        assert!(ExperimentGrid::from_json(
            r#"{"schema_version": 2, "methods": [{"method": "trace"}]}"#
        )
        .is_err());
    }
}
