//! Grid execution and tallies.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use veccause::algorithms::{trace_method, vanilla_pc, vecci_full, vecci_pc_with};
use veccause::citest::NonlinearSettings;
use veccause::graph::{check_condition, Condition};
use veccause::seed::mix_seed;
use veccause::synth::{random_model, LinearGroupModel, ModelParams};
use veccause::{CiBackend, DataMatrix, Decision};

use crate::grid::{
    BackendKind, Cell, Coordinate, ExperimentGrid, GridError, MethodKind, MethodSpec,
};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "VECCAUSE_THREADS";

/// Structure redraws allowed per repetition when filtering.
const FILTER_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodTally {
    pub method: String,
    pub correct: usize,
    pub wrong: usize,
    pub indeterminate: usize,
    /// Repetitions where the model could not be drawn or the method failed.
    pub errors: usize,
    /// Mean statistic over repetitions without error.
    pub mean_crit: Option<f64>,
    pub seconds: f64,
}

impl MethodTally {
    fn empty(method: String) -> Self {
        Self {
            method,
            correct: 0,
            wrong: 0,
            indeterminate: 0,
            errors: 0,
            mean_crit: None,
            seconds: 0.0,
        }
    }

    pub fn repetitions(&self) -> usize {
        self.correct + self.wrong + self.indeterminate + self.errors
    }

    pub fn correct_fraction(&self) -> f64 {
        self.correct as f64 / self.repetitions() as f64
    }

    pub fn wrong_fraction(&self) -> f64 {
        self.wrong as f64 / self.repetitions() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub coordinates: Vec<Coordinate>,
    pub methods: Vec<MethodTally>,
}

impl CellResult {
    pub fn method(&self, label: &str) -> Option<&MethodTally> {
        self.methods.iter().find(|t| t.method == label)
    }

    pub fn coordinate(&self, name: &str) -> Option<&serde_json::Value> {
        self.coordinates
            .iter()
            .find(|c| c.name == name)
            .map(|c| &c.value)
    }
}

/// Outcome of one method on one repetition.
#[derive(Debug, Clone, Copy)]
struct Outcome {
    result: Option<(Decision, f64)>,
    seconds: f64,
}

/// Runs the grid, capping threads by `VECCAUSE_THREADS` when set.
pub fn run_grid(grid: &ExperimentGrid) -> Result<Vec<CellResult>, GridError> {
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0);
    run_grid_with_threads(grid, threads)
}

/// Tallies are identical for every thread count.
pub fn run_grid_with_threads(
    grid: &ExperimentGrid,
    threads: Option<usize>,
) -> Result<Vec<CellResult>, GridError> {
    let cells = grid.cells()?;
    let tasks: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..grid.repetitions).map(move |r| (c, r)))
        .collect();
    let work = || -> Vec<Vec<Outcome>> {
        tasks
            .par_iter()
            .map(|&(c, r)| run_repetition(grid, &cells[c], r))
            .collect()
    };
    let outcomes = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| GridError::Threads(e.to_string()))?
            .install(work),
        None => work(),
    };

    let mut results = Vec::with_capacity(cells.len());
    for (c, cell) in cells.iter().enumerate() {
        let reps = &outcomes[c * grid.repetitions..(c + 1) * grid.repetitions];
        let methods = grid
            .methods
            .iter()
            .enumerate()
            .map(|(k, spec)| tally(spec.label(), reps.iter().map(|o| o[k])))
            .collect();
        results.push(CellResult {
            coordinates: cell.coordinates.clone(),
            methods,
        });
    }
    Ok(results)
}

fn tally(label: String, outcomes: impl Iterator<Item = Outcome>) -> MethodTally {
    let mut t = MethodTally::empty(label);
    let mut crit_sum = 0.0;
    for o in outcomes {
        t.seconds += o.seconds;
        match o.result {
            None => t.errors += 1,
            Some((d, crit)) => {
                crit_sum += crit;
                match d {
                    Decision::XCausesY => t.correct += 1,
                    Decision::YCausesX => t.wrong += 1,
                    Decision::Indeterminate => t.indeterminate += 1,
                }
            }
        }
    }
    let ok = t.correct + t.wrong + t.indeterminate;
    t.mean_crit = (ok > 0).then(|| crit_sum / ok as f64);
    t
}

pub fn repetition_seed(cell: &Cell, repetition: usize) -> u64 {
    mix_seed(cell.seed, [repetition as u64])
}

/// The model and data of one repetition, as every method sees them.
pub fn draw_repetition(
    grid: &ExperimentGrid,
    cell: &Cell,
    repetition: usize,
) -> Result<(LinearGroupModel, DataMatrix), String> {
    let seed = repetition_seed(cell, repetition);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = cell.params.clone();
    params.seed = seed;
    let model = if grid.filter_identifiable {
        identifiable_model(&params, &mut rng)?
    } else {
        random_model(&params, &mut rng).map_err(|e| e.to_string())?
    };
    let data = model.sample(params.sample_size, &mut rng);
    Ok((model, data))
}

fn identifiable_model(
    params: &ModelParams,
    rng: &mut ChaCha8Rng,
) -> Result<LinearGroupModel, String> {
    for _ in 0..FILTER_ATTEMPTS {
        let m = random_model(params, rng).map_err(|e| e.to_string())?;
        let c1 = check_condition(&m.structure, Condition::C1).map_err(|e| e.to_string())?;
        if c1 || check_condition(&m.structure, Condition::C2).map_err(|e| e.to_string())? {
            return Ok(m);
        }
    }
    Err(format!(
        "no identifiable structure in {FILTER_ATTEMPTS} draws"
    ))
}

fn run_repetition(grid: &ExperimentGrid, cell: &Cell, repetition: usize) -> Vec<Outcome> {
    let drawn = draw_repetition(grid, cell, repetition);
    let seed = repetition_seed(cell, repetition);
    grid.methods
        .iter()
        .enumerate()
        .map(|(k, spec)| match &drawn {
            Err(_) => Outcome {
                result: None,
                seconds: 0.0,
            },
            Ok((model, data)) => {
                let start = Instant::now();
                let result = run_method(spec, model, data, mix_seed(seed, [k as u64])).ok();
                Outcome {
                    result,
                    seconds: start.elapsed().as_secs_f64(),
                }
            }
        })
        .collect()
}

/// Decision and statistic of one method on one data set.
pub fn run_method(
    spec: &MethodSpec,
    model: &LinearGroupModel,
    data: &DataMatrix,
    seed: u64,
) -> Result<(Decision, f64), String> {
    let (n, m) = (model.n(), model.m());
    let x: Vec<usize> = (0..n).collect();
    let y: Vec<usize> = (n..n + m).collect();
    if spec.method == MethodKind::Trace {
        let r = trace_method(data, &x, &y).map_err(|e| e.to_string())?;
        return Ok((r.decision, r.crit));
    }
    let backend = match spec.backend {
        BackendKind::Oracle => Ok(CiBackend::oracle(model.structure.clone())),
        BackendKind::Parcorr => {
            CiBackend::par_corr(data.clone(), x, y, spec.alpha_sig, spec.conditioning_mode)
        }
        BackendKind::Nonlinear => {
            let mut settings = NonlinearSettings {
                alpha_sig: spec.alpha_sig,
                seed,
                ..NonlinearSettings::default()
            };
            if let Some(p) = spec.permutations {
                settings.permutations = p;
            }
            if let Some(r) = spec.ridge {
                settings.kernel.ridge = r;
                settings.kernel.tune = false;
            }
            CiBackend::nonlinear(data.clone(), x, y, settings)
        }
    }
    .map_err(|e| e.to_string())?;
    let alpha = spec.alpha();
    let r = match spec.method {
        MethodKind::VecciPc => vecci_pc_with(&backend, alpha, spec.one_sided, spec.max_cond),
        MethodKind::VecciFull => vecci_full(&backend, alpha, spec.one_sided),
        MethodKind::VanillaPc => {
            let v = vanilla_pc(&backend, alpha, spec.max_cond).map_err(|e| e.to_string())?;
            return Ok((v.decision, v.edge_diff));
        }
        MethodKind::Trace => unreachable!("handled above"),
    }
    .map_err(|e| e.to_string())?;
    Ok((r.decision, r.crit))
}
