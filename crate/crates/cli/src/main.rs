//! `veccause`: causal direction between two groups of variables.

mod analyze;
mod error;
mod simulate;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{Map, Value};
use veccause::synth::{Mechanism, ModelParams};
use veccause_bench::{run_grid, run_grid_with_threads, write_report, ExperimentGrid, ReportFormat};

use crate::analyze::{analyze, read_csv, AnalysisConfig};
use crate::error::{exit, CliError};
use crate::simulate::{simulate, to_csv, Sidecar};

#[derive(Parser)]
#[command(
    name = "veccause",
    version,
    about = "Infer whether X causes Y or Y causes X from grouped data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Infer the causal direction between two column groups of a CSV file.
    Analyze(AnalyzeArgs),
    /// Sample one synthetic model with known direction X -> Y.
    Simulate(SimulateArgs),
    /// Run an experiment grid and write a report.
    Bench(BenchArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// CSV with a header row.
    csv: PathBuf,
    /// JSON analysis config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated cause-candidate columns.
    #[arg(long, value_delimiter = ',')]
    x_columns: Option<Vec<String>>,
    /// Comma-separated effect-candidate columns.
    #[arg(long, value_delimiter = ',')]
    y_columns: Option<Vec<String>>,
    /// vecci_pc, vecci_full, vanilla_pc or trace.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    alpha_sig: Option<f64>,
    /// parcorr or nonlinear.
    #[arg(long)]
    ci_backend: Option<String>,
    /// explicit or residualize.
    #[arg(long)]
    conditioning_mode: Option<String>,
    /// Only compare densities of one group: X or Y.
    #[arg(long)]
    one_sided: Option<String>,
    #[arg(long)]
    max_cond: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 30)]
    n: usize,
    #[arg(long, default_value_t = 30)]
    m: usize,
    /// Sample size.
    #[arg(long = "N", default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0.1)]
    dens_x: f64,
    #[arg(long, default_value_t = 0.1)]
    dens_y: f64,
    #[arg(long, default_value_t = 0.5)]
    dens_a: f64,
    /// Smallest interaction magnitude.
    #[arg(long, default_value_t = 0.0)]
    effect_min: f64,
    /// Largest interaction magnitude.
    #[arg(long, default_value_t = 0.7)]
    effect_max: f64,
    /// linear or quadratic.
    #[arg(long, default_value = "linear")]
    mechanism: String,
    /// Drop the effect noise, making Y a function of X.
    #[arg(long)]
    noiseless: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Ground-truth model JSON.
    #[arg(long, default_value = "model.json")]
    model_out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    grid: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// csv or json.
    #[arg(long, default_value = "csv")]
    format: String,
    /// Worker threads; defaults to VECCAUSE_THREADS or all cores.
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(a) => run_analyze(a),
        Command::Simulate(s) => run_simulate(s),
        Command::Bench(b) => run_bench(b),
    };
    match result {
        Ok(()) => ExitCode::from(exit::OK as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}

fn draw_seed(seed: Option<u64>) -> u64 {
    let seed = seed.unwrap_or_else(rand::random);
    eprintln!("seed: {seed}");
    seed
}

fn run_analyze(a: AnalyzeArgs) -> Result<(), CliError> {
    let mut overrides = Map::new();
    let mut set = |key: &str, v: Option<Value>| {
        if let Some(v) = v {
            overrides.insert(key.to_string(), v);
        }
    };
    set("x_columns", a.x_columns.map(Value::from));
    set("y_columns", a.y_columns.map(Value::from));
    set("method", a.method.map(Value::from));
    set("alpha", a.alpha.map(Value::from));
    set("alpha_sig", a.alpha_sig.map(Value::from));
    set(
        "ci_backend",
        a.ci_backend.map(|s| Value::from(s.to_ascii_lowercase())),
    );
    set(
        "conditioning_mode",
        a.conditioning_mode
            .map(|s| Value::from(s.to_ascii_lowercase())),
    );
    set(
        "one_sided",
        a.one_sided.map(|s| Value::from(s.to_ascii_uppercase())),
    );
    set("max_cond", a.max_cond.map(Value::from));
    set("seed", a.seed.map(Value::from));
    let config = AnalysisConfig::merge(a.config.as_deref(), overrides)?;
    let data = read_csv(&a.csv)?;
    let seed = draw_seed(config.seed);
    let report = analyze(&data, &config, seed)?;
    let text =
        serde_json::to_string_pretty(&report).map_err(|e| CliError::numeric(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn run_simulate(s: SimulateArgs) -> Result<(), CliError> {
    let mechanism: Mechanism =
        serde_json::from_value(Value::from(s.mechanism.to_ascii_lowercase())).map_err(|_| {
            CliError::input(format!(
                "unknown mechanism {:?} (linear or quadratic)",
                s.mechanism
            ))
        })?;
    let params = ModelParams {
        n: s.n,
        m: s.m,
        sample_size: s.samples,
        dens_x: s.dens_x,
        dens_y: s.dens_y,
        dens_a: s.dens_a,
        effect_interval: (s.effect_min, s.effect_max),
        mechanism,
        seed: draw_seed(s.seed),
        effect_noise: !s.noiseless,
    };
    let (model, data) = simulate(&params)?;
    let sidecar = serde_json::to_string_pretty(&Sidecar {
        params: &params,
        model: &model,
    })
    .map_err(|e| CliError::io(e.to_string()))?;
    std::fs::write(&s.model_out, sidecar)
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", s.model_out.display())))?;
    let csv = to_csv(&data)?;
    match &s.out {
        Some(path) => std::fs::write(path, csv)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(&csv)
            .map_err(|e| CliError::io(e.to_string())),
    }
}

fn run_bench(b: BenchArgs) -> Result<(), CliError> {
    let format: ReportFormat = b.format.parse().map_err(CliError::input)?;
    let text = std::fs::read_to_string(&b.grid)
        .map_err(|e| CliError::input(format!("cannot read grid {}: {e}", b.grid.display())))?;
    let grid = ExperimentGrid::from_json(&text).map_err(|e| CliError::input(e.to_string()))?;
    let results = match b.threads {
        Some(t) => run_grid_with_threads(&grid, Some(t)),
        None => run_grid(&grid),
    }
    .map_err(|e| CliError::input(e.to_string()))?;
    write_report(&results, format, &b.out).map_err(|e| CliError::io(e.to_string()))?;
    eprintln!("{} cells written to {}", results.len(), b.out.display());
    Ok(())
}
