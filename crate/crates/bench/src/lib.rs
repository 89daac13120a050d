//! Monte-Carlo experiment grids over synthetic grouped models.
//!
//! A grid is a cartesian product of [`veccause::synth::ModelParams`]
//! overrides. Every (cell, repetition) pair draws one model with ground
//! truth X → Y and runs each selected method on the same data.

pub mod grid;
pub mod report;
pub mod run;

pub use grid::{
    Axis, BackendKind, Coordinate, ExperimentGrid, GridError, MethodKind, MethodSpec, DENS_XY,
    SCHEMA_VERSION,
};
pub use report::{read_report, write_report, ReportError, ReportFormat};
pub use run::{run_grid, run_grid_with_threads, CellResult, MethodTally, THREADS_ENV};
