//! Numeric kernels: residualization, partial correlation, Fisher-z, and the
//! permutation distance-correlation test.

mod dcor;
mod fisher;
mod kernel;
mod matrix;
mod parcorr;
mod regression;

pub use dcor::{distance_correlation, distance_correlation_test};
pub use fisher::{fisher_z_decision, normal_two_sided_p};
pub use kernel::{kernel_ridge_residuals, median_distance, KernelRidge};
pub use matrix::DataMatrix;
pub use parcorr::{partial_correlation, pearson, PartialCorrelator};
pub use regression::{residualize, Residualized};

use serde::{Deserialize, Serialize};

/// Result of a single independence test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub statistic: f64,
    pub p_value: f64,
    /// `p_value > alpha` for the significance level used.
    pub independent: bool,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("insufficient samples: {samples} rows, at least {required} needed")]
    InsufficientSamples { samples: usize, required: usize },
    #[error("degenerate data: {0}")]
    Degenerate(String),
}
