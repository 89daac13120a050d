//! Direction inference: the two edge-density procedures and the Vanilla-PC
//! and trace baselines.

mod trace;
mod vanilla;
mod vecci;

pub use trace::{
    trace_delta, trace_from_covariance, trace_method, TraceReport, TRACE_TIE_TOLERANCE,
};
pub use vanilla::{vanilla_pc, VanillaReport};
pub use vecci::{vecci_full, vecci_pc, vecci_pc_with, PartialDensities};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::citest::CiError;
use crate::graph::UndirectedGraph;

/// Three-valued verdict on the causal direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Decision {
    #[serde(rename = "X->Y")]
    XCausesY,
    #[serde(rename = "Y->X")]
    YCausesX,
    #[serde(rename = "indeterminate")]
    Indeterminate,
}

impl Decision {
    /// `statistic > alpha` favours X, `statistic < -alpha` favours Y, and
    /// everything in between, boundary included, is indeterminate.
    pub fn from_statistic(statistic: f64, alpha: f64) -> Self {
        if statistic > alpha {
            Decision::XCausesY
        } else if statistic < -alpha {
            Decision::YCausesX
        } else {
            Decision::Indeterminate
        }
    }

    /// The verdict with the roles of X and Y exchanged.
    pub fn swapped(self) -> Self {
        match self {
            Decision::XCausesY => Decision::YCausesX,
            Decision::YCausesX => Decision::XCausesY,
            Decision::Indeterminate => Decision::Indeterminate,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Decision::XCausesY => "X->Y",
            Decision::YCausesX => "Y->X",
            Decision::Indeterminate => "indeterminate",
        }
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Decision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "X->Y" => Ok(Decision::XCausesY),
            "Y->X" => Ok(Decision::YCausesX),
            "indeterminate" => Ok(Decision::Indeterminate),
            other => Err(format!("unknown decision {other:?}")),
        }
    }
}

/// Edge densities of the four group graphs and the resulting verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionReport {
    pub dens_x: f64,
    pub dens_x_given_y: f64,
    pub dens_y: f64,
    pub dens_y_given_x: f64,
    pub d_xy: f64,
    pub d_yx: f64,
    pub crit: f64,
    pub decision: Decision,
    pub alpha: f64,
    pub ci_test_count: u64,
}

impl DirectionReport {
    pub(crate) fn from_densities(
        dens_x: f64,
        dens_x_given_y: f64,
        dens_y: f64,
        dens_y_given_x: f64,
        alpha: f64,
        ci_test_count: u64,
    ) -> Self {
        let d_xy = dens_x_given_y - dens_x;
        let d_yx = dens_y_given_x - dens_y;
        let crit = d_xy - d_yx;
        Self {
            dens_x,
            dens_x_given_y,
            dens_y,
            dens_y_given_x,
            d_xy,
            d_yx,
            crit,
            decision: Decision::from_statistic(crit, alpha),
            alpha,
            ci_test_count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AlgorithmError {
    #[error("sensitivity {0} outside [0, 1]")]
    InvalidAlpha(f64),
    /// A conditional-independence test failed; `partial` keeps the
    /// densities finished before the failure.
    #[error("{source}")]
    Test {
        #[source]
        source: CiError,
        partial: PartialDensities,
    },
}

fn check_alpha(alpha: f64) -> Result<(), AlgorithmError> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(AlgorithmError::InvalidAlpha(alpha))
    }
}

/// Fraction of the `q(q-1)/2` possible edges present; zero for `q ≤ 1`.
pub fn edge_density(g: &UndirectedGraph) -> f64 {
    let q = g.node_count();
    if q <= 1 {
        return 0.0;
    }
    g.edge_count() as f64 / (q * (q - 1) / 2) as f64
}
