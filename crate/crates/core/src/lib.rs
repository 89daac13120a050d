//! Causal direction inference between two groups of variables.
//!
//! The crate compares how sparse the internal dependence structure of each
//! group is before and after conditioning on the other group. Conditioning
//! on the effect group can only add dependencies inside the cause group,
//! and conditioning on the cause group can only remove dependencies inside
//! the effect group; the difference of the resulting edge densities points
//! at the causal direction.
//!
//! Modules, bottom up:
//! - [`graph`]: DAGs, d-separation, moral graphs, conditions (C1)/(C2).
//! - [`stats`]: residualization, partial correlation, Fisher-z, distance
//!   correlation.
//! - [`citest`]: one conditional-independence interface over an exact
//!   d-separation oracle and two data-driven backends.
//! - [`pc`]: PC skeleton search and CPDAG orientation.
//! - [`algorithms`]: the direction procedures and baselines.
//! - [`synth`]: ground-truth data generators.

// NaN must fail range checks, so `!(x > 0.0)` is intended. Errors carry the
// partial densities computed before the failure.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::result_large_err)]

pub mod algorithms;
pub mod citest;
pub mod graph;
pub mod pc;
pub mod seed;
pub mod stats;
pub mod synth;

pub use algorithms::{Decision, DirectionReport};
pub use citest::{CiBackend, CiQuery, ConditioningMode};
pub use graph::{Group, GroupedDag};
pub use stats::DataMatrix;
