//! Graph structures, d-separation, and the identifiability conditions.

mod conditions;
mod dag;
pub mod gallery;
mod grouped;
mod random;
mod separation;
mod undirected;

pub use conditions::{
    characterize_condition, check_condition, check_condition_with_cap, Condition,
    DEFAULT_ENUMERATION_CAP,
};
pub use dag::Dag;
pub use grouped::{Group, GroupedDag};
pub use random::random_grouped_dag;
pub use separation::{d_separated, moralize, SeparationQuery};
pub use undirected::UndirectedGraph;

pub(crate) use separation::d_separated_unchecked;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("graph has no nodes")]
    Empty,
    #[error("both groups must be non-empty")]
    EmptyGroup,
    #[error("node {node} out of range for a graph with {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(usize, usize),
    #[error("edge set contains a directed cycle")]
    Cycle,
    #[error("edge {0} -> {1} points from Y into X")]
    BackwardCrossEdge(usize, usize),
    #[error("invalid separation query: {0}")]
    InvalidQuery(String),
    #[error("{nodes} nodes exceed the enumeration cap of {cap}")]
    Capacity { nodes: usize, cap: usize },
}
