use serde::{Deserialize, Serialize};

use super::{check_alpha, AlgorithmError, Decision, PartialDensities};
use crate::citest::CiBackend;
use crate::graph::Group;
use crate::pc::{orient_cpdag, skeleton};

/// Directed cross-group edges of the CPDAG over all variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VanillaReport {
    pub edge_x_to_y: usize,
    pub edge_y_to_x: usize,
    /// `(edge_x_to_y - edge_y_to_x) / (n m)`.
    pub edge_diff: f64,
    pub decision: Decision,
    pub alpha: f64,
    pub ci_test_count: u64,
    /// The orientation phase met contradictory sepsets.
    pub conflict: bool,
}

/// PC over every variable of both groups, then a vote among the oriented
/// edges that cross between the groups. Undirected cross edges abstain.
pub fn vanilla_pc(
    backend: &CiBackend,
    alpha: f64,
    max_cond: Option<usize>,
) -> Result<VanillaReport, AlgorithmError> {
    check_alpha(alpha)?;
    let x = backend.members(Group::X);
    let y = backend.members(Group::Y);
    let vars: Vec<usize> = x.iter().chain(y).copied().collect();
    let skel = skeleton(&vars, backend, None, max_cond).map_err(|source| AlgorithmError::Test {
        source,
        partial: PartialDensities::default(),
    })?;
    let cpdag = orient_cpdag(&skel);
    let n = x.len();
    let in_x = |pos: usize| pos < n;
    let edge_x_to_y = cpdag
        .directed
        .iter()
        .filter(|&&(a, b)| in_x(a) && !in_x(b))
        .count();
    let edge_y_to_x = cpdag
        .directed
        .iter()
        .filter(|&&(a, b)| !in_x(a) && in_x(b))
        .count();
    let edge_diff = (edge_x_to_y as f64 - edge_y_to_x as f64) / (n * y.len()) as f64;
    Ok(VanillaReport {
        edge_x_to_y,
        edge_y_to_x,
        edge_diff,
        decision: Decision::from_statistic(edge_diff, alpha),
        alpha,
        ci_test_count: skel.tests,
        conflict: cpdag.conflict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gallery, GroupedDag};

    #[test]
    fn v_structure_orients_both_cross_edges() {
        let backend = CiBackend::oracle(gallery::c1_v_structure());
        let r = vanilla_pc(&backend, 1e-4, None).unwrap();
        assert_eq!((r.edge_x_to_y, r.edge_y_to_x), (2, 0));
        assert_eq!(r.decision, Decision::XCausesY);
    }

    #[test]
    fn no_cross_edges_is_indeterminate() {
        let g = GroupedDag::new(2, 2, [(0, 1), (2, 3)]).unwrap();
        let r = vanilla_pc(&CiBackend::oracle(g), 1e-4, None).unwrap();
        assert_eq!(r.edge_diff, 0.0);
        assert_eq!(r.decision, Decision::Indeterminate);
    }
}
