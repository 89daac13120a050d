//! The identifiability conditions (C1) and (C2) of a grouped DAG.
//!
//! Two independent routes are provided: [`check_condition`] enumerates all
//! conditioning subsets and queries d-separation directly, while
//! [`characterize_condition`] searches for the witness paths of the graphical
//! characterizations. They must agree on every enumerable graph.

use serde::{Deserialize, Serialize};

use super::separation::d_separated_unchecked;
use super::{Dag, GraphError, GroupedDag};

/// Default bound on `n + m` for the exhaustive routines.
pub const DEFAULT_ENUMERATION_CAP: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Condition {
    /// Conditioning on Y creates a dependence inside X.
    C1,
    /// Conditioning on X removes a dependence inside Y.
    C2,
}

pub fn check_condition(gd: &GroupedDag, which: Condition) -> Result<bool, GraphError> {
    check_condition_with_cap(gd, which, DEFAULT_ENUMERATION_CAP)
}

/// Exhaustive check: for C1, is there `S ⊆ X` and `i ≠ j ∈ X` with
/// `i ⫫ j | S` but `i ⫫̸ j | S ∪ Y`? For C2, is there `S ⊆ Y` and
/// `k ≠ l ∈ Y` with `k ⫫̸ l | S` but `k ⫫ l | S ∪ X`?
pub fn check_condition_with_cap(
    gd: &GroupedDag,
    which: Condition,
    cap: usize,
) -> Result<bool, GraphError> {
    ensure_enumerable(gd, cap)?;
    let (own, other) = match which {
        Condition::C1 => (gd.x_nodes(), gd.y_nodes()),
        Condition::C2 => (gd.y_nodes(), gd.x_nodes()),
    };
    let dag = gd.dag();
    Ok(any_pair_subset(&own, |i, j, s| {
        let mut with_other = s.to_vec();
        with_other.extend_from_slice(&other);
        let sep = d_separated_unchecked(dag, i, j, s);
        let sep_other = d_separated_unchecked(dag, i, j, &with_other);
        match which {
            Condition::C1 => sep && !sep_other,
            Condition::C2 => !sep && sep_other,
        }
    }))
}

/// Path-based characterization of the same conditions.
///
/// C1 holds iff some `S ⊆ X` d-separates `i, j ∈ X` while some path
/// between them meets every Y-node as a collider `X → Y ← X`, has no
/// non-collider in `S`, and has every X-collider in the ancestry of
/// `S ∪ Y`. Such a path need not visit Y: an X-collider with a descendant
/// in Y is enough (`X1 → X3 ← X2`, `X3 → Y`).
///
/// C2 holds iff some `S ⊆ Y` d-separates `k, l ∈ Y` in the subgraph induced
/// on Y while some path through X between them is open given `S` in the
/// full graph.
pub fn characterize_condition(
    gd: &GroupedDag,
    which: Condition,
    cap: usize,
) -> Result<bool, GraphError> {
    ensure_enumerable(gd, cap)?;
    let dag = gd.dag();
    match which {
        Condition::C1 => {
            let x = gd.x_nodes();
            let y_mask: Vec<bool> = (0..dag.node_count()).map(|v| v >= gd.n()).collect();
            Ok(any_pair_subset(&x, |i, j, s| {
                if !d_separated_unchecked(dag, i, j, s) {
                    return false;
                }
                let mut evidence = s.to_vec();
                evidence.extend(gd.y_nodes());
                let mut open = OpenPathSearch::new(dag, &evidence);
                open.no_consecutive = Some(y_mask.clone());
                open.exists(i, j, &|_| true)
            }))
        }
        Condition::C2 => {
            let y = gd.y_nodes();
            let y_sub = dag.induced_subgraph(&y);
            let local = |v: usize| v - gd.n();
            Ok(any_pair_subset(&y, |k, l, s| {
                let s_local: Vec<usize> = s.iter().map(|&v| local(v)).collect();
                if !d_separated_unchecked(&y_sub, local(k), local(l), &s_local) {
                    return false;
                }
                let open = OpenPathSearch::new(dag, s);
                open.exists(k, l, &|path| path.iter().any(|&v| v < gd.n()))
            }))
        }
    }
}

fn ensure_enumerable(gd: &GroupedDag, cap: usize) -> Result<(), GraphError> {
    let total = gd.n() + gd.m();
    if total > cap {
        Err(GraphError::Capacity { nodes: total, cap })
    } else {
        Ok(())
    }
}

/// Calls `f(i, j, S)` for every pair `i < j` of `nodes` and every subset `S`
/// of the remaining nodes, stopping at the first `true`.
fn any_pair_subset(nodes: &[usize], mut f: impl FnMut(usize, usize, &[usize]) -> bool) -> bool {
    let mut subset = Vec::with_capacity(nodes.len());
    for (a, &i) in nodes.iter().enumerate() {
        for &j in &nodes[a + 1..] {
            let rest: Vec<usize> = nodes
                .iter()
                .copied()
                .filter(|&v| v != i && v != j)
                .collect();
            for mask in 0u64..(1u64 << rest.len()) {
                subset.clear();
                subset.extend(
                    rest.iter()
                        .enumerate()
                        .filter(|(b, _)| mask >> b & 1 == 1)
                        .map(|(_, &v)| v),
                );
                if f(i, j, &subset) {
                    return true;
                }
            }
        }
    }
    false
}

/// Depth-first search over simple paths that are open given an evidence
/// set: non-colliders are unobserved and every collider is observed or has
/// an observed descendant.
struct OpenPathSearch<'a> {
    dag: &'a Dag,
    observed: Vec<bool>,
    collider_open: Vec<bool>,
    /// Nodes that may not be adjacent to each other on a path.
    no_consecutive: Option<Vec<bool>>,
}

impl<'a> OpenPathSearch<'a> {
    fn new(dag: &'a Dag, evidence: &[usize]) -> Self {
        let mut observed = vec![false; dag.node_count()];
        for &v in evidence {
            observed[v] = true;
        }
        Self {
            dag,
            observed,
            collider_open: dag.ancestors_mask(evidence),
            no_consecutive: None,
        }
    }

    fn exists(&self, from: usize, to: usize, accept: &dyn Fn(&[usize]) -> bool) -> bool {
        let mut path = vec![from];
        let mut on_path = vec![false; self.dag.node_count()];
        on_path[from] = true;
        self.extend(&mut path, &mut on_path, to, accept)
    }

    fn extend(
        &self,
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        to: usize,
        accept: &dyn Fn(&[usize]) -> bool,
    ) -> bool {
        let last = *path.last().expect("path is never empty");
        let neighbors = self.dag.parents(last).iter().chain(self.dag.children(last));
        for &next in neighbors {
            if on_path[next] {
                continue;
            }
            if let Some(mask) = &self.no_consecutive {
                if mask[last] && mask[next] {
                    continue;
                }
            }
            if path.len() >= 2 {
                let prev = path[path.len() - 2];
                let collider = self.dag.has_edge(prev, last) && self.dag.has_edge(next, last);
                let open = if collider {
                    self.collider_open[last]
                } else {
                    !self.observed[last]
                };
                if !open {
                    continue;
                }
            }
            path.push(next);
            if next == to {
                if accept(path) {
                    return true;
                }
            } else {
                on_path[next] = true;
                let found = self.extend(path, on_path, to, accept);
                on_path[next] = false;
                if found {
                    return true;
                }
            }
            path.pop();
        }
        false
    }
}
