use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::for_each_subset;
use crate::citest::{CiBackend, CiError, CiQuery};
use crate::graph::{Group, UndirectedGraph};

/// Output of the skeleton phase. Graph nodes and sepset members are
/// positions in `vars`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkeletonResult {
    pub vars: Vec<usize>,
    pub graph: UndirectedGraph,
    /// Keyed by `(a, b)` with `a < b`; present exactly for removed pairs.
    pub sepsets: BTreeMap<(usize, usize), Vec<usize>>,
    /// Independence tests issued by this run.
    pub tests: u64,
}

impl SkeletonResult {
    pub fn sepset(&self, a: usize, b: usize) -> Option<&[usize]> {
        self.sepsets.get(&(a.min(b), a.max(b))).map(Vec::as_slice)
    }

    /// Edges translated back to backend variable indices.
    pub fn variable_edges(&self) -> Vec<(usize, usize)> {
        self.graph
            .edges()
            .into_iter()
            .map(|(a, b)| (self.vars[a], self.vars[b]))
            .collect()
    }
}

/// Stable PC skeleton over `vars`. At level `ℓ` every remaining edge is
/// tested against all size-`ℓ` subsets of either endpoint's neighbourhood
/// as it stood at the start of the level. Members of `extra_group` join
/// every conditioning set.
///
/// Levels stop once no neighbourhood is large enough, once `max_cond` is
/// reached, or once the backend's sample size cannot support the next
/// level's conditioning dimension.
pub fn skeleton(
    vars: &[usize],
    backend: &CiBackend,
    extra_group: Option<Group>,
    max_cond: Option<usize>,
) -> Result<SkeletonResult, CiError> {
    let q = vars.len();
    let mut graph = UndirectedGraph::complete(q);
    let mut sepsets = BTreeMap::new();
    let extra_len = extra_group.map_or(0, |g| backend.members(g).len());
    let capacity = backend.max_conditioning();
    let mut tests = 0;

    let mut level = 0;
    loop {
        if max_cond.is_some_and(|c| level > c) {
            break;
        }
        if capacity.is_some_and(|c| level + extra_len > c) {
            break;
        }
        let frozen: Vec<Vec<usize>> = (0..q).map(|v| graph.neighbors(v)).collect();
        if !frozen.iter().any(|nb| nb.len() > level) {
            break;
        }
        for (a, b) in graph.edges() {
            for (from, to) in [(a, b), (b, a)] {
                let pool: Vec<usize> = frozen[from].iter().copied().filter(|&v| v != to).collect();
                let mut found = None;
                for_each_subset(&pool, level, |s| {
                    let query =
                        CiQuery::new(vars[a], vars[b], s.iter().map(|&v| vars[v]), extra_group);
                    tests += 1;
                    if backend.decide(&query)? {
                        let mut sep = s.to_vec();
                        sep.sort_unstable();
                        found = Some(sep);
                        return Ok(true);
                    }
                    Ok::<_, CiError>(false)
                })?;
                if let Some(sep) = found {
                    graph.remove_edge(a, b);
                    sepsets.insert((a, b), sep);
                    break;
                }
            }
        }
        level += 1;
    }
    Ok(SkeletonResult {
        vars: vars.to_vec(),
        graph,
        sepsets,
        tests,
    })
}
