use std::collections::VecDeque;

use super::{Dag, GraphError, UndirectedGraph};

/// Is `i` d-separated from `j` given `conditioning_set`?
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationQuery {
    pub i: usize,
    pub j: usize,
    pub conditioning_set: Vec<usize>,
}

impl SeparationQuery {
    pub fn new(i: usize, j: usize, conditioning_set: impl IntoIterator<Item = usize>) -> Self {
        Self {
            i,
            j,
            conditioning_set: conditioning_set.into_iter().collect(),
        }
    }

    fn validate(&self, dag: &Dag) -> Result<(), GraphError> {
        dag.check_node(self.i)?;
        dag.check_node(self.j)?;
        for &s in &self.conditioning_set {
            dag.check_node(s)?;
        }
        if self.i == self.j {
            return Err(GraphError::InvalidQuery("endpoints coincide".into()));
        }
        if self.conditioning_set.contains(&self.i) || self.conditioning_set.contains(&self.j) {
            return Err(GraphError::InvalidQuery(
                "endpoint inside conditioning set".into(),
            ));
        }
        Ok(())
    }
}

pub fn d_separated(dag: &Dag, query: &SeparationQuery) -> Result<bool, GraphError> {
    query.validate(dag)?;
    Ok(!reachable(dag, query.i, &query.conditioning_set)[query.j])
}

/// Unchecked variant used by the enumeration routines.
pub(crate) fn d_separated_unchecked(dag: &Dag, i: usize, j: usize, conditioning: &[usize]) -> bool {
    !reachable(dag, i, conditioning)[j]
}

/// Nodes d-connected to `source` given `conditioning`, by the reachability
/// traversal over (node, direction) states. A state is "up" when the node
/// was entered from one of its children and "down" when entered from a
/// parent.
fn reachable(dag: &Dag, source: usize, conditioning: &[usize]) -> Vec<bool> {
    let n = dag.node_count();
    let mut observed = vec![false; n];
    for &z in conditioning {
        observed[z] = true;
    }
    let has_observed_descendant = dag.ancestors_mask(conditioning);

    const UP: usize = 0;
    const DOWN: usize = 1;
    let mut visited = vec![[false; 2]; n];
    let mut reached = vec![false; n];
    let mut queue = VecDeque::from([(source, UP)]);
    while let Some((v, dir)) = queue.pop_front() {
        if visited[v][dir] {
            continue;
        }
        visited[v][dir] = true;
        if !observed[v] {
            reached[v] = true;
        }
        if dir == UP && !observed[v] {
            for &p in dag.parents(v) {
                queue.push_back((p, UP));
            }
            for &c in dag.children(v) {
                queue.push_back((c, DOWN));
            }
        } else if dir == DOWN {
            if !observed[v] {
                for &c in dag.children(v) {
                    queue.push_back((c, DOWN));
                }
            }
            if has_observed_descendant[v] {
                for &p in dag.parents(v) {
                    queue.push_back((p, UP));
                }
            }
        }
    }
    reached[source] = false;
    reached
}

/// Connects every node to its parents, its children and the other parents
/// of its children.
pub fn moralize(dag: &Dag) -> UndirectedGraph {
    let mut g = UndirectedGraph::empty(dag.node_count());
    for &(p, c) in dag.edges() {
        g.add_edge(p, c);
    }
    for v in 0..dag.node_count() {
        let parents = dag.parents(v);
        for (k, &a) in parents.iter().enumerate() {
            for &b in &parents[k + 1..] {
                g.add_edge(a, b);
            }
        }
    }
    g
}
