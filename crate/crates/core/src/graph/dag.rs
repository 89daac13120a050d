use std::collections::{BTreeSet, VecDeque};

use super::GraphError;

/// A directed acyclic graph over nodes `0..node_count`.
///
/// Parent and child lists are kept sorted so that traversals are
/// deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    node_count: usize,
    edges: Vec<(usize, usize)>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
}

impl Dag {
    /// Builds a DAG, rejecting self-loops, duplicate edges, out-of-range
    /// endpoints and directed cycles.
    pub fn new(
        node_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        if node_count == 0 {
            return Err(GraphError::Empty);
        }
        let mut seen = BTreeSet::new();
        let mut parents = vec![Vec::new(); node_count];
        let mut children = vec![Vec::new(); node_count];
        for (p, c) in edges {
            if p >= node_count || c >= node_count {
                return Err(GraphError::NodeOutOfRange {
                    node: p.max(c),
                    node_count,
                });
            }
            if p == c {
                return Err(GraphError::SelfLoop(p));
            }
            if !seen.insert((p, c)) {
                return Err(GraphError::DuplicateEdge(p, c));
            }
            parents[c].push(p);
            children[p].push(c);
        }
        for list in parents.iter_mut().chain(children.iter_mut()) {
            list.sort_unstable();
        }
        let dag = Self {
            node_count,
            edges: seen.into_iter().collect(),
            parents,
            children,
        };
        if dag.topological_order().len() != node_count {
            return Err(GraphError::Cycle);
        }
        Ok(dag)
    }

    /// A DAG without edges.
    pub fn empty(node_count: usize) -> Result<Self, GraphError> {
        Self::new(node_count, std::iter::empty())
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Edges as sorted `(parent, child)` pairs.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn parents(&self, node: usize) -> &[usize] {
        &self.parents[node]
    }

    pub fn children(&self, node: usize) -> &[usize] {
        &self.children[node]
    }

    pub fn has_edge(&self, parent: usize, child: usize) -> bool {
        self.children[parent].binary_search(&child).is_ok()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.has_edge(a, b) || self.has_edge(b, a)
    }

    /// Kahn's algorithm with smallest-index tie breaking. Shorter than
    /// `node_count` iff the edge set contains a cycle.
    pub fn topological_order(&self) -> Vec<usize> {
        let mut indegree: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<usize> =
            (0..self.node_count).filter(|&v| indegree[v] == 0).collect();
        let mut order = Vec::with_capacity(self.node_count);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &c in &self.children[v] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        order
    }

    /// Marks every node that is `start` or a descendant of it.
    pub fn descendants_mask(&self, start: usize) -> Vec<bool> {
        let mut mask = vec![false; self.node_count];
        let mut queue = VecDeque::from([start]);
        mask[start] = true;
        while let Some(v) = queue.pop_front() {
            for &c in &self.children[v] {
                if !mask[c] {
                    mask[c] = true;
                    queue.push_back(c);
                }
            }
        }
        mask
    }

    /// Marks every node in `set` together with all of their ancestors.
    pub fn ancestors_mask(&self, set: &[usize]) -> Vec<bool> {
        let mut mask = vec![false; self.node_count];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &v in set {
            if !mask[v] {
                mask[v] = true;
                queue.push_back(v);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &p in &self.parents[v] {
                if !mask[p] {
                    mask[p] = true;
                    queue.push_back(p);
                }
            }
        }
        mask
    }

    /// Subgraph induced by `nodes`, relabelled to `0..nodes.len()` in the
    /// order given.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Dag {
        let mut local = vec![usize::MAX; self.node_count];
        for (k, &v) in nodes.iter().enumerate() {
            local[v] = k;
        }
        let edges = self
            .edges
            .iter()
            .filter(|(p, c)| local[*p] != usize::MAX && local[*c] != usize::MAX)
            .map(|&(p, c)| (local[p], local[c]));
        Dag::new(nodes.len().max(1), edges).expect("induced subgraph of a DAG is a DAG")
    }

    pub(crate) fn check_node(&self, node: usize) -> Result<(), GraphError> {
        if node >= self.node_count {
            Err(GraphError::NodeOutOfRange {
                node,
                node_count: self.node_count,
            })
        } else {
            Ok(())
        }
    }
}
