use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

/// Simple undirected graph over nodes `0..node_count`, stored as a dense
/// adjacency matrix (the graphs here are group-sized, at most a few
/// hundred nodes).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "UndirectedRepr", from = "UndirectedRepr")]
pub struct UndirectedGraph {
    node_count: usize,
    adjacency: Vec<bool>,
}

impl UndirectedGraph {
    pub fn empty(node_count: usize) -> Self {
        Self {
            node_count,
            adjacency: vec![false; node_count * node_count],
        }
    }

    pub fn complete(node_count: usize) -> Self {
        let mut g = Self::empty(node_count);
        for a in 0..node_count {
            for b in a + 1..node_count {
                g.add_edge(a, b);
            }
        }
        g
    }

    /// Builds a graph from an edge list; self-loops are ignored and
    /// duplicates collapse.
    pub fn from_edges(node_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Self::empty(node_count);
        for (a, b) in edges {
            if a != b {
                g.add_edge(a, b);
            }
        }
        g
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        assert!(a != b, "self-loop {a}-{a}");
        self.adjacency[a * self.node_count + b] = true;
        self.adjacency[b * self.node_count + a] = true;
    }

    pub fn remove_edge(&mut self, a: usize, b: usize) {
        self.adjacency[a * self.node_count + b] = false;
        self.adjacency[b * self.node_count + a] = false;
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a * self.node_count + b]
    }

    pub fn neighbors(&self, node: usize) -> Vec<usize> {
        (0..self.node_count)
            .filter(|&b| self.has_edge(node, b))
            .collect()
    }

    /// Edges as `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.node_count {
            for b in a + 1..self.node_count {
                if self.has_edge(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn edge_set(&self) -> BTreeSet<(usize, usize)> {
        self.edges().into_iter().collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().filter(|&&e| e).count() / 2
    }
}

#[derive(Serialize, Deserialize)]
struct UndirectedRepr {
    node_count: usize,
    edges: Vec<(usize, usize)>,
}

impl From<UndirectedGraph> for UndirectedRepr {
    fn from(g: UndirectedGraph) -> Self {
        Self {
            node_count: g.node_count,
            edges: g.edges(),
        }
    }
}

impl From<UndirectedRepr> for UndirectedGraph {
    fn from(r: UndirectedRepr) -> Self {
        UndirectedGraph::from_edges(r.node_count, r.edges)
    }
}
