use serde::{Deserialize, Serialize};

use super::{Dag, GraphError};

/// One of the two variable groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Group {
    X,
    Y,
}

impl Group {
    pub fn other(self) -> Group {
        match self {
            Group::X => Group::Y,
            Group::Y => Group::X,
        }
    }
}

/// A DAG over `X ∪ Y` where x-nodes are `0..n` and y-nodes are `n..n+m`,
/// and no edge points from a y-node into an x-node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GroupedDagRepr", into = "GroupedDagRepr")]
pub struct GroupedDag {
    dag: Dag,
    n: usize,
    m: usize,
}

impl GroupedDag {
    pub fn new(
        n: usize,
        m: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        if n == 0 || m == 0 {
            return Err(GraphError::EmptyGroup);
        }
        let dag = Dag::new(n + m, edges)?;
        Self::from_dag(dag, n)
    }

    /// Wraps an existing DAG whose first `n` nodes form the X group.
    pub fn from_dag(dag: Dag, n: usize) -> Result<Self, GraphError> {
        let total = dag.node_count();
        if n == 0 || n >= total {
            return Err(GraphError::EmptyGroup);
        }
        if let Some(&(p, c)) = dag.edges().iter().find(|&&(p, c)| p >= n && c < n) {
            return Err(GraphError::BackwardCrossEdge(p, c));
        }
        Ok(Self {
            dag,
            n,
            m: total - n,
        })
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn x_nodes(&self) -> Vec<usize> {
        (0..self.n).collect()
    }

    pub fn y_nodes(&self) -> Vec<usize> {
        (self.n..self.n + self.m).collect()
    }

    pub fn nodes_of(&self, group: Group) -> Vec<usize> {
        match group {
            Group::X => self.x_nodes(),
            Group::Y => self.y_nodes(),
        }
    }

    pub fn group_of(&self, node: usize) -> Group {
        if node < self.n {
            Group::X
        } else {
            Group::Y
        }
    }

    /// Edges from X into Y.
    pub fn cross_edges(&self) -> Vec<(usize, usize)> {
        self.dag
            .edges()
            .iter()
            .copied()
            .filter(|&(p, c)| p < self.n && c >= self.n)
            .collect()
    }

    /// Edges with both endpoints in `group`.
    pub fn internal_edges(&self, group: Group) -> Vec<(usize, usize)> {
        self.dag
            .edges()
            .iter()
            .copied()
            .filter(|&(p, c)| self.group_of(p) == group && self.group_of(c) == group)
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("grouped DAG serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Serialize, Deserialize)]
struct GroupedDagRepr {
    n: usize,
    m: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<GroupedDagRepr> for GroupedDag {
    type Error = GraphError;

    fn try_from(r: GroupedDagRepr) -> Result<Self, Self::Error> {
        GroupedDag::new(r.n, r.m, r.edges.into_iter().map(|[p, c]| (p, c)))
    }
}

impl From<GroupedDag> for GroupedDagRepr {
    fn from(g: GroupedDag) -> Self {
        Self {
            n: g.n,
            m: g.m,
            edges: g.dag.edges().iter().map(|&(p, c)| [p, c]).collect(),
        }
    }
}
