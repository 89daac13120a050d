use serde::{Deserialize, Serialize};

use super::SkeletonResult;

/// Partially directed graph over the skeleton's positions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cpdag {
    pub node_count: usize,
    pub directed: Vec<(usize, usize)>,
    /// `(a, b)` with `a < b`.
    pub undirected: Vec<(usize, usize)>,
    /// Set when sepsets implied incompatible orientations; the affected
    /// edges are left undirected.
    pub conflict: bool,
}

impl Cpdag {
    pub fn has_directed(&self, a: usize, b: usize) -> bool {
        self.directed.contains(&(a, b))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mark {
    None,
    Undirected,
    /// Points from the row node to the column node.
    Out,
    In,
}

struct Pattern {
    q: usize,
    marks: Vec<Mark>,
    /// Edges that saw contradictory proposals; never oriented again.
    frozen: Vec<bool>,
    conflict: bool,
}

impl Pattern {
    fn mark(&self, a: usize, b: usize) -> Mark {
        self.marks[a * self.q + b]
    }

    fn adjacent(&self, a: usize, b: usize) -> bool {
        self.mark(a, b) != Mark::None
    }

    fn undirected(&self, a: usize, b: usize) -> bool {
        self.mark(a, b) == Mark::Undirected
    }

    fn directed(&self, a: usize, b: usize) -> bool {
        self.mark(a, b) == Mark::Out
    }

    fn set(&mut self, a: usize, b: usize, ab: Mark, ba: Mark) {
        self.marks[a * self.q + b] = ab;
        self.marks[b * self.q + a] = ba;
    }

    /// Is there a directed path from `from` to `to`?
    fn reaches(&self, from: usize, to: usize) -> bool {
        let mut seen = vec![false; self.q];
        let mut stack = vec![from];
        while let Some(v) = stack.pop() {
            if v == to {
                return true;
            }
            if std::mem::replace(&mut seen[v], true) {
                continue;
            }
            stack.extend((0..self.q).filter(|&w| self.directed(v, w)));
        }
        false
    }

    /// Orients `a — b` as `a → b` unless that contradicts an existing
    /// orientation or closes a directed cycle. Returns whether the pattern
    /// changed.
    fn orient(&mut self, a: usize, b: usize) -> bool {
        if self.frozen[a * self.q + b] || self.directed(a, b) {
            return false;
        }
        if self.directed(b, a) || self.reaches(b, a) {
            self.frozen[a * self.q + b] = true;
            self.frozen[b * self.q + a] = true;
            if self.directed(b, a) {
                self.set(a, b, Mark::Undirected, Mark::Undirected);
            }
            self.conflict = true;
            return true;
        }
        self.set(a, b, Mark::Out, Mark::In);
        true
    }
}

/// Orients unshielded colliders from the sepsets, then closes the pattern
/// under Meek's rules R1 to R4.
pub fn orient_cpdag(skel: &SkeletonResult) -> Cpdag {
    let q = skel.graph.node_count();
    let mut p = Pattern {
        q,
        marks: vec![Mark::None; q * q],
        frozen: vec![false; q * q],
        conflict: false,
    };
    for (a, b) in skel.graph.edges() {
        p.set(a, b, Mark::Undirected, Mark::Undirected);
    }

    for i in 0..q {
        for j in i + 1..q {
            if p.adjacent(i, j) {
                continue;
            }
            let Some(sep) = skel.sepset(i, j) else {
                continue;
            };
            for k in 0..q {
                if k != i
                    && k != j
                    && skel.graph.has_edge(i, k)
                    && skel.graph.has_edge(j, k)
                    && !sep.contains(&k)
                {
                    p.orient(i, k);
                    p.orient(j, k);
                }
            }
        }
    }

    while apply_meek(&mut p) {}

    let mut directed = Vec::new();
    let mut undirected = Vec::new();
    for a in 0..q {
        for b in 0..q {
            match p.mark(a, b) {
                Mark::Out => directed.push((a, b)),
                Mark::Undirected if a < b => undirected.push((a, b)),
                _ => {}
            }
        }
    }
    Cpdag {
        node_count: q,
        directed,
        undirected,
        conflict: p.conflict,
    }
}

/// One sweep over all undirected edges; returns whether anything changed.
fn apply_meek(p: &mut Pattern) -> bool {
    let q = p.q;
    for a in 0..q {
        for b in 0..q {
            if a == b || !p.undirected(a, b) || p.frozen[a * q + b] {
                continue;
            }
            if meek_applies(p, a, b) && p.orient(a, b) {
                return true;
            }
        }
    }
    false
}

/// Does some rule orient `a — b` as `a → b`?
fn meek_applies(p: &Pattern, a: usize, b: usize) -> bool {
    let q = p.q;
    // R1: c → a — b with c, b non-adjacent.
    if (0..q).any(|c| c != b && p.directed(c, a) && !p.adjacent(c, b)) {
        return true;
    }
    // R2: a → c → b.
    if (0..q).any(|c| p.directed(a, c) && p.directed(c, b)) {
        return true;
    }
    // R3: a — c → b and a — d → b with c, d non-adjacent.
    let middles: Vec<usize> = (0..q)
        .filter(|&c| p.undirected(a, c) && p.directed(c, b))
        .collect();
    for (x, &c) in middles.iter().enumerate() {
        if middles[x + 1..].iter().any(|&d| !p.adjacent(c, d)) {
            return true;
        }
    }
    // R4: a — c, c → d → b, a adjacent to d, c and b non-adjacent.
    for c in 0..q {
        if c == b || !p.undirected(a, c) || p.adjacent(c, b) {
            continue;
        }
        if (0..q).any(|d| d != a && p.directed(c, d) && p.directed(d, b) && p.adjacent(a, d)) {
            return true;
        }
    }
    false
}
