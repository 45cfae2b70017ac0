use crate::error::{Error, Result};
use crate::machine::SelfReducible;

/// Undirected simple graph on vertices `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    // 0-based, sorted, no duplicates
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from 1-based edges. Duplicate edges are merged;
    /// self-loops and out-of-range endpoints are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u == 0 || v == 0 || u > n || v > n {
                return Err(Error::MalformedInstance(format!(
                    "edge {u}-{v} references a vertex outside 1..={n}"
                )));
            }
            if u == v {
                return Err(Error::MalformedInstance(format!("self-loop at vertex {u}")));
            }
            adj[u - 1].push(v - 1);
            adj[v - 1].push(u - 1);
        }
        for a in &mut adj {
            a.sort_unstable();
            a.dedup();
        }
        Ok(Self { n, adj })
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    /// 0-based neighbours of 0-based vertex `v`.
    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    /// 1-based edge list with `u < v`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, a) in self.adj.iter().enumerate() {
            for &v in a {
                if u < v {
                    out.push((u + 1, v + 1));
                }
            }
        }
        out
    }
}

/// Counting nonempty independent sets of a graph.
///
/// Splits on the lowest remaining vertex `v`: choice `Zero` puts `v` in the
/// set (removing `v` and its neighbourhood), choice `One` leaves it out
/// (removing `v` only).
#[derive(Debug, Clone)]
pub struct IndependentSets {
    graph: Graph,
    words: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IsState {
    removed: Vec<u64>,
    committed: bool,
}

impl IsState {
    fn remove(&mut self, v: usize) {
        self.removed[v / 64] |= 1 << (v % 64);
    }

    /// Whether at least one vertex was put in the set.
    pub fn committed(&self) -> bool {
        self.committed
    }
}

pub fn is_instance(graph: &Graph) -> IndependentSets {
    IndependentSets {
        graph: graph.clone(),
        words: graph.n.div_ceil(64),
    }
}

impl IndependentSets {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    fn lowest_remaining(&self, s: &IsState) -> Option<usize> {
        for (w, &word) in s.removed.iter().enumerate() {
            if word != u64::MAX {
                let v = w * 64 + (!word).trailing_zeros() as usize;
                return (v < self.graph.n).then_some(v);
            }
        }
        None
    }
}

impl SelfReducible for IndependentSets {
    type State = IsState;

    fn initial(&self) -> IsState {
        IsState {
            removed: vec![0; self.words],
            committed: false,
        }
    }

    /// A nonempty residual graph always has a one-vertex independent set.
    fn decide(&self, s: &IsState) -> bool {
        s.committed || self.lowest_remaining(s).is_some()
    }

    fn split(&self, s: &IsState) -> Option<(IsState, IsState)> {
        let v = self.lowest_remaining(s)?;
        let mut take = s.clone();
        take.remove(v);
        for &u in self.graph.neighbours(v) {
            take.remove(u);
        }
        take.committed = true;
        let mut skip = s.clone();
        skip.remove(v);
        Some((take, skip))
    }

    fn num_vars(&self) -> usize {
        self.graph.n
    }
}
