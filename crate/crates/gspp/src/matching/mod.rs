//! Exact maximum-weight matching on simple undirected graphs, plus an
//! exhaustive oracle for testing. Callers must not depend on which optimal
//! matching is returned, only on its weight.

mod blossom;

use crate::error::GsppError;
use crate::instance::Cost;

/// Simple undirected graph with nonnegative integer-scaled edge weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<(usize, usize, Cost)>,
}

impl WeightedGraph {
    pub fn new(n: usize) -> Self {
        WeightedGraph { n, edges: Vec::new() }
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, Cost)] {
        &self.edges
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Stored with u < v. Rejects self-loops, out-of-range vertices,
    /// parallel edges and negative weights.
    pub fn add_edge(&mut self, u: usize, v: usize, weight: Cost) -> Result<(), GsppError> {
        let (u, v) = if u < v { (u, v) } else { (v, u) };
        if u == v {
            return Err(GsppError::InvalidGraph {
                reason: format!("self-loop at vertex {u}"),
            });
        }
        if v >= self.n {
            return Err(GsppError::InvalidGraph {
                reason: format!("vertex {v} out of range (n = {})", self.n),
            });
        }
        if weight < 0 {
            return Err(GsppError::InvalidGraph {
                reason: format!("negative weight {weight} on edge ({u},{v})"),
            });
        }
        if self.edges.iter().any(|&(a, b, _)| (a, b) == (u, v)) {
            return Err(GsppError::InvalidGraph {
                reason: format!("parallel edge ({u},{v})"),
            });
        }
        self.edges.push((u, v, weight));
        Ok(())
    }

    /// Textual edge-list dump (`n_vertices` header, then `u v weight` per
    /// line, sorted) for external verification.
    pub fn dump_edge_list(&self) -> String {
        let mut edges = self.edges.clone();
        edges.sort_unstable();
        let mut out = format!("p edge {} {}\n", self.n, edges.len());
        for (u, v, w) in edges {
            out.push_str(&format!("e {u} {v} {w}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    /// Selected edges, vertex-disjoint, sorted by endpoints.
    pub edges: Vec<(usize, usize, Cost)>,
    pub weight: Cost,
}

impl Matching {
    /// Vertices left uncovered by the matching.
    pub fn uncovered(&self, n: usize) -> Vec<usize> {
        let mut covered = vec![false; n];
        for &(u, v, _) in &self.edges {
            covered[u] = true;
            covered[v] = true;
        }
        (0..n).filter(|&v| !covered[v]).collect()
    }
}

/// Maximum-weight matching (not necessarily perfect; with nonnegative
/// weights this dominates the best perfect matching, which is what the
/// bound constructions need).
pub fn max_weight_matching(g: &WeightedGraph) -> Matching {
    let mate = blossom::solve(g.n, &g.edges);
    let mut edges = Vec::new();
    let mut weight: Cost = 0;
    for &(u, v, w) in &g.edges {
        if mate.get(u) == Some(&v) {
            edges.push((u, v, w));
            weight += w;
        }
    }
    edges.sort_unstable();
    Matching { edges, weight }
}

pub const BRUTE_FORCE_VERTEX_LIMIT: usize = 14;

/// Maximum matching weight by exhaustive enumeration. Test oracle only;
/// guarded at 14 vertices.
pub fn brute_force_matching(g: &WeightedGraph) -> Result<Cost, GsppError> {
    if g.n > BRUTE_FORCE_VERTEX_LIMIT {
        return Err(GsppError::MatchingTooLarge { n: g.n });
    }
    fn go(edges: &[(usize, usize, Cost)], idx: usize, used: u32) -> Cost {
        if idx == edges.len() {
            return 0;
        }
        let (u, v, w) = edges[idx];
        let skip = go(edges, idx + 1, used);
        if used & (1 << u) == 0 && used & (1 << v) == 0 {
            let take = w + go(edges, idx + 1, used | (1 << u) | (1 << v));
            skip.max(take)
        } else {
            skip
        }
    }
    Ok(go(&g.edges, 0, 0))
}
