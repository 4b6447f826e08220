//! Exact matching: general maximum weight matching, bipartite maximum
//! cardinality matching, and the two size/weight bounded variants SBMWM and
//! WBMM reduced to a single maximum weight matching call.

mod bipartite;
mod blossom;

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Simple undirected graph with non-negative integer edge weights.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WeightedGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize, i128)>,
    weights: BTreeMap<(usize, usize), i128>,
}

impl WeightedGraph {
    pub fn new(vertex_count: usize) -> Self {
        WeightedGraph { vertex_count, ..Default::default() }
    }

    pub fn from_edges(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize, i128)>) -> Result<Self> {
        let mut g = WeightedGraph::new(vertex_count);
        for (u, v, w) in edges {
            g.add_edge(u, v, w)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize, weight: i128) -> Result<()> {
        if u >= self.vertex_count || v >= self.vertex_count {
            return Err(Error::instance(format!("edge ({u},{v}) out of range")));
        }
        if u == v {
            return Err(Error::instance(format!("self-loop at {u}")));
        }
        if weight < 0 {
            return Err(Error::instance(format!("negative weight on ({u},{v})")));
        }
        let key = (u.min(v), u.max(v));
        if self.weights.insert(key, weight).is_some() {
            return Err(Error::instance(format!("duplicate edge ({u},{v})")));
        }
        self.edges.push((key.0, key.1, weight));
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Edges as `(u, v, weight)` with `u < v`, in insertion order.
    pub fn edges(&self) -> &[(usize, usize, i128)] {
        &self.edges
    }

    pub fn total_weight(&self) -> i128 {
        self.edges.iter().map(|e| e.2).sum()
    }

    pub fn max_edge_weight(&self) -> i128 {
        self.edges.iter().map(|e| e.2).max().unwrap_or(0)
    }

    fn weight_of(&self, u: usize, v: usize) -> Option<i128> {
        self.weights.get(&(u.min(v), u.max(v))).copied()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Matching {
    /// Edges `(u, v)` with `u < v`, sorted.
    pub edges: Vec<(usize, usize)>,
    pub total_weight: i128,
}

impl Matching {
    pub fn cardinality(&self) -> usize {
        self.edges.len()
    }

    fn from_pairs(g: &WeightedGraph, mut edges: Vec<(usize, usize)>) -> Self {
        edges.sort_unstable();
        let total_weight = edges.iter().map(|&(u, v)| g.weight_of(u, v).expect("matched pair is an edge")).sum();
        Matching { edges, total_weight }
    }

    /// Checks vertex-disjointness and that every edge exists in `g` with
    /// the recorded total weight.
    pub fn is_valid_for(&self, g: &WeightedGraph) -> bool {
        let mut used = vec![false; g.vertex_count()];
        let mut total = 0;
        for &(u, v) in &self.edges {
            let Some(w) = g.weight_of(u, v) else { return false };
            if used[u] || used[v] {
                return false;
            }
            used[u] = true;
            used[v] = true;
            total += w;
        }
        total == self.total_weight
    }
}

/// A matching of maximum total weight.
pub fn max_weight_matching(g: &WeightedGraph) -> Matching {
    let mates = blossom::mates(g.vertex_count, &g.edges);
    let pairs = mates.iter().enumerate().filter_map(|(u, &m)| m.filter(|&v| u < v).map(|v| (u, v))).collect();
    Matching::from_pairs(g, pairs)
}

/// A maximum cardinality matching of a bipartite graph; edges are
/// `(left, right)` pairs and the result lists matched pairs the same way.
/// The weight of every edge counts as one.
pub fn max_cardinality_bipartite_matching(
    left_size: usize,
    right_size: usize,
    edges: &[(usize, usize)],
) -> Result<Matching> {
    if let Some(&(l, r)) = edges.iter().find(|&&(l, r)| l >= left_size || r >= right_size) {
        return Err(Error::instance(format!("bipartite edge ({l},{r}) out of range")));
    }
    let mut pairs = bipartite::hopcroft_karp(left_size, right_size, edges);
    pairs.sort_unstable();
    Ok(Matching { total_weight: pairs.len() as i128, edges: pairs })
}

/// Size-bounded maximum weight matching: some `M` with `|M| <= k1` and
/// `w(M) >= k2`, or `None`.
///
/// Pads the graph with `n - 2*k1` vertices joined to every old vertex by
/// edges heavier than the whole graph; a maximum weight matching of the
/// padded graph then leaves room for at most `k1` old edges.
pub fn solve_sbmwm(g: &WeightedGraph, k1: usize, k2: i128) -> Option<Matching> {
    let best = bounded_size_max_weight(g, k1);
    (best.total_weight >= k2).then_some(best)
}

fn bounded_size_max_weight(g: &WeightedGraph, k1: usize) -> Matching {
    let n = g.vertex_count;
    let k1 = k1.min(n / 2);
    let pad = n - 2 * k1;
    if pad == 0 {
        return max_weight_matching(g);
    }
    let c = g.total_weight() + 1;
    let mut edges = g.edges.clone();
    for p in 0..pad {
        for v in 0..n {
            edges.push((v, n + p, c));
        }
    }
    let mates = blossom::mates(n + pad, &edges);
    let pairs = (0..n).filter_map(|u| mates[u].filter(|&v| u < v && v < n).map(|v| (u, v))).collect();
    Matching::from_pairs(g, pairs)
}

/// Weight-bounded maximum matching: some `M` with `w(M) <= k1` and
/// `|M| >= k2`, or `None`. A returned witness has exactly `k2` edges.
///
/// Weights are flipped to `L + W - w` with `W` the maximum weight and
/// `L = sum(w) + 1`; the shift by `L` makes every flipped weight positive,
/// so a matching smaller than `k2` can never reach the target
/// `(L + W) * k2 - k1`.
pub fn solve_wbmm(g: &WeightedGraph, k1: i128, k2: usize) -> Option<Matching> {
    if k1 < 0 || k2 > g.vertex_count / 2 {
        return None;
    }
    if k2 == 0 {
        return Some(Matching::default());
    }
    let total = g.total_weight();
    let k1 = k1.min(total);
    let shift = total + 1 + g.max_edge_weight();
    let flipped = WeightedGraph {
        vertex_count: g.vertex_count,
        edges: g.edges.iter().map(|&(u, v, w)| (u, v, shift - w)).collect(),
        weights: g.edges.iter().map(|&(u, v, w)| ((u, v), shift - w)).collect(),
    };
    let m = solve_sbmwm(&flipped, k2, shift * k2 as i128 - k1)?;
    debug_assert_eq!(m.cardinality(), k2);
    let pairs = m.edges;
    Some(Matching::from_pairs(g, pairs))
}
