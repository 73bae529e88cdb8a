use alloc::vec::Vec;

use super::{map_targets, top_k, NeighborList};
use crate::error::{Error, Result};
use crate::graph::TrustGraph;
use crate::linalg::{spectral_radius, LinearOperator};

/// Which arcs of a directed trust graph count as neighbors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    /// Users the target trusts.
    #[default]
    Out,
    /// Users who trust the target.
    In,
}

fn unit_neighbors(g: &TrustGraph, targets: &[u32], k: usize) -> Vec<NeighborList> {
    targets
        .iter()
        .map(|&t| NeighborList { target: t, neighbors: g.neighbors(t).iter().take(k).map(|&v| (v, 1.0)).collect() })
        .collect()
}

/// Adjacent users in the directed graph, similarity 1, first `k` by index.
pub fn neighbors_direct(g: &TrustGraph, targets: &[u32], k: usize, dir: Direction) -> Result<Vec<NeighborList>> {
    if !g.is_directed() {
        return Err(Error::param("graph", "direct trust neighbors need the directed graph"));
    }
    Ok(match dir {
        Direction::Out => unit_neighbors(g, targets, k),
        Direction::In => unit_neighbors(&g.transpose(), targets, k),
    })
}

/// Adjacent users in the undirected graph, similarity 1, first `k` by index.
pub fn neighbors_undirected(g: &TrustGraph, targets: &[u32], k: usize) -> Result<Vec<NeighborList>> {
    if g.is_directed() {
        return Err(Error::DirectedGraph);
    }
    Ok(unit_neighbors(g, targets, k))
}

/// Jaccard index of undirected neighbor sets; only users sharing a neighbor
/// (similarity > 0) are candidates.
pub fn neighbors_jaccard(g: &TrustGraph, targets: &[u32], k: usize) -> Result<Vec<NeighborList>> {
    if g.is_directed() {
        return Err(Error::DirectedGraph);
    }
    Ok(map_targets(targets, |t| {
        let mut common: alloc::collections::BTreeMap<u32, usize> = alloc::collections::BTreeMap::new();
        for &w in g.neighbors(t) {
            for &v in g.neighbors(w) {
                if v != t {
                    *common.entry(v).or_insert(0) += 1;
                }
            }
        }
        let du = g.degree(t);
        let cand = common.into_iter().map(|(v, c)| (v, c as f64 / (du + g.degree(v) - c) as f64)).collect();
        NeighborList { target: t, neighbors: top_k(cand, k) }
    }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KatzConfig {
    pub alpha: f64,
    pub horizon: usize,
}

impl Default for KatzConfig {
    fn default() -> Self {
        KatzConfig { alpha: 0.05, horizon: 6 }
    }
}

/// Row `t` of `sum_{j=1..K} alpha^j A^j`, by `K` sparse products.
pub fn katz_similarity_row(g: &TrustGraph, t: u32, cfg: &KatzConfig) -> Vec<f64> {
    let n = g.num_nodes();
    let mut x = alloc::vec![0.0; n];
    let mut next = alloc::vec![0.0; n];
    let mut total = alloc::vec![0.0; n];
    x[t as usize] = 1.0;
    let mut active = alloc::vec![t];
    let mut mark = alloc::vec![false; n];
    for _ in 0..cfg.horizon {
        let mut reached = Vec::new();
        for &u in &active {
            let w = cfg.alpha * x[u as usize];
            for &v in g.neighbors(u) {
                if !mark[v as usize] {
                    mark[v as usize] = true;
                    reached.push(v);
                }
                next[v as usize] += w;
            }
        }
        for &u in &active {
            x[u as usize] = 0.0;
        }
        for &v in &reached {
            mark[v as usize] = false;
            x[v as usize] = next[v as usize];
            next[v as usize] = 0.0;
            total[v as usize] += x[v as usize];
        }
        active = reached;
    }
    total
}

/// Truncated Katz similarity on the undirected graph; self and
/// zero-similarity users are excluded.
pub fn neighbors_katz(g: &TrustGraph, targets: &[u32], k: usize, cfg: &KatzConfig) -> Result<Vec<NeighborList>> {
    if g.is_directed() {
        return Err(Error::DirectedGraph);
    }
    if cfg.horizon == 0 {
        return Err(Error::param("horizon", "must be at least 1"));
    }
    let adj = g.adjacency();
    let rho = spectral_radius(g.num_nodes(), |x, y| adj.apply(x, y), 7);
    if !(cfg.alpha > 0.0) || cfg.alpha * rho >= 1.0 {
        return Err(Error::param("alpha", alloc::format!("Katz decay {} must lie in (0, 1/rho) with rho = {rho:.6}", cfg.alpha)));
    }
    Ok(map_targets(targets, |t| {
        let row = katz_similarity_row(g, t, cfg);
        let cand = row
            .iter()
            .enumerate()
            .filter(|&(v, &s)| v != t as usize && s > 0.0)
            .map(|(v, &s)| (v as u32, s))
            .collect();
        NeighborList { target: t, neighbors: top_k(cand, k) }
    }))
}
