#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use trustrec_core::rng;
use trustrec_core::TrustGraph;

/// Erdos-Renyi style undirected graph.
pub fn random_graph(n: usize, p: f64, seed: u64) -> TrustGraph {
    let mut r = rng::seeded(seed);
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            if r.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    TrustGraph::undirected(n, &edges)
}

/// Random connected graph: a random spanning tree plus extra edges.
pub fn connected_graph(n: usize, extra: usize, seed: u64) -> TrustGraph {
    let mut r = rng::seeded(seed);
    let mut edges = Vec::new();
    for v in 1..n as u32 {
        edges.push((r.random_range(0..v), v));
    }
    for _ in 0..extra {
        let (a, b) = (r.random_range(0..n as u32), r.random_range(0..n as u32));
        edges.push((a, b));
    }
    TrustGraph::undirected(n, &edges)
}

pub fn path(n: usize) -> TrustGraph {
    let edges: Vec<(u32, u32)> = (1..n as u32).map(|v| (v - 1, v)).collect();
    TrustGraph::undirected(n, &edges)
}

pub fn cycle(n: usize) -> TrustGraph {
    let edges: Vec<(u32, u32)> = (0..n as u32).map(|v| (v, (v + 1) % n as u32)).collect();
    TrustGraph::undirected(n, &edges)
}

pub fn clique_edges(nodes: std::ops::Range<u32>) -> Vec<(u32, u32)> {
    let mut e = Vec::new();
    for u in nodes.clone() {
        for v in u + 1..nodes.end {
            e.push((u, v));
        }
    }
    e
}

pub fn dense_adjacency(g: &TrustGraph) -> DMatrix<f64> {
    let n = g.num_nodes();
    let mut a = DMatrix::zeros(n, n);
    for (u, v) in g.arcs() {
        a[(u as usize, v as usize)] = 1.0;
    }
    a
}

/// `sin` of the largest principal angle between the column spaces of two
/// matrices with orthonormal columns, as `||P1 - P2||_F`.
pub fn subspace_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a * a.transpose() - b * b.transpose()).norm()
}
