use alloc::vec::Vec;

use super::{map_targets, top_k, NeighborList};
use crate::embedding::{cosine_with, EmbeddingMatrix};
use crate::math;

/// Cosine kNN. Zero rows are never candidates and get empty lists as
/// targets. Similarities are computed one target row against all rows at a
/// time, so the full similarity matrix is never formed.
pub fn knn_from_embedding(e: &EmbeddingMatrix, targets: &[u32], k: usize) -> Vec<NeighborList> {
    let sq: Vec<f64> = (0..e.num_nodes()).map(|u| math::dot(e.row(u), e.row(u))).collect();
    let n = e.num_nodes();
    map_targets(targets, |t| {
        let st = sq[t as usize];
        if st == 0.0 || k == 0 {
            return NeighborList { target: t, neighbors: Vec::new() };
        }
        let row = e.row(t as usize);
        let mut cand = Vec::with_capacity(n);
        for v in 0..n {
            if v != t as usize && sq[v] != 0.0 {
                cand.push((v as u32, cosine_with(row, e.row(v), st, sq[v])));
            }
        }
        NeighborList { target: t, neighbors: top_k(cand, k) }
    })
}
