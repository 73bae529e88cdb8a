//! GraRep: per-order SVDs of log-shifted transition powers.

use super::DEFAULT_DIM;
use crate::embedding::{EmbeddingMatrix, EmbeddingMeta};
use crate::error::{Error, Result};
use crate::graph::TrustGraph;
use crate::linalg::{truncated_svd, CsrMatrix, SvdOptions};
use crate::math;

#[derive(Debug, Clone, Copy)]
pub struct GraRepConfig {
    pub dim: usize,
    pub max_order: usize,
    pub svd: SvdOptions,
}

impl Default for GraRepConfig {
    fn default() -> Self {
        GraRepConfig { dim: DEFAULT_DIM, max_order: 4, svd: SvdOptions::default() }
    }
}

impl GraRepConfig {
    /// Largest multiple of `max_order` not exceeding `DEFAULT_DIM`.
    pub fn with_order(max_order: usize) -> Self {
        let k = max_order.max(1);
        GraRepConfig { dim: (DEFAULT_DIM / k) * k, max_order: k, ..Default::default() }
    }
}

/// `X = max(0, ln(P_uv / sum_w P_wv) - ln(1/N))` for a transition power `P`.
/// Zero entries of `P` stay zero.
pub fn log_transition_matrix(power: &CsrMatrix, num_nodes: usize) -> CsrMatrix {
    let col = power.col_sums();
    let shift = math::ln(num_nodes as f64);
    power.filter_map(|_, c, v| {
        if v <= 0.0 || col[c] <= 0.0 {
            return None;
        }
        let x = math::ln(v / col[c]) + shift;
        (x > 0.0).then_some(x)
    })
}

/// Concatenates `U_k sqrt(S_k)` over transition orders `k = 1..=max_order`,
/// each block of width `dim / max_order`.
pub fn grarep(g: &TrustGraph, cfg: &GraRepConfig) -> Result<EmbeddingMatrix> {
    if g.is_directed() {
        return Err(Error::DirectedGraph);
    }
    if cfg.max_order == 0 {
        return Err(Error::param("max_order", "must be at least 1"));
    }
    if cfg.dim == 0 || cfg.dim % cfg.max_order != 0 {
        return Err(Error::param("dim", alloc::format!("{} is not divisible by max_order {}", cfg.dim, cfg.max_order)));
    }
    let n = g.num_nodes();
    let block = cfg.dim / cfg.max_order;
    if block > n {
        return Err(Error::param("dim", "block rank exceeds the number of nodes"));
    }
    let p = g.transition();
    let mut power = p.clone();
    let mut values = alloc::vec![0.0; n * cfg.dim];
    for k in 0..cfg.max_order {
        if k > 0 {
            power = power.matmul(&p);
        }
        let x = log_transition_matrix(&power, n);
        let svd = truncated_svd(&x, block, cfg.svd)?;
        for u in 0..n {
            for j in 0..block {
                values[u * cfg.dim + k * block + j] = svd.u.get(u, j) * math::sqrt(svd.s[j]);
            }
        }
    }
    for u in 0..n as u32 {
        if g.degree(u) == 0 {
            values[u as usize * cfg.dim..(u as usize + 1) * cfg.dim].iter_mut().for_each(|x| *x = 0.0);
        }
    }
    let meta = EmbeddingMeta::new("grarep").param("dim", cfg.dim).param("max_order", cfg.max_order);
    EmbeddingMatrix::new(n, cfg.dim, values, meta)
}
