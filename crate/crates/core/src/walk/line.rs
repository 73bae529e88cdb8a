//! LINE: edge-sampled SGD for first- or second-order proximity.

use alloc::vec::Vec;

use rand::Rng as _;

use super::alias::AliasTable;
use crate::embedding::{EmbeddingMatrix, EmbeddingMeta};
use crate::error::{Error, Result};
use crate::factor::DEFAULT_DIM;
use crate::graph::TrustGraph;
use crate::math;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineOrder {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineConfig {
    pub dim: usize,
    pub order: LineOrder,
    /// Total edge samples; `None` means 100 per directed arc.
    pub samples: Option<usize>,
    pub negatives: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for LineConfig {
    fn default() -> Self {
        LineConfig { dim: DEFAULT_DIM, order: LineOrder::Second, samples: None, negatives: 5, learning_rate: 0.025, seed: 1 }
    }
}

pub fn line(g: &TrustGraph, cfg: &LineConfig) -> Result<EmbeddingMatrix> {
    if g.is_directed() {
        return Err(Error::DirectedGraph);
    }
    if cfg.dim == 0 || cfg.negatives == 0 || !(cfg.learning_rate > 0.0) || cfg.samples == Some(0) {
        return Err(Error::param("line", "dim, negatives, samples and learning_rate must be positive"));
    }
    let arcs: Vec<(u32, u32)> = g.arcs().collect();
    if arcs.is_empty() {
        return Err(Error::NoEdges);
    }
    let (n, d) = (g.num_nodes(), cfg.dim);
    let noise = AliasTable::new(&(0..n as u32).map(|u| math::powf(g.degree(u) as f64, 0.75)).collect::<Vec<_>>())?;
    let samples = cfg.samples.unwrap_or(100 * arcs.len());

    let mut r = rng::seeded(cfg.seed);
    let mut y: Vec<f64> = (0..n * d).map(|_| (r.random::<f64>() - 0.5) / d as f64).collect();
    let mut ctx = match cfg.order {
        LineOrder::First => Vec::new(),
        LineOrder::Second => alloc::vec![0.0; n * d],
    };
    let mut yu = alloc::vec![0.0; d];
    let mut neu = alloc::vec![0.0; d];
    for s in 0..samples {
        let lr = cfg.learning_rate * (1.0 - s as f64 / samples as f64).max(1e-4);
        let (u, v) = arcs[r.random_range(0..arcs.len())];
        let (u, v) = (u as usize, v as usize);
        yu.copy_from_slice(&y[u * d..(u + 1) * d]);
        neu.iter_mut().for_each(|x| *x = 0.0);
        let mut loss = 0.0;
        for t in 0..=cfg.negatives {
            let (target, label) = if t == 0 {
                (v, 1.0)
            } else {
                let k = noise.sample(&mut r) as usize;
                if k == v || k == u {
                    continue;
                }
                (k, 0.0)
            };
            let table = match cfg.order {
                LineOrder::First => &mut y,
                LineOrder::Second => &mut ctx,
            };
            let z = &mut table[target * d..(target + 1) * d];
            let f = math::dot(&yu, z);
            loss -= if label > 0.0 { math::log_sigmoid(f) } else { math::log_sigmoid(-f) };
            let gr = (label - math::sigmoid(f)) * lr;
            math::axpy(gr, z, &mut neu);
            math::axpy(gr, &yu, z);
        }
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss { epoch: 0, step: s });
        }
        math::axpy(1.0, &neu, &mut y[u * d..(u + 1) * d]);
    }
    for u in 0..n {
        if g.degree(u as u32) == 0 {
            y[u * d..(u + 1) * d].iter_mut().for_each(|x| *x = 0.0);
        }
    }
    let order = match cfg.order {
        LineOrder::First => 1,
        LineOrder::Second => 2,
    };
    let meta = EmbeddingMeta::new("line")
        .param("dim", d)
        .param("order", order)
        .param("samples", samples)
        .param("negatives", cfg.negatives)
        .param("learning_rate", cfg.learning_rate)
        .seed(cfg.seed);
    EmbeddingMatrix::new(n, d, y, meta)
}
