//! Graph factorization: SGD on the squared reconstruction error of the
//! adjacency over observed edges, with L2 regularization.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::DEFAULT_DIM;
use crate::embedding::{EmbeddingMatrix, EmbeddingMeta};
use crate::error::{Error, Result};
use crate::graph::TrustGraph;
use crate::math;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GfConfig {
    pub dim: usize,
    pub learning_rate: f64,
    pub reg: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for GfConfig {
    fn default() -> Self {
        GfConfig { dim: DEFAULT_DIM, learning_rate: 0.01, reg: 0.1, epochs: 50, seed: 1 }
    }
}

/// Objective value and mean row norm after each epoch.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GfReport {
    pub objective: Vec<f64>,
    pub mean_norm: Vec<f64>,
}

/// `sum_{(u,v) in E} (1 - <y_u, y_v>)^2 + reg/2 * sum_u |y_u|^2` over the
/// undirected edges `u < v` of `g`. `y` is row-major with `dim` columns.
pub fn gf_objective(g: &TrustGraph, y: &[f64], dim: usize, reg: f64) -> f64 {
    let mut total = 0.0;
    for (u, v) in g.edges() {
        let e = 1.0 - math::dot(row(y, u, dim), row(y, v, dim));
        total += e * e;
    }
    total + 0.5 * reg * math::dot(y, y)
}

/// Analytic gradient of [`gf_objective`].
pub fn gf_gradient(g: &TrustGraph, y: &[f64], dim: usize, reg: f64) -> Vec<f64> {
    let mut grad: Vec<f64> = y.iter().map(|x| reg * x).collect();
    for (u, v) in g.edges() {
        let e = 1.0 - math::dot(row(y, u, dim), row(y, v, dim));
        for k in 0..dim {
            grad[u as usize * dim + k] -= 2.0 * e * y[v as usize * dim + k];
            grad[v as usize * dim + k] -= 2.0 * e * y[u as usize * dim + k];
        }
    }
    grad
}

#[inline]
fn row(y: &[f64], u: u32, dim: usize) -> &[f64] {
    &y[u as usize * dim..(u as usize + 1) * dim]
}

/// Learns `y` by one shuffled pass over the edges per epoch followed by one
/// regularization step on every node.
pub fn graph_factorization(g: &TrustGraph, cfg: &GfConfig) -> Result<(EmbeddingMatrix, GfReport)> {
    if g.is_directed() {
        return Err(Error::DirectedGraph);
    }
    if cfg.dim == 0 {
        return Err(Error::param("dim", "must be at least 1"));
    }
    if cfg.epochs == 0 {
        return Err(Error::param("epochs", "must be at least 1"));
    }
    if !(cfg.learning_rate > 0.0) || !(cfg.reg >= 0.0) {
        return Err(Error::param("learning_rate", "learning rate must be positive and reg non-negative"));
    }
    let (n, dim) = (g.num_nodes(), cfg.dim);
    let mut rng = rng::seeded(cfg.seed);
    let scale = 1.0 / math::sqrt(dim as f64);
    let mut y: Vec<f64> = (0..n * dim).map(|_| (rng.random::<f64>() - 0.5) * scale).collect();
    let mut edges: Vec<(u32, u32)> = g.edges().collect();
    let mut report = GfReport::default();
    let mut last_stable = None;
    let decay = 1.0 - cfg.learning_rate * cfg.reg;

    for epoch in 0..cfg.epochs {
        edges.shuffle(&mut rng);
        for &(u, v) in &edges {
            let (a, b) = (u as usize * dim, v as usize * dim);
            let e = 1.0 - math::dot(&y[a..a + dim], &y[b..b + dim]);
            let step = 2.0 * cfg.learning_rate * e;
            for k in 0..dim {
                let (yu, yv) = (y[a + k], y[b + k]);
                y[a + k] += step * yv;
                y[b + k] += step * yu;
            }
        }
        y.iter_mut().for_each(|x| *x *= decay);

        let objective = gf_objective(g, &y, dim, cfg.reg);
        if !objective.is_finite() {
            return Err(Error::Diverged { epoch, last_stable });
        }
        let mean_norm = (0..n).map(|u| math::norm(row(&y, u as u32, dim))).sum::<f64>() / n.max(1) as f64;
        report.objective.push(objective);
        report.mean_norm.push(mean_norm);
        last_stable = Some(epoch);
    }

    for u in 0..n as u32 {
        if g.degree(u) == 0 {
            y[u as usize * dim..(u as usize + 1) * dim].iter_mut().for_each(|x| *x = 0.0);
        }
    }
    let meta = EmbeddingMeta::new("gf")
        .param("dim", dim)
        .param("learning_rate", cfg.learning_rate)
        .param("reg", cfg.reg)
        .param("epochs", cfg.epochs)
        .seed(cfg.seed);
    Ok((EmbeddingMatrix::new(n, dim, y, meta)?, report))
}
