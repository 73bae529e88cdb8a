//! HOPE: truncated SVD of a high-order proximity matrix, applied matrix-free.

use alloc::vec::Vec;

use super::{non_isolated, DEFAULT_DIM};
use crate::embedding::{EmbeddingMatrix, EmbeddingMeta};
use crate::error::{Error, Result};
use crate::graph::TrustGraph;
use crate::linalg::{spectral_radius, truncated_svd, CsrMatrix, LinearOperator, SvdOptions};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProximityKind {
    /// `(I - beta A)^-1 beta A`, requires `0 < beta < 1 / rho(A)`.
    Katz { beta: f64 },
    /// `(1 - alpha) (I - alpha P)^-1` with `P = D^-1 A`.
    RootedPageRank { alpha: f64 },
    /// `A^2`
    CommonNeighbors,
    /// `A diag(1 / ln deg) A`, skipping mid-nodes of degree <= 1.
    AdamicAdar,
}

impl Default for ProximityKind {
    fn default() -> Self {
        ProximityKind::Katz { beta: 0.01 }
    }
}

impl ProximityKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProximityKind::Katz { .. } => "katz",
            ProximityKind::RootedPageRank { .. } => "rpr",
            ProximityKind::CommonNeighbors => "cn",
            ProximityKind::AdamicAdar => "aa",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct HopeConfig {
    pub dim: usize,
    pub proximity: ProximityKind,
    pub svd: SvdOptions,
}

impl Default for HopeConfig {
    fn default() -> Self {
        HopeConfig { dim: DEFAULT_DIM, proximity: ProximityKind::default(), svd: SvdOptions::default() }
    }
}

const SOLVE_TOL: f64 = 1e-14;
const SOLVE_MAX_ITER: usize = 100_000;

/// Proximity matrix `S` of a graph, available only through products.
pub struct ProximityOperator {
    kind: ProximityKind,
    adj: CsrMatrix,
    adj_t: CsrMatrix,
    trans: CsrMatrix,
    trans_t: CsrMatrix,
    aa_weight: Vec<f64>,
}

impl ProximityOperator {
    /// Validates parameters (Katz decay against a power-iteration estimate
    /// of the spectral radius) and prepares the operator.
    pub fn new(g: &TrustGraph, kind: ProximityKind) -> Result<Self> {
        let adj = g.adjacency();
        match kind {
            ProximityKind::Katz { beta } => {
                let rho = spectral_radius(g.num_nodes(), |x, y| adj.apply(x, y), 7);
                if !(beta > 0.0) || beta * rho >= 1.0 {
                    return Err(Error::param(
                        "beta",
                        alloc::format!("Katz decay {beta} must lie in (0, 1/rho) with rho = {rho:.6}"),
                    ));
                }
            }
            ProximityKind::RootedPageRank { alpha } => {
                if !(alpha > 0.0 && alpha < 1.0) {
                    return Err(Error::param("alpha", "restart probability must lie in (0, 1)"));
                }
            }
            _ => {}
        }
        let trans = g.transition();
        let aa_weight = (0..g.num_nodes() as u32)
            .map(|u| {
                let d = g.degree(u);
                if d > 1 {
                    1.0 / math::ln(d as f64)
                } else {
                    0.0
                }
            })
            .collect();
        Ok(ProximityOperator { kind, adj_t: adj.transpose(), adj, trans_t: trans.transpose(), trans, aa_weight })
    }

    /// Dense row-major `S`, for small graphs and tests.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.adj.nrows();
        let mut out = alloc::vec![0.0; n * n];
        let mut e = alloc::vec![0.0; n];
        let mut col = alloc::vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            self.apply(&e, &mut col);
            e[j] = 0.0;
            for i in 0..n {
                out[i * n + j] = col[i];
            }
        }
        out
    }

    fn product(&self, x: &[f64], y: &mut [f64], transpose: bool) {
        let n = self.adj.nrows();
        let (a, p) = if transpose { (&self.adj_t, &self.trans_t) } else { (&self.adj, &self.trans) };
        match self.kind {
            ProximityKind::Katz { beta } => {
                // y = (I - beta A)^-1 beta A x, by fixed-point iteration y <- b + beta A y
                let mut b = alloc::vec![0.0; n];
                a.apply(x, &mut b);
                b.iter_mut().for_each(|v| *v *= beta);
                fixed_point(a, beta, &b, y);
            }
            ProximityKind::RootedPageRank { alpha } => {
                let b: Vec<f64> = x.iter().map(|v| (1.0 - alpha) * v).collect();
                fixed_point(p, alpha, &b, y);
            }
            ProximityKind::CommonNeighbors => {
                let mut t = alloc::vec![0.0; n];
                a.apply(x, &mut t);
                a.apply(&t, y);
            }
            ProximityKind::AdamicAdar => {
                let mut t = alloc::vec![0.0; n];
                a.apply(x, &mut t);
                for (ti, w) in t.iter_mut().zip(&self.aa_weight) {
                    *ti *= w;
                }
                a.apply(&t, y);
            }
        }
    }
}

/// Solves `y = b + c M y` by iteration; converges when `c rho(M) < 1`.
fn fixed_point(m: &CsrMatrix, c: f64, b: &[f64], y: &mut [f64]) {
    y.copy_from_slice(b);
    let mut next = alloc::vec![0.0; b.len()];
    for _ in 0..SOLVE_MAX_ITER {
        m.apply(y, &mut next);
        let mut delta = 0.0f64;
        let mut size = 0.0f64;
        for ((ni, bi), yi) in next.iter_mut().zip(b).zip(y.iter()) {
            *ni = bi + c * *ni;
            delta = delta.max((*ni - yi).abs());
            size = size.max(ni.abs());
        }
        y.copy_from_slice(&next);
        if delta <= SOLVE_TOL * size.max(f64::MIN_POSITIVE) {
            break;
        }
    }
}

impl LinearOperator for ProximityOperator {
    fn nrows(&self) -> usize {
        self.adj.nrows()
    }

    fn ncols(&self) -> usize {
        self.adj.ncols()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.product(x, y, false);
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        self.product(x, y, true);
    }
}

/// Rank-`dim/2` SVD of the proximity matrix; row `u` is `[U_u sqrt(s) | V_u sqrt(s)]`.
pub fn hope(g: &TrustGraph, cfg: &HopeConfig) -> Result<EmbeddingMatrix> {
    if g.is_directed() {
        return Err(Error::DirectedGraph);
    }
    if cfg.dim < 2 || cfg.dim % 2 != 0 {
        return Err(Error::param("dim", "HOPE needs an even dimension >= 2"));
    }
    let keep = non_isolated(g);
    let (sub, old) = g.induced(&keep);
    let rank = cfg.dim / 2;
    if rank > sub.num_nodes() {
        return Err(Error::param(
            "dim",
            alloc::format!("rank {rank} exceeds the {} nodes with trust edges", sub.num_nodes()),
        ));
    }
    let op = ProximityOperator::new(&sub, cfg.proximity)?;
    let svd = truncated_svd(&op, rank, cfg.svd)?;
    let n = g.num_nodes();
    let mut values = alloc::vec![0.0; n * cfg.dim];
    for (local, &u) in old.iter().enumerate() {
        let row = &mut values[u as usize * cfg.dim..(u as usize + 1) * cfg.dim];
        for j in 0..rank {
            let w = math::sqrt(svd.s[j]);
            row[j] = svd.u.get(local, j) * w;
            row[rank + j] = svd.v.get(local, j) * w;
        }
    }
    let mut meta = EmbeddingMeta::new("hope").param("dim", cfg.dim).param("proximity", cfg.proximity.name());
    match cfg.proximity {
        ProximityKind::Katz { beta } => meta = meta.param("beta", beta),
        ProximityKind::RootedPageRank { alpha } => meta = meta.param("alpha", alpha),
        _ => {}
    }
    EmbeddingMatrix::new(n, cfg.dim, values, meta)
}
