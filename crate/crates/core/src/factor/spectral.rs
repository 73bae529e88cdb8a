//! Laplacian eigenmaps and locally linear embedding.
//!
//! Both reduce to the smallest eigenpairs of a sparse PSD matrix. The graph
//! is split into connected components (isolated nodes dropped) and each
//! component is solved by Lanczos on `c I - K`, where `c` bounds the
//! spectrum of `K`. Block-diagonal structure makes the union of per-component
//! eigenpairs an eigenbasis of the whole matrix, including the repeated zero
//! eigenvalue of a disconnected graph.

use alloc::vec::Vec;

use super::{fix_column_signs, non_isolated, DEFAULT_DIM};
use crate::embedding::{EmbeddingMatrix, EmbeddingMeta};
use crate::error::{Error, Result};
use crate::graph::TrustGraph;
use crate::linalg::{largest_eigenpairs, LanczosOptions, Mat};
use crate::math;

#[derive(Debug, Clone, Copy)]
pub struct SpectralConfig {
    pub dim: usize,
    pub lanczos: LanczosOptions,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig { dim: DEFAULT_DIM, lanczos: LanczosOptions::default() }
    }
}

/// Smallest eigenpairs in ascending order; vectors span all graph nodes
/// (rows of isolated nodes are zero).
#[derive(Debug, Clone)]
pub struct SpectralPairs {
    pub values: Vec<f64>,
    pub vectors: Mat,
}

#[derive(Clone, Copy)]
enum Kind {
    /// `I - D^-1/2 A D^-1/2`
    NormalizedLaplacian,
    /// `(I - W)^T (I - W)` with `W = D^-1 A`
    LleGram,
}

/// The `count` smallest eigenpairs of the symmetric normalized Laplacian.
pub fn normalized_laplacian_eigenpairs(g: &TrustGraph, count: usize, opts: LanczosOptions) -> Result<SpectralPairs> {
    smallest_pairs(g, count, Kind::NormalizedLaplacian, opts)
}

/// The `count` smallest eigenpairs of `(I - W)^T (I - W)`.
pub fn lle_eigenpairs(g: &TrustGraph, count: usize, opts: LanczosOptions) -> Result<SpectralPairs> {
    smallest_pairs(g, count, Kind::LleGram, opts)
}

/// Rows are the eigenvectors of `L_sym` for the `dim` smallest eigenvalues
/// after the trivial one.
pub fn laplacian_eigenmaps(g: &TrustGraph, cfg: &SpectralConfig) -> Result<EmbeddingMatrix> {
    let pairs = normalized_laplacian_eigenpairs(g, cfg.dim + 1, cfg.lanczos)?;
    to_embedding(g, pairs, cfg.dim, EmbeddingMeta::new("le").param("dim", cfg.dim))
}

/// Rows are the eigenvectors of `(I - W)^T (I - W)` for the `dim` smallest
/// eigenvalues after the trivial one.
pub fn locally_linear_embedding(g: &TrustGraph, cfg: &SpectralConfig) -> Result<EmbeddingMatrix> {
    let pairs = lle_eigenpairs(g, cfg.dim + 1, cfg.lanczos)?;
    to_embedding(g, pairs, cfg.dim, EmbeddingMeta::new("lle").param("dim", cfg.dim))
}

fn to_embedding(g: &TrustGraph, pairs: SpectralPairs, dim: usize, meta: EmbeddingMeta) -> Result<EmbeddingMatrix> {
    let n = g.num_nodes();
    let mut values = alloc::vec![0.0; n * dim];
    for j in 0..dim {
        let col = pairs.vectors.col(j + 1);
        for u in 0..n {
            values[u * dim + j] = col[u];
        }
    }
    EmbeddingMatrix::new(n, dim, values, meta)
}

fn smallest_pairs(g: &TrustGraph, count: usize, kind: Kind, opts: LanczosOptions) -> Result<SpectralPairs> {
    if g.is_directed() {
        return Err(Error::DirectedGraph);
    }
    let keep = non_isolated(g);
    let active = keep.iter().filter(|&&k| k).count();
    if count == 0 || count > active {
        return Err(Error::param(
            "dim",
            alloc::format!("need {count} eigenpairs but only {active} nodes have trust edges"),
        ));
    }
    let n = g.num_nodes();
    let components = connected_components(g);
    let mut local = alloc::vec![u32::MAX; n];

    // (eigenvalue, component, index within component, vector over component)
    let mut found: Vec<(f64, usize, usize, Vec<f64>)> = Vec::new();
    for (ci, nodes) in components.iter().enumerate() {
        let sub = Adjacency::component(g, nodes, &mut local);
        let k = nodes.len().min(count);
        let local_opts = LanczosOptions { seed: opts.seed ^ (ci as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15), ..opts };
        let pairs = match kind {
            Kind::NormalizedLaplacian => laplacian_component(&sub, k, local_opts)?,
            Kind::LleGram => lle_component(&sub, k, local_opts)?,
        };
        for (i, (val, vec)) in pairs.into_iter().enumerate() {
            found.push((val, ci, i, vec));
        }
    }
    // numerically zero eigenvalues (one per component) tie; order them by component
    let key = |v: f64| if v.abs() < 1e-10 { 0.0 } else { v };
    found.sort_by(|a, b| key(a.0).total_cmp(&key(b.0)).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    found.truncate(count);

    let mut vectors = Mat::zeros(n, count);
    let mut values = Vec::with_capacity(count);
    for (j, (val, ci, _, vec)) in found.into_iter().enumerate() {
        values.push(val);
        let col = vectors.col_mut(j);
        for (&u, x) in components[ci].iter().zip(vec) {
            col[u as usize] = x;
        }
    }
    fix_column_signs(&mut vectors);
    Ok(SpectralPairs { values, vectors })
}

/// Adjacency of one connected component in local indices.
struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Adjacency {
    /// `local` is scratch of length `g.num_nodes()`, restored on return.
    fn component(g: &TrustGraph, nodes: &[u32], local: &mut [u32]) -> Self {
        for (i, &u) in nodes.iter().enumerate() {
            local[u as usize] = i as u32;
        }
        let mut offsets = alloc::vec![0usize];
        let mut targets = Vec::new();
        for &u in nodes {
            // neighbors of a component member are members; sorted order is kept
            targets.extend(g.neighbors(u).iter().map(|&v| local[v as usize]));
            offsets.push(targets.len());
        }
        for &u in nodes {
            local[u as usize] = u32::MAX;
        }
        Adjacency { offsets, targets }
    }

    fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    fn neighbors(&self, u: usize) -> &[u32] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }

    fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }
}

/// Connected components with at least one edge, nodes ascending, ordered by
/// smallest member.
fn connected_components(g: &TrustGraph) -> Vec<Vec<u32>> {
    let n = g.num_nodes();
    let mut seen = alloc::vec![false; n];
    let mut out = Vec::new();
    for s in 0..n as u32 {
        if seen[s as usize] || g.degree(s) == 0 {
            continue;
        }
        let mut comp = alloc::vec![s];
        seen[s as usize] = true;
        let mut head = 0;
        while head < comp.len() {
            let u = comp[head];
            head += 1;
            for &v in g.neighbors(u) {
                if !seen[v as usize] {
                    seen[v as usize] = true;
                    comp.push(v);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Smallest `k` eigenpairs (ascending) of `L_sym` on a connected graph.
fn laplacian_component(g: &Adjacency, k: usize, opts: LanczosOptions) -> Result<Vec<(f64, Vec<f64>)>> {
    let n = g.len();
    let inv_sqrt: Vec<f64> = (0..n).map(|u| 1.0 / math::sqrt(g.degree(u) as f64)).collect();
    // 2I - L_sym = I + D^-1/2 A D^-1/2
    let op = |x: &[f64], y: &mut [f64]| {
        for u in 0..n {
            let s: f64 = g.neighbors(u).iter().map(|&v| inv_sqrt[v as usize] * x[v as usize]).sum();
            y[u] = x[u] + inv_sqrt[u] * s;
        }
    };
    let eig = largest_eigenpairs(n, k, op, opts)?;
    Ok((0..k).map(|i| (2.0 - eig.values[i], eig.vectors.col(i).to_vec())).collect())
}

/// Smallest `k` eigenpairs (ascending) of `(I - W)^T (I - W)`.
fn lle_component(g: &Adjacency, k: usize, opts: LanczosOptions) -> Result<Vec<(f64, Vec<f64>)>> {
    let n = g.len();
    let inv_deg: Vec<f64> = (0..n).map(|u| 1.0 / g.degree(u) as f64).collect();
    // ||B||_2^2 <= ||B||_1 ||B||_inf for B = I - W; rows of W sum to one
    let col_abs = (0..n)
        .map(|v| 1.0 + g.neighbors(v).iter().map(|&u| inv_deg[u as usize]).sum::<f64>())
        .fold(0.0f64, f64::max);
    let bound = 2.0 * col_abs;
    let op = |x: &[f64], y: &mut [f64]| {
        // t = (I - W) x
        let t: Vec<f64> = (0..n)
            .map(|u| x[u] - inv_deg[u] * g.neighbors(u).iter().map(|&v| x[v as usize]).sum::<f64>())
            .collect();
        // y = c x - (I - W)^T t
        for u in 0..n {
            y[u] = bound * x[u] - t[u];
        }
        for u in 0..n {
            let w = inv_deg[u] * t[u];
            for &v in g.neighbors(u) {
                y[v as usize] += w;
            }
        }
    };
    let eig = largest_eigenpairs(n, k, op, opts)?;
    Ok((0..k).map(|i| (bound - eig.values[i], eig.vectors.col(i).to_vec())).collect())
}
