//! Structural roles: per-node features clustered with k-means.

use alloc::vec::Vec;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::graph::TrustGraph;
use crate::math;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RoleFeatures {
    /// Degree followed by `iterations` rounds of neighbor sums.
    WlDegree { iterations: usize },
    /// `[triangles, open wedges centred at u, open wedges ending at u]`
    Motif3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoleConfig {
    pub features: RoleFeatures,
    pub num_clusters: usize,
    /// Replace every feature `x` with `floor(log2(x + 1))`.
    pub log_binning: bool,
}

impl Default for RoleConfig {
    fn default() -> Self {
        RoleConfig { features: RoleFeatures::WlDegree { iterations: 2 }, num_clusters: 50, log_binning: true }
    }
}

const KMEANS_MAX_ITER: usize = 100;

pub fn role_features(g: &TrustGraph, cfg: &RoleConfig) -> Vec<Vec<f64>> {
    let n = g.num_nodes();
    let mut feats: Vec<Vec<f64>> = match cfg.features {
        RoleFeatures::WlDegree { iterations } => {
            let mut cur: Vec<f64> = (0..n as u32).map(|u| g.degree(u) as f64).collect();
            let mut out: Vec<Vec<f64>> = cur.iter().map(|&d| alloc::vec![d]).collect();
            for _ in 0..iterations {
                let next: Vec<f64> =
                    (0..n as u32).map(|u| g.neighbors(u).iter().map(|&v| cur[v as usize]).sum()).collect();
                for (f, &x) in out.iter_mut().zip(&next) {
                    f.push(x);
                }
                cur = next;
            }
            out
        }
        RoleFeatures::Motif3 => motif3(g),
    };
    if cfg.log_binning {
        for x in feats.iter_mut().flatten() {
            *x = math::floor(math::log2(*x + 1.0));
        }
    }
    feats
}

fn motif3(g: &TrustGraph) -> Vec<Vec<f64>> {
    let n = g.num_nodes();
    let tri: Vec<u64> = (0..n as u32)
        .map(|u| {
            let nb = g.neighbors(u);
            let mut t = 0;
            for (i, &v) in nb.iter().enumerate() {
                t += nb[i + 1..].iter().filter(|&&w| g.has_arc(v, w)).count() as u64;
            }
            t
        })
        .collect();
    (0..n as u32)
        .map(|u| {
            let d = g.degree(u) as u64;
            let t = tri[u as usize];
            let centre = d * d.saturating_sub(1) / 2 - t;
            let end = g.neighbors(u).iter().map(|&v| g.degree(v) as u64 - 1).sum::<u64>() - 2 * t;
            alloc::vec![t as f64, centre as f64, end as f64]
        })
        .collect()
}

/// Role id per node. Roles are numbered by first appearance in node order.
pub fn assign_roles(g: &TrustGraph, cfg: &RoleConfig, seed: u64) -> Result<Vec<u32>> {
    if cfg.num_clusters < 2 {
        return Err(Error::param("num_clusters", "must be at least 2"));
    }
    if let RoleFeatures::WlDegree { iterations: 0 } = cfg.features {
        return Err(Error::param("iterations", "must be at least 1"));
    }
    if cfg.num_clusters > g.num_nodes() {
        return Err(Error::param("num_clusters", "exceeds the number of nodes"));
    }
    let feats = role_features(g, cfg);
    Ok(canonical(&kmeans(&feats, cfg.num_clusters, seed)))
}

fn canonical(labels: &[u32]) -> Vec<u32> {
    let mut map = alloc::collections::BTreeMap::new();
    labels
        .iter()
        .map(|l| {
            let next = map.len() as u32;
            *map.entry(*l).or_insert(next)
        })
        .collect()
}

fn lex(a: &[f64], b: &[f64]) -> core::cmp::Ordering {
    a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(core::cmp::Ordering::Equal)
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// k-means++ seeding followed by Lloyd iterations. With at most `k`
/// distinct points each distinct point becomes its own cluster.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64) -> Vec<u32> {
    let mut distinct: Vec<&[f64]> = points.iter().map(|p| p.as_slice()).collect();
    distinct.sort_by(|a, b| lex(a, b));
    distinct.dedup();
    if distinct.len() <= k {
        return points.iter().map(|p| distinct.binary_search_by(|d| lex(d, p)).unwrap() as u32).collect();
    }

    let mut r = rng::seeded(seed);
    let mut centres: Vec<Vec<f64>> = alloc::vec![points[r.random_range(0..points.len())].clone()];
    let mut best: Vec<f64> = points.iter().map(|p| dist2(p, &centres[0])).collect();
    while centres.len() < k {
        let total: f64 = best.iter().sum();
        let mut target = r.random::<f64>() * total;
        let mut pick = points.len() - 1;
        for (i, &d) in best.iter().enumerate() {
            if target < d {
                pick = i;
                break;
            }
            target -= d;
        }
        centres.push(points[pick].clone());
        let c = centres.last().unwrap();
        for (b, p) in best.iter_mut().zip(points) {
            *b = b.min(dist2(p, c));
        }
    }

    let dim = points[0].len();
    let mut labels = alloc::vec![0u32; points.len()];
    for iter in 0..KMEANS_MAX_ITER {
        let mut changed = false;
        for (l, p) in labels.iter_mut().zip(points) {
            let nearest = (0..k)
                .min_by(|&a, &b| dist2(p, &centres[a]).total_cmp(&dist2(p, &centres[b])))
                .unwrap() as u32;
            if nearest != *l || iter == 0 {
                changed |= nearest != *l;
                *l = nearest;
            }
        }
        if iter > 0 && !changed {
            break;
        }
        let mut sums = alloc::vec![alloc::vec![0.0; dim]; k];
        let mut sizes = alloc::vec![0usize; k];
        for (l, p) in labels.iter().zip(points) {
            sizes[*l as usize] += 1;
            for (s, x) in sums[*l as usize].iter_mut().zip(p) {
                *s += x;
            }
        }
        for c in 0..k {
            // empty clusters keep their previous centre
            if sizes[c] > 0 {
                centres[c] = sums[c].iter().map(|s| s / sizes[c] as f64).collect();
            }
        }
    }
    labels
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn motif_counts_on_triangle_with_tail() {
        // triangle 0-1-2 plus pendant 3 on node 2
        let g = TrustGraph::undirected(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]);
        let f = motif3(&g);
        assert_eq!(f[0], [1.0, 0.0, 1.0]);
        assert_eq!(f[2], [1.0, 2.0, 0.0]);
        assert_eq!(f[3], [0.0, 0.0, 2.0]);
    }

    #[test]
    fn kmeans_separates_two_blobs() {
        let pts: Vec<Vec<f64>> = (0..20).map(|i| alloc::vec![if i < 10 { 0.0 } else { 10.0 } + (i % 3) as f64 * 0.1]).collect();
        let l = canonical(&kmeans(&pts, 2, 1));
        assert!(l[..10].iter().all(|&x| x == 0) && l[10..].iter().all(|&x| x == 1));
    }
}
