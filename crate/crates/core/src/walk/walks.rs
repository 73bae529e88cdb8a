//! Truncated random walks, uniform or with second-order (return / in-out) bias.

use alloc::vec::Vec;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::graph::TrustGraph;
use crate::rng::{self, Rng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WalkBias {
    Uniform,
    /// Weight `1/p` back to the previous node, `1` to its neighbors, `1/q`
    /// to everything else.
    SecondOrder { p: f64, q: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkConfig {
    pub num_walks: usize,
    pub walk_length: usize,
    pub bias: WalkBias,
    pub seed: u64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig { num_walks: 10, walk_length: 80, bias: WalkBias::Uniform, seed: 1 }
    }
}

impl WalkConfig {
    fn validate(&self) -> Result<()> {
        if self.walk_length == 0 {
            return Err(Error::param("walk_length", "must be at least 1"));
        }
        if let WalkBias::SecondOrder { p, q } = self.bias {
            if !(p > 0.0 && q > 0.0 && p.is_finite() && q.is_finite()) {
                return Err(Error::param("p", "return and in-out parameters must be positive"));
            }
        }
        Ok(())
    }
}

/// Walks stored back to back; walk `i` is `tokens[offsets[i]..offsets[i + 1]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkCorpus {
    num_nodes: usize,
    tokens: Vec<u32>,
    offsets: Vec<usize>,
    counts: Vec<u64>,
}

impl WalkCorpus {
    pub fn from_sequences<S: AsRef<[u32]>>(num_nodes: usize, sequences: &[S]) -> Result<Self> {
        let mut tokens = Vec::new();
        let mut offsets = alloc::vec![0];
        let mut counts = alloc::vec![0u64; num_nodes];
        for s in sequences {
            for &t in s.as_ref() {
                if t as usize >= num_nodes {
                    return Err(Error::param("sequences", alloc::format!("token {t} out of range")));
                }
                counts[t as usize] += 1;
                tokens.push(t);
            }
            offsets.push(tokens.len());
        }
        Ok(WalkCorpus { num_nodes, tokens, offsets, counts })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn walk(&self, i: usize) -> &[u32] {
        &self.tokens[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn walks(&self) -> impl Iterator<Item = &[u32]> + '_ {
        (0..self.len()).map(move |i| self.walk(i))
    }

    pub fn num_tokens(&self) -> usize {
        self.tokens.len()
    }

    /// Occurrences of each node across all walks.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }
}

/// `num_walks` walks from every node with at least one neighbor, in
/// round-major order. Walk `(round, start)` uses its own generator stream, so
/// the corpus does not depend on how work is scheduled.
pub fn generate_walks(g: &TrustGraph, cfg: &WalkConfig) -> Result<WalkCorpus> {
    cfg.validate()?;
    let n = g.num_nodes();
    let starts: Vec<u32> = (0..n as u32).filter(|&u| g.degree(u) > 0).collect();
    let jobs = cfg.num_walks * starts.len();
    let one = |j: usize| {
        let (round, start) = (j / starts.len().max(1), starts[j % starts.len().max(1)]);
        let mut r = rng::stream(cfg.seed, (round * n + start as usize) as u64);
        walk_from(g, start, cfg, &mut r)
    };
    #[cfg(feature = "std")]
    let walks: Vec<Vec<u32>> = {
        use rayon::prelude::*;
        (0..jobs).into_par_iter().map(one).collect()
    };
    #[cfg(not(feature = "std"))]
    let walks: Vec<Vec<u32>> = (0..jobs).map(one).collect();
    WalkCorpus::from_sequences(n, &walks)
}

fn walk_from(g: &TrustGraph, start: u32, cfg: &WalkConfig, r: &mut Rng) -> Vec<u32> {
    let mut walk = Vec::with_capacity(cfg.walk_length);
    walk.push(start);
    while walk.len() < cfg.walk_length {
        let cur = walk[walk.len() - 1];
        let nbrs = g.neighbors(cur);
        if nbrs.is_empty() {
            break;
        }
        let next = match (cfg.bias, walk.len()) {
            (WalkBias::Uniform, _) | (_, 1) => nbrs[r.random_range(0..nbrs.len())],
            (WalkBias::SecondOrder { p, q }, len) => biased_step(g, walk[len - 2], nbrs, p, q, r),
        };
        walk.push(next);
    }
    walk
}

#[inline]
fn bias_weight(g: &TrustGraph, prev: u32, x: u32, p: f64, q: f64) -> f64 {
    if x == prev {
        1.0 / p
    } else if g.has_arc(x, prev) {
        1.0
    } else {
        1.0 / q
    }
}

/// Rejection sampling against the largest of the three bias weights.
fn biased_step(g: &TrustGraph, prev: u32, nbrs: &[u32], p: f64, q: f64, r: &mut Rng) -> u32 {
    let bound = (1.0 / p).max(1.0).max(1.0 / q);
    loop {
        let x = nbrs[r.random_range(0..nbrs.len())];
        if r.random::<f64>() * bound < bias_weight(g, prev, x, p, q) {
            return x;
        }
    }
}

/// Exact next-step distribution from `cur` given the previous node.
pub fn transition_probabilities(g: &TrustGraph, prev: Option<u32>, cur: u32, bias: WalkBias) -> Vec<(u32, f64)> {
    let nbrs = g.neighbors(cur);
    let weights: Vec<f64> = match (bias, prev) {
        (WalkBias::SecondOrder { p, q }, Some(prev)) => nbrs.iter().map(|&x| bias_weight(g, prev, x, p, q)).collect(),
        _ => alloc::vec![1.0; nbrs.len()],
    };
    let total: f64 = weights.iter().sum();
    nbrs.iter().zip(weights).map(|(&x, w)| (x, w / total)).collect()
}
