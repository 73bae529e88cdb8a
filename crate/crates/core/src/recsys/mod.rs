//! Neighborhood-based recommendation: cosine kNN over embeddings, the trust
//! baselines, similarity-weighted scoring and most-popular ranking.
//!
//! Ties are always broken by ascending dense index.

mod knn;
mod score;
mod trust;

use alloc::vec::Vec;
use core::cmp::Ordering;

pub use knn::knn_from_embedding;
pub use score::{most_popular, score_items, PopularityRanking, Scorer};
pub use trust::{katz_similarity_row, neighbors_direct, neighbors_jaccard, neighbors_katz, neighbors_undirected, Direction, KatzConfig};

/// Neighborhood size.
pub const DEFAULT_K: usize = 40;
/// Recommendation list length.
pub const DEFAULT_N: usize = 10;

/// Up to `k` users most similar to `target`, most similar first.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborList {
    pub target: u32,
    pub neighbors: Vec<(u32, f64)>,
}

impl NeighborList {
    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    pub fn len(&self) -> usize {
        self.neighbors.len()
    }
}

/// Ranked items for one user, highest score first.
#[derive(Debug, Clone, PartialEq)]
pub struct RecommendationList {
    pub target: u32,
    pub items: Vec<(u32, f64)>,
}

impl RecommendationList {
    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn item_ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.items.iter().map(|x| x.0)
    }
}

/// Descending score, then ascending index.
#[inline]
pub(crate) fn rank_order(a: &(u32, f64), b: &(u32, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then(a.0.cmp(&b.0))
}

/// The `k` best entries in [`rank_order`].
pub(crate) fn top_k(mut candidates: Vec<(u32, f64)>, k: usize) -> Vec<(u32, f64)> {
    if candidates.len() > k && k > 0 {
        candidates.select_nth_unstable_by(k - 1, rank_order);
        candidates.truncate(k);
    }
    candidates.truncate(k);
    candidates.sort_unstable_by(rank_order);
    candidates
}

/// Maps `f` over targets, in parallel with the `std` feature; output order
/// follows `targets`.
pub(crate) fn map_targets<T, F>(targets: &[u32], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u32) -> T + Sync + Send,
{
    #[cfg(feature = "std")]
    {
        use rayon::prelude::*;
        targets.par_iter().map(|&t| f(t)).collect()
    }
    #[cfg(not(feature = "std"))]
    {
        targets.iter().map(|&t| f(t)).collect()
    }
}
