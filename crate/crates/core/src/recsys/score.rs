use alloc::vec::Vec;

use super::{rank_order, top_k, NeighborList, RecommendationList};
use crate::ratings::RatingsMatrix;

/// Reusable accumulator for `score(i) = sum_v S(t, v) R(v, i)`.
pub struct Scorer {
    acc: Vec<f64>,
    seen: Vec<bool>,
    touched: Vec<u32>,
}

impl Scorer {
    pub fn new(num_items: usize) -> Self {
        Scorer { acc: alloc::vec![0.0; num_items], seen: alloc::vec![false; num_items], touched: Vec::new() }
    }

    /// Top-`n` items rated by any neighbor, skipping `exclude` (sorted).
    pub fn score(&mut self, nl: &NeighborList, r: &RatingsMatrix, n: usize, exclude: &[u32]) -> RecommendationList {
        for &(v, s) in &nl.neighbors {
            if (v as usize) >= r.num_users() {
                continue;
            }
            let (items, values) = r.row(v);
            for (&i, &x) in items.iter().zip(values) {
                if !self.seen[i as usize] {
                    self.seen[i as usize] = true;
                    self.touched.push(i);
                }
                self.acc[i as usize] += s * x;
            }
        }
        let mut cand = Vec::with_capacity(self.touched.len());
        for &i in &self.touched {
            if exclude.binary_search(&i).is_err() {
                cand.push((i, self.acc[i as usize]));
            }
            self.acc[i as usize] = 0.0;
            self.seen[i as usize] = false;
        }
        self.touched.clear();
        RecommendationList { target: nl.target, items: top_k(cand, n) }
    }
}

/// One-shot form of [`Scorer::score`].
pub fn score_items(nl: &NeighborList, r: &RatingsMatrix, n: usize, exclude: &[u32]) -> RecommendationList {
    Scorer::new(r.num_items()).score(nl, r, n, exclude)
}

/// Items ordered by rater count; items nobody rated are left out.
#[derive(Debug, Clone)]
pub struct PopularityRanking {
    order: Vec<(u32, f64)>,
}

impl PopularityRanking {
    pub fn new(item_pop: &[u32]) -> Self {
        let mut order: Vec<(u32, f64)> =
            item_pop.iter().enumerate().filter(|x| *x.1 > 0).map(|(i, &c)| (i as u32, c as f64)).collect();
        order.sort_unstable_by(rank_order);
        PopularityRanking { order }
    }

    /// The `n` most popular items not in `exclude` (sorted).
    pub fn recommend(&self, target: u32, n: usize, exclude: &[u32]) -> RecommendationList {
        let items = self.order.iter().filter(|(i, _)| exclude.binary_search(i).is_err()).take(n).copied().collect();
        RecommendationList { target, items }
    }
}

/// The `n` most frequently rated items.
pub fn most_popular(item_pop: &[u32], n: usize) -> Vec<(u32, f64)> {
    PopularityRanking::new(item_pop).recommend(u32::MAX, n, &[]).items
}
