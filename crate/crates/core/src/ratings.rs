//! Sparse user-item ratings with per-item popularity.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ids::IdMap;

/// Row-major sparse ratings `R`. Every stored rating is strictly positive and
/// there is at most one entry per (user, item).
#[derive(Debug, Clone, PartialEq)]
pub struct RatingsMatrix {
    user_ids: IdMap,
    item_ids: IdMap,
    offsets: Vec<usize>,
    items: Vec<u32>,
    values: Vec<f64>,
    item_pop: Vec<u32>,
}

impl RatingsMatrix {
    /// Builds the matrix from `(user, item, rating)` triples given in input
    /// order. A repeated (user, item) keeps its last occurrence.
    pub fn from_triples(user_ids: IdMap, item_ids: IdMap, triples: &[(u32, u32, f64)]) -> Result<Self> {
        let (nu, ni) = (user_ids.len(), item_ids.len());
        let mut order: Vec<usize> = (0..triples.len()).collect();
        for &(u, i, r) in triples {
            if u as usize >= nu || i as usize >= ni {
                return Err(Error::param("triples", "index outside the id maps"));
            }
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::param("rating", "ratings must be finite and strictly positive"));
            }
        }
        // stable sort keeps input order within a (user, item) group
        order.sort_by_key(|&k| (triples[k].0, triples[k].1));
        let mut offsets = alloc::vec![0usize; nu + 1];
        let mut items = Vec::with_capacity(triples.len());
        let mut values = Vec::with_capacity(triples.len());
        let mut pos = 0;
        while pos < order.len() {
            let (u, i, _) = triples[order[pos]];
            let mut last = pos;
            while last + 1 < order.len() && triples[order[last + 1]].0 == u && triples[order[last + 1]].1 == i {
                last += 1;
            }
            items.push(i);
            values.push(triples[order[last]].2);
            offsets[u as usize + 1] += 1;
            pos = last + 1;
        }
        for k in 0..nu {
            offsets[k + 1] += offsets[k];
        }
        let mut m = RatingsMatrix { user_ids, item_ids, offsets, items, values, item_pop: Vec::new() };
        m.item_pop = m.count_item_pop();
        Ok(m)
    }

    pub fn empty() -> Self {
        Self::from_triples(IdMap::new(), IdMap::new(), &[]).unwrap()
    }

    pub fn num_users(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn num_items(&self) -> usize {
        self.item_pop.len()
    }

    pub fn num_entries(&self) -> usize {
        self.items.len()
    }

    pub fn user_ids(&self) -> &IdMap {
        &self.user_ids
    }

    pub fn item_ids(&self) -> &IdMap {
        &self.item_ids
    }

    /// Items rated by `u` (ascending) and their ratings.
    #[inline]
    pub fn row(&self, u: u32) -> (&[u32], &[f64]) {
        let (a, b) = (self.offsets[u as usize], self.offsets[u as usize + 1]);
        (&self.items[a..b], &self.values[a..b])
    }

    pub fn row_len(&self, u: u32) -> usize {
        self.offsets[u as usize + 1] - self.offsets[u as usize]
    }

    pub fn rating(&self, u: u32, i: u32) -> Option<f64> {
        let (items, values) = self.row(u);
        items.binary_search(&i).ok().map(|k| values[k])
    }

    /// Number of distinct users who rated each item.
    pub fn item_pop(&self) -> &[u32] {
        &self.item_pop
    }

    /// Users with at least one rating.
    pub fn num_active_users(&self) -> usize {
        (0..self.num_users() as u32).filter(|&u| self.row_len(u) > 0).count()
    }

    pub fn entries(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        (0..self.num_users() as u32).flat_map(move |u| {
            let (items, values) = self.row(u);
            items.iter().zip(values).map(move |(&i, &r)| (u, i, r))
        })
    }

    /// Recounts popularity from the stored entries.
    pub fn count_item_pop(&self) -> Vec<u32> {
        let mut pop = alloc::vec![0u32; self.item_ids.len()];
        for &i in &self.items {
            pop[i as usize] += 1;
        }
        pop
    }

    /// Same id universe, but only the rows of users with `keep[u]`.
    pub fn restrict_users(&self, keep: &[bool]) -> RatingsMatrix {
        let triples: Vec<(u32, u32, f64)> = self.entries().filter(|&(u, _, _)| keep[u as usize]).collect();
        Self::from_triples(self.user_ids.clone(), self.item_ids.clone(), &triples)
            .expect("entries of a valid matrix are valid")
    }

    /// Grows the user universe to `ids`, which must extend the current one.
    pub fn with_user_ids(&self, ids: IdMap) -> Result<RatingsMatrix> {
        if ids.len() < self.user_ids.len() || ids.names()[..self.user_ids.len()] != *self.user_ids.names() {
            return Err(Error::param("ids", "new id map must extend the existing user ids"));
        }
        let triples: Vec<_> = self.entries().collect();
        Self::from_triples(ids, self.item_ids.clone(), &triples)
    }
}
