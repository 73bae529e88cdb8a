//! Warm-start / cold-start user splits.

use alloc::vec::Vec;

use crate::graph::TrustGraph;
use crate::ratings::RatingsMatrix;

/// Default rating-count threshold: warm users have strictly more ratings.
pub const DEFAULT_THRESHOLD: usize = 10;

/// Dense user indices per split, each list ascending.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SplitSpec {
    pub warm_users: Vec<u32>,
    pub cold_users: Vec<u32>,
    /// Warm users with at least one trust arc.
    pub validation_users: Vec<u32>,
    /// Cold users with at least one trust arc.
    pub test_users: Vec<u32>,
}

impl SplitSpec {
    /// Membership mask over `n` users.
    pub fn mask(users: &[u32], n: usize) -> Vec<bool> {
        let mut m = alloc::vec![false; n];
        for &u in users {
            m[u as usize] = true;
        }
        m
    }
}

/// Splits users with ratings into warm (> `threshold` ratings) and cold
/// (1..=`threshold` ratings). Validation and test sets keep the users that
/// have an incoming or outgoing arc in the (directed) trust graph.
///
/// `r` and `g` must share the user id universe (same dense indices).
pub fn split_users(r: &RatingsMatrix, g: &TrustGraph, threshold: usize) -> SplitSpec {
    let trusted = g.has_incident_arc();
    let mut split = SplitSpec::default();
    for u in 0..r.num_users() as u32 {
        let count = r.row_len(u);
        if count == 0 {
            continue;
        }
        let has_trust = trusted.get(u as usize).copied().unwrap_or(false);
        if count > threshold {
            split.warm_users.push(u);
            if has_trust {
                split.validation_users.push(u);
            }
        } else {
            split.cold_users.push(u);
            if has_trust {
                split.test_users.push(u);
            }
        }
    }
    split
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ids::IdMap;

    #[test]
    fn boundary_is_inclusive_for_cold() {
        let triples: Vec<_> = (0..3u32).flat_map(|u| (0..10u32).map(move |i| (u, i, 1.0))).collect();
        let r = RatingsMatrix::from_triples(IdMap::sequential(3), IdMap::sequential(10), &triples).unwrap();
        let g = TrustGraph::directed(3, &[(0, 1)]);
        let s = split_users(&r, &g, 10);
        assert!(s.warm_users.is_empty());
        assert_eq!(s.cold_users, [0, 1, 2]);
        assert_eq!(s.test_users, [0, 1]);
    }

    #[test]
    fn subsets_hold() {
        let mut triples = Vec::new();
        for u in 0..6u32 {
            for i in 0..(u * 4) {
                triples.push((u, i, 3.0));
            }
        }
        let r = RatingsMatrix::from_triples(IdMap::sequential(6), IdMap::sequential(20), &triples).unwrap();
        let g = TrustGraph::directed(6, &[(1, 4), (5, 2)]);
        let s = split_users(&r, &g, 10);
        assert_eq!(s.warm_users, [3, 4, 5]);
        assert_eq!(s.cold_users, [1, 2]);
        assert_eq!(s.validation_users, [4, 5]);
        assert_eq!(s.test_users, [1, 2]);
    }
}
