mod common;

use common::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;
use trustrec_core::recsys::*;
use trustrec_core::{rng, EmbeddingMatrix, EmbeddingMeta, IdMap, RatingsMatrix, TrustGraph};

fn embedding(rows: usize, dim: usize, values: Vec<f64>) -> EmbeddingMatrix {
    EmbeddingMatrix::new(rows, dim, values, EmbeddingMeta::new("test")).unwrap()
}

fn ratings(users: usize, items: usize, triples: &[(u32, u32, f64)]) -> RatingsMatrix {
    RatingsMatrix::from_triples(IdMap::sequential(users), IdMap::sequential(items), triples).unwrap()
}

/// Exhaustive cosine kNN with the same ordering rules.
fn knn_oracle(e: &EmbeddingMatrix, t: usize, k: usize) -> Vec<(u32, f64)> {
    if e.row(t).iter().all(|&x| x == 0.0) {
        return vec![];
    }
    let mut all: Vec<(u32, f64)> = (0..e.num_nodes())
        .filter(|&v| v != t && e.row(v).iter().any(|&x| x != 0.0))
        .map(|v| (v as u32, e.cosine(t, v)))
        .collect();
    all.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

#[test]
fn duplicate_rows_are_nearest() {
    let e = embedding(3, 2, vec![1.0, 2.0, -1.0, 0.5, 1.0, 2.0]);
    let nl = knn_from_embedding(&e, &[0], 2);
    assert_eq!(nl[0].neighbors[0].0, 2);
    assert_eq!(nl[0].neighbors[0].1, 1.0);
}

#[test]
fn orthogonal_rows_tie_by_index() {
    let mut v = vec![0.0; 16];
    for i in 0..4 {
        v[i * 4 + i] = 1.0;
    }
    let nl = knn_from_embedding(&embedding(4, 4, v), &[2], 3);
    assert_eq!(nl[0].neighbors, [(0, 0.0), (1, 0.0), (3, 0.0)]);
}

#[test]
fn zero_rows_are_skipped() {
    let e = embedding(3, 2, vec![1.0, 0.0, 0.0, 0.0, 0.5, 0.5]);
    let nl = knn_from_embedding(&e, &[0, 1], 5);
    assert_eq!(nl[0].neighbors.iter().map(|x| x.0).collect::<Vec<_>>(), [2]);
    assert!(nl[1].is_empty());
}

#[test]
fn knn_matches_exhaustive_oracle() {
    let mut r = rng::seeded(31);
    for (n, d) in [(5, 3), (50, 4), (200, 8)] {
        let mut v: Vec<f64> = (0..n * d).map(|_| r.random::<f64>() * 2.0 - 1.0).collect();
        // a few zero rows and exact duplicates
        v[..d].iter_mut().for_each(|x| *x = 0.0);
        let dup: Vec<f64> = v[d..2 * d].to_vec();
        v[2 * d..3 * d].copy_from_slice(&dup);
        let e = embedding(n, d, v);
        let targets: Vec<u32> = (0..n as u32).collect();
        for k in [1, 3, 40] {
            for nl in knn_from_embedding(&e, &targets, k) {
                assert_eq!(nl.neighbors, knn_oracle(&e, nl.target as usize, k));
                assert!(nl.neighbors.iter().all(|&(v, s)| v != nl.target && (-1.0..=1.0).contains(&s)));
            }
        }
    }
}

#[test]
fn direct_and_undirected_trust() {
    let g = TrustGraph::directed(4, &[(0, 1), (0, 2), (3, 0)]);
    let out = neighbors_direct(&g, &[0, 1], 40, Direction::Out).unwrap();
    assert_eq!(out[0].neighbors, [(1, 1.0), (2, 1.0)]);
    assert!(out[1].is_empty());
    let inn = neighbors_direct(&g, &[0], 40, Direction::In).unwrap();
    assert_eq!(inn[0].neighbors, [(3, 1.0)]);
    let und = neighbors_undirected(&g.to_undirected(), &[0, 1], 40).unwrap();
    assert_eq!(und[0].neighbors.len(), 3);
    assert_eq!(und[1].neighbors, [(0, 1.0)]);
    assert!(neighbors_undirected(&g, &[0], 1).is_err());
}

#[test]
fn star_centre_truncates_to_k() {
    let edges: Vec<(u32, u32)> = (1..=60).map(|v| (0, v)).collect();
    let g = TrustGraph::undirected(61, &edges);
    let nl = neighbors_undirected(&g, &[0], 40).unwrap();
    assert_eq!(nl[0].len(), 40);
    assert!(nl[0].neighbors.iter().all(|x| x.1 == 1.0));
    assert_eq!(nl[0].neighbors.last().unwrap().0, 40);
}

#[test]
fn jaccard_fixtures() {
    let nl = neighbors_jaccard(&path(3), &[0, 1], 5).unwrap();
    assert_eq!(nl[0].neighbors, [(2, 1.0)]);
    assert!(nl[1].is_empty());
    let tri = TrustGraph::undirected(3, &[(0, 1), (1, 2), (0, 2)]);
    let nl = neighbors_jaccard(&tri, &[0], 5).unwrap();
    assert_eq!(nl[0].neighbors, [(1, 1.0 / 3.0), (2, 1.0 / 3.0)]);
}

fn jaccard_oracle(g: &TrustGraph, u: u32, v: u32) -> f64 {
    let a: std::collections::BTreeSet<u32> = g.neighbors(u).iter().copied().collect();
    let b: std::collections::BTreeSet<u32> = g.neighbors(v).iter().copied().collect();
    let union = a.union(&b).count();
    if union == 0 {
        0.0
    } else {
        a.intersection(&b).count() as f64 / union as f64
    }
}

#[test]
fn jaccard_matches_set_oracle_and_is_symmetric() {
    let g = random_graph(40, 0.1, 8);
    let targets: Vec<u32> = (0..40).collect();
    let lists = neighbors_jaccard(&g, &targets, 40).unwrap();
    for nl in &lists {
        let mut want: Vec<(u32, f64)> = (0..40u32)
            .filter(|&v| v != nl.target)
            .map(|v| (v, jaccard_oracle(&g, nl.target, v)))
            .filter(|x| x.1 > 0.0)
            .collect();
        want.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        assert_eq!(nl.neighbors, want);
        for &(v, s) in &nl.neighbors {
            assert!((0.0..=1.0).contains(&s));
            let back = lists[v as usize].neighbors.iter().find(|x| x.0 == nl.target).unwrap();
            assert_eq!(back.1, s);
        }
    }
}

fn katz_inverse_oracle(g: &TrustGraph, alpha: f64) -> DMatrix<f64> {
    let a = dense_adjacency(g);
    let n = g.num_nodes();
    (DMatrix::identity(n, n) - a * alpha).try_inverse().unwrap() - DMatrix::identity(n, n)
}

#[test]
fn katz_path_matches_dense_inverse() {
    let g = path(3);
    let cfg = KatzConfig { alpha: 0.1, horizon: 60 };
    let row = katz_similarity_row(&g, 0, &cfg);
    assert!((row[2] - katz_inverse_oracle(&g, 0.1)[(0, 2)]).abs() < 1e-8);
    let nl = neighbors_katz(&g, &[0], 5, &cfg).unwrap();
    assert_eq!(nl[0].neighbors.iter().map(|x| x.0).collect::<Vec<_>>(), [1, 2]);
}

#[test]
fn katz_matches_oracle_and_truncation_bound() {
    for seed in 0..4 {
        let g = random_graph(80, 0.06, 40 + seed);
        let a = dense_adjacency(&g);
        let rho = a.clone().symmetric_eigen().eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let alpha = 0.5 / rho;
        let oracle = katz_inverse_oracle(&g, alpha);
        for horizon in [1, 3, 6, 200] {
            let cfg = KatzConfig { alpha, horizon };
            let mut trunc = DMatrix::zeros(80, 80);
            for u in 0..80 {
                let row = katz_similarity_row(&g, u, &cfg);
                for v in 0..80 {
                    trunc[(u as usize, v)] = row[v];
                }
            }
            let diff = &oracle - &trunc;
            let spectral = diff.clone().svd(false, false).singular_values.max();
            let bound = (alpha * rho).powi(horizon as i32 + 1) / (1.0 - alpha * rho);
            assert!(spectral <= bound * (1.0 + 1e-9) + 1e-12, "K={horizon}: {spectral} > {bound}");
            if horizon == 200 {
                assert!(diff.amax() < 1e-8);
                let targets: Vec<u32> = (0..80).collect();
                for nl in neighbors_katz(&g, &targets, 100, &cfg).unwrap() {
                    let t = nl.target as usize;
                    let want = (0..80).filter(|&v| v != t && oracle[(t, v)] > 1e-300).count();
                    assert_eq!(nl.len(), want);
                    for (v, s) in nl.neighbors {
                        assert!((s - oracle[(t, v as usize)]).abs() < 1e-8);
                    }
                }
            }
        }
    }
}

#[test]
fn katz_disconnected_and_small_alpha() {
    let g = TrustGraph::undirected(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 0)]);
    let row = katz_similarity_row(&g, 0, &KatzConfig { alpha: 0.05, horizon: 20 });
    assert_eq!(row[4], 0.0);
    // with tiny alpha the ranking follows direct adjacency first
    let nl = neighbors_katz(&g, &[1], 4, &KatzConfig { alpha: 1e-4, horizon: 6 }).unwrap();
    let direct: Vec<u32> = g.neighbors(1).to_vec();
    let head: Vec<u32> = nl[0].neighbors[..direct.len()].iter().map(|x| x.0).collect();
    let mut sorted_head = head.clone();
    sorted_head.sort();
    assert_eq!(sorted_head, direct);
    assert!(neighbors_katz(&g, &[0], 4, &KatzConfig { alpha: 0.9, horizon: 6 }).is_err());
}

#[test]
fn weighted_neighbor_score_arithmetic() {
    let r = ratings(3, 2, &[(1, 0, 5.0), (2, 0, 3.0), (2, 1, 1.0)]);
    let nl = NeighborList { target: 0, neighbors: vec![(1, 0.8), (2, 0.5)] };
    let recs = score_items(&nl, &r, 10, &[]);
    assert_eq!(recs.items, [(0, 0.8 * 5.0 + 0.5 * 3.0), (1, 0.5)]);
    assert!((recs.items[0].1 - 5.5).abs() < 1e-12);
    let empty = score_items(&NeighborList { target: 0, neighbors: vec![] }, &r, 10, &[]);
    assert!(empty.is_empty());
    let filtered = score_items(&nl, &r, 10, &[0]);
    assert_eq!(filtered.items, [(1, 0.5)]);
}

#[test]
fn most_popular_ordering() {
    assert_eq!(most_popular(&[3, 2, 1], 2), [(0, 3.0), (1, 2.0)]);
    assert_eq!(most_popular(&[1, 3, 2], 10), [(1, 3.0), (2, 2.0), (0, 1.0)]);
    assert_eq!(most_popular(&[2, 2, 0, 5], 10), [(3, 5.0), (0, 2.0), (1, 2.0)]);
    let rank = PopularityRanking::new(&[3, 2, 1]);
    assert_eq!(rank.recommend(7, 2, &[0]).items, [(1, 2.0), (2, 1.0)]);
}

proptest! {
    #[test]
    fn scaling_similarities_keeps_order(
        sims in prop::collection::vec(0.01f64..1.0, 1..8),
        rat in prop::collection::vec((0u32..12, 1u32..6), 1..40),
        c in 0.01f64..100.0,
    ) {
        let users = sims.len() + 1;
        let triples: Vec<(u32, u32, f64)> =
            rat.iter().enumerate().map(|(j, &(i, x))| (1 + (j % sims.len()) as u32, i, x as f64)).collect();
        let r = ratings(users, 12, &triples);
        let nl = NeighborList { target: 0, neighbors: sims.iter().enumerate().map(|(j, &s)| (j as u32 + 1, s)).collect() };
        // scale by a power of two so scores scale exactly
        let c = c.log2().round().exp2();
        let scaled = NeighborList { target: 0, neighbors: nl.neighbors.iter().map(|&(v, s)| (v, s * c)).collect() };
        let a: Vec<u32> = score_items(&nl, &r, 10, &[]).item_ids().collect();
        let b: Vec<u32> = score_items(&scaled, &r, 10, &[]).item_ids().collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn adding_a_rating_never_lowers_a_score(
        sims in prop::collection::vec(0.0f64..1.0, 1..6),
        rat in prop::collection::vec((0u32..8, 1u32..6), 1..30),
        extra_user in 0usize..6,
        item in 0u32..8,
        value in 1u32..6,
    ) {
        let users = sims.len() + 1;
        let triples: Vec<(u32, u32, f64)> =
            rat.iter().enumerate().map(|(j, &(i, x))| (1 + (j % sims.len()) as u32, i, x as f64)).collect();
        let v = 1 + (extra_user % sims.len()) as u32;
        if triples.iter().any(|t| t.0 == v && t.1 == item) {
            return Ok(());
        }
        let mut more = triples.clone();
        more.push((v, item, value as f64));
        let nl = NeighborList { target: 0, neighbors: sims.iter().enumerate().map(|(j, &s)| (j as u32 + 1, s)).collect() };
        let before = score_items(&nl, &ratings(users, 8, &triples), 8, &[]);
        let after = score_items(&nl, &ratings(users, 8, &more), 8, &[]);
        let get = |l: &RecommendationList| l.items.iter().find(|x| x.0 == item).map_or(0.0, |x| x.1);
        prop_assert!(get(&after) >= get(&before));
    }

    #[test]
    fn neighbor_lists_exclude_target(seed in 0u64..50, k in 1usize..10) {
        let g = random_graph(25, 0.15, seed);
        let targets: Vec<u32> = (0..25).collect();
        let lists = neighbors_jaccard(&g, &targets, k).unwrap().into_iter()
            .chain(neighbors_katz(&g, &targets, k, &KatzConfig::default()).unwrap_or_default())
            .chain(neighbors_undirected(&g, &targets, k).unwrap());
        for nl in lists {
            prop_assert!(nl.len() <= k);
            prop_assert!(nl.neighbors.iter().all(|x| x.0 != nl.target));
            prop_assert!(nl.neighbors.windows(2).all(|w| w[0].1 >= w[1].1));
        }
    }
}
