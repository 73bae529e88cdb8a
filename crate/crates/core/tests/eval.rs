use proptest::prelude::*;
use trustrec_core::eval::*;
use trustrec_core::walk::SgnsConfig;
use trustrec_core::{EmbeddingMatrix, EmbeddingMeta, Error, IdMap, RatingsMatrix};

const EPS: f64 = 1e-12;

fn model(rows: usize, dim: usize, values: Vec<f64>) -> ItemEmbeddingModel {
    let embedding = EmbeddingMatrix::new(rows, dim, values, EmbeddingMeta::new("fixture")).unwrap();
    ItemEmbeddingModel { embedding, epoch_loss: vec![] }
}

#[test]
fn ndcg_fixtures() {
    assert!((ndcg_at_n(&[0, 1, 2], &[1], 3) - 1.0 / 3f64.log2()).abs() < EPS);
    assert_eq!(ndcg_at_n(&[2, 0, 1], &[0, 1, 2], 3), 1.0);
    assert_eq!(ndcg_at_n(&[3, 4], &[0, 1], 10), 0.0);
    assert_eq!(ndcg_at_n(&[0, 1], &[], 10), 0.0);
    // two relevant at ranks 1 and 3, three relevant overall, n = 3
    let dcg = 1.0 + 0.5;
    let idcg = 1.0 + 1.0 / 3f64.log2() + 0.5;
    assert!((ndcg_at_n(&[0, 9, 1], &[0, 1, 2], 3) - dcg / idcg).abs() < EPS);
    // items past n do not count
    assert_eq!(ndcg_at_n(&[9, 8, 0], &[0], 2), 0.0);
}

#[test]
fn epc_fixtures() {
    let pop = [4, 2, 2, 0];
    assert_eq!(epc_novelty(&[0], &pop, 4, 10), 0.0);
    assert!((epc_novelty(&[1, 2], &pop, 4, 10) - 0.5).abs() < EPS);
    assert_eq!(epc_novelty(&[3, 7], &pop, 4, 10), 1.0);
    assert!((epc_novelty(&[0, 1, 3], &pop, 4, 2) - 0.25).abs() < EPS);
    // discounted variant: weights 1, 0.85
    let d = epc_novelty_discounted(&[3, 0], None, &pop, 4, 10);
    assert!((d - 1.0 / 1.85).abs() < EPS);
    let rel = epc_novelty_discounted(&[1, 3], Some(&[3]), &pop, 4, 10);
    assert!((rel - 0.85 / 1.85).abs() < EPS);
}

#[test]
fn ild_fixtures() {
    let same = model(3, 2, vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
    assert_eq!(ild_diversity(&[0, 1, 2], &same, 10), Some(0.0));
    let orth = model(2, 2, vec![1.0, 0.0, 0.0, 3.0]);
    assert!((ild_diversity(&[0, 1], &orth, 10).unwrap() - 0.5).abs() < EPS);
    // pairwise cosines {1, 0, 0}
    let m = model(3, 2, vec![1.0, 0.0, 2.0, 0.0, 0.0, 1.0]);
    assert!((ild_diversity(&[0, 1, 2], &m, 10).unwrap() - 1.0 / 3.0).abs() < EPS);
    let opposite = model(2, 1, vec![1.0, -1.0]);
    assert_eq!(ild_diversity(&[0, 1], &opposite, 10), Some(1.0));
    assert_eq!(ild_diversity(&[0], &m, 10), None);
    assert_eq!(ild_diversity(&[0, 1, 2], &m, 1), None);
}

#[test]
fn coverage_and_aggregate() {
    assert!(matches!(user_coverage(&[]), Err(Error::InsufficientData(_))));
    let none = vec![EvalRecord::uncovered(0), EvalRecord::uncovered(1)];
    assert_eq!(user_coverage(&none).unwrap(), 0.0);
    let pop = [1, 1, 0];
    let recs = [
        evaluate_user(0, &[0, 1], &[0], &pop, 2, None, 10),
        evaluate_user(1, &[2], &[2], &pop, 2, None, 10),
        evaluate_user(2, &[], &[1], &pop, 2, None, 10),
    ];
    assert!(!recs[2].covered && recs[2].ndcg.is_none());
    let a = aggregate(&recs).unwrap();
    assert!((a.coverage - 2.0 / 3.0).abs() < EPS);
    let mean_ndcg = (recs[0].ndcg.unwrap() + recs[1].ndcg.unwrap()) / 2.0;
    assert_eq!(a.ndcg, mean_ndcg);
    assert!((a.novelty - (0.5 + 1.0) / 2.0).abs() < EPS);
    assert_eq!(a.diversity, None);
    assert_eq!((a.covered, a.total), (2, 3));
}

#[test]
fn coverage_ratio_from_split_counts() {
    let mut records: Vec<EvalRecord> = (0..545).map(EvalRecord::uncovered).collect();
    for r in records.iter_mut().take(241) {
        *r = evaluate_user(r.user, &[0], &[0], &[0], 1, None, 10);
    }
    assert!((user_coverage(&records).unwrap() - 0.442).abs() < 5e-4);
}

fn toy_ratings() -> RatingsMatrix {
    // items 0 and 1 share raters {0..4}, item 2 has raters {5..9}, item 3 has one rater
    let mut t = Vec::new();
    for u in 0..5 {
        t.push((u, 0, 4.0));
        t.push((u, 1, 3.0));
    }
    for u in 5..10 {
        t.push((u, 2, 5.0));
    }
    t.push((0, 3, 1.0));
    RatingsMatrix::from_triples(IdMap::sequential(10), IdMap::sequential(5), &t).unwrap()
}

#[test]
fn item_embeddings_follow_shared_raters() {
    let cfg = SgnsConfig { dim: 16, epochs: 200, negatives: 3, seed: 7, ..Default::default() };
    let m = train_item_embeddings(&toy_ratings(), &cfg).unwrap();
    let e = &m.embedding;
    assert_eq!(e.num_nodes(), 5);
    assert!(e.all_finite());
    assert!(e.cosine(0, 1) > e.cosine(0, 2));
    assert!(e.cosine(0, 1) > e.cosine(1, 2));
    assert!(e.row(3).iter().any(|&x| x != 0.0));
    assert!(e.row(4).iter().all(|&x| x == 0.0));
    let again = train_item_embeddings(&toy_ratings(), &cfg).unwrap();
    assert_eq!(again.embedding, m.embedding);
}

#[test]
fn item_embeddings_need_ratings() {
    let r = RatingsMatrix::from_triples(IdMap::sequential(1), IdMap::sequential(1), &[]).unwrap();
    assert_eq!(train_item_embeddings(&r, &SgnsConfig::default()).unwrap_err(), Error::EmptyVocabulary);
}

/// Two-sided p-value by enumerating every sign pattern over the midranks.
fn wilcoxon_oracle(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|&d| d != 0.0).collect();
    let n = d.len();
    let ranks: Vec<f64> = d
        .iter()
        .map(|x| {
            let below = d.iter().filter(|y| y.abs() < x.abs()).count() as f64;
            let equal = d.iter().filter(|y| y.abs() == x.abs()).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect();
    let w: f64 = d.iter().zip(&ranks).filter(|(x, _)| **x > 0.0).map(|(_, r)| r).sum();
    let (mut le, mut ge) = (0u64, 0u64);
    for mask in 0u64..1 << n {
        let s: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        if s <= w + 1e-9 {
            le += 1;
        }
        if s >= w - 1e-9 {
            ge += 1;
        }
    }
    let total = (1u64 << n) as f64;
    (2.0 * (le.min(ge) as f64) / total).min(1.0)
}

#[test]
fn wilcoxon_all_positive_ten_pairs() {
    let a: Vec<f64> = (1..=10).map(|i| i as f64 + 0.5).collect();
    let b: Vec<f64> = (1..=10).map(|i| i as f64 * 0.1).collect();
    let r = wilcoxon_signed_rank(&a, &b).unwrap();
    assert!(r.exact);
    assert_eq!(r.statistic, 0.0);
    assert!((r.p_value - 2.0 / 1024.0).abs() < EPS);
    assert_eq!(wilcoxon_signed_rank(&b, &a).unwrap().p_value, r.p_value);
}

#[test]
fn wilcoxon_rejects_degenerate_input() {
    let a = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
    assert!(matches!(wilcoxon_signed_rank(&a, &a), Err(Error::InsufficientData(_))));
    let b = [1.0, 2.0, 3.0, 4.5, 5.5, 6.0];
    assert!(matches!(wilcoxon_signed_rank(&a, &b), Err(Error::InsufficientData(_))));
    assert!(matches!(wilcoxon_signed_rank(&a, &b[..5]), Err(Error::LengthMismatch { .. })));
}

#[test]
fn wilcoxon_normal_approximation() {
    // 30 positive distinct differences: W+ = 465, mean 232.5, var 30*31*61/24
    let a: Vec<f64> = (1..=30).map(|i| i as f64).collect();
    let b = vec![0.0; 30];
    let r = wilcoxon_signed_rank(&a, &b).unwrap();
    assert!(!r.exact);
    let z: f64 = 232.5 / (30.0 * 31.0 * 61.0 / 24.0f64).sqrt();
    let expected = statrs::function::erf::erfc(z / 2f64.sqrt());
    assert!((r.p_value - expected).abs() < 1e-12 * expected.max(1e-300) + 1e-15);
}

#[test]
fn bonferroni_fixtures() {
    assert!((bonferroni(&[0.004], 2).unwrap()[0] - 0.008).abs() < EPS);
    assert_eq!(bonferroni(&[0.7], 5).unwrap(), vec![1.0]);
    assert_eq!(bonferroni(&[0.3, 0.01], 1).unwrap(), vec![0.3, 0.01]);
    assert!(bonferroni(&[0.1], 0).is_err());
}

/// Tau-b by enumerating all pairs.
fn kendall_oracle(x: &[f64], y: &[f64]) -> (i64, f64) {
    let n = x.len();
    let (mut s, mut tx, mut ty, mut pairs) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = (x[i] - x[j]).signum() * (x[i] != x[j]) as i64 as f64;
            let dy = (y[i] - y[j]).signum() * (y[i] != y[j]) as i64 as f64;
            s += (dx * dy) as i64;
            tx += (x[i] == x[j]) as i64;
            ty += (y[i] == y[j]) as i64;
            pairs += 1;
        }
    }
    (s, s as f64 / (((pairs - tx) * (pairs - ty)) as f64).sqrt())
}

#[test]
fn kendall_fixtures() {
    let x = [1.0, 2.0, 3.0, 4.0];
    assert_eq!(kendall_tau(&x, &x).unwrap().tau, 1.0);
    assert_eq!(kendall_tau(&x, &[4.0, 3.0, 2.0, 1.0]).unwrap().tau, -1.0);
    assert!((kendall_tau(&x, &[1.0, 3.0, 2.0, 4.0]).unwrap().tau - 2.0 / 3.0).abs() < EPS);
    assert!(matches!(kendall_tau(&x, &[2.0; 4]), Err(Error::Undefined(_))));
    assert!(kendall_tau(&[1.0], &[1.0]).is_err());
    assert!(matches!(kendall_tau(&x, &x[..3]), Err(Error::LengthMismatch { .. })));
}

#[test]
fn kendall_p_value_without_ties() {
    // n = 10, perfect concordance: S = 45, var = 10*9*25/18 = 125
    let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
    let r = kendall_tau(&x, &x).unwrap();
    let expected = statrs::function::erf::erfc(45.0 / 125f64.sqrt() / 2f64.sqrt());
    assert!((r.p_value - expected).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kendall_matches_pair_enumeration(
        pairs in prop::collection::vec((0u8..12, 0u8..12), 2..200),
    ) {
        let x: Vec<f64> = pairs.iter().map(|p| p.0 as f64).collect();
        let y: Vec<f64> = pairs.iter().map(|p| p.1 as f64).collect();
        let (s, tau) = kendall_oracle(&x, &y);
        match kendall_tau(&x, &y) {
            Ok(r) => {
                prop_assert_eq!(r.s, s);
                prop_assert!((r.tau - tau).abs() < EPS);
                prop_assert!((0.0..=1.0).contains(&r.p_value));
            }
            Err(e) => prop_assert!(matches!(e, Error::Undefined(_))),
        }
    }

    #[test]
    fn wilcoxon_exact_matches_sign_enumeration(
        pairs in prop::collection::vec((-4i8..5, -4i8..5), 5..13),
    ) {
        let a: Vec<f64> = pairs.iter().map(|p| p.0 as f64).collect();
        let b: Vec<f64> = pairs.iter().map(|p| p.1 as f64).collect();
        match wilcoxon_signed_rank(&a, &b) {
            Ok(r) => {
                prop_assert!(r.exact);
                prop_assert!((r.p_value - wilcoxon_oracle(&a, &b)).abs() < EPS);
                prop_assert_eq!(wilcoxon_signed_rank(&b, &a).unwrap().p_value, r.p_value);
            }
            Err(e) => prop_assert!(matches!(e, Error::InsufficientData(_))),
        }
    }

    #[test]
    fn metrics_stay_in_unit_interval(
        recs in prop::collection::vec(0u32..30, 0..15),
        truth in prop::collection::btree_set(0u32..30, 0..10),
        pop in prop::collection::vec(0u32..20, 30),
        vecs in prop::collection::vec(-1.0f64..1.0, 60),
        n in 1usize..12,
    ) {
        let truth: Vec<u32> = truth.into_iter().collect();
        let m = model(30, 2, vecs);
        let ndcg = ndcg_at_n(&recs, &truth, n);
        prop_assert!((0.0..=1.0 + EPS).contains(&ndcg));
        let nov = epc_novelty(&recs, &pop, 20, n);
        prop_assert!((0.0..=1.0).contains(&nov));
        let disc = epc_novelty_discounted(&recs, Some(&truth), &pop, 20, n);
        prop_assert!((0.0..=1.0).contains(&disc));
        if let Some(d) = ild_diversity(&recs, &m, n) {
            prop_assert!((0.0..=1.0).contains(&d));
        }
    }

    #[test]
    fn ndcg_ignores_order_below_cutoff_and_rewards_relevance(
        perm in Just((0u32..20).collect::<Vec<u32>>()).prop_shuffle(),
        truth in prop::collection::btree_set(0u32..20, 1..10),
        n in 2usize..10,
    ) {
        let truth: Vec<u32> = truth.into_iter().collect();
        let base = ndcg_at_n(&perm, &truth, n);
        let mut tail = perm.clone();
        tail[n..].reverse();
        prop_assert_eq!(ndcg_at_n(&tail, &truth, n), base);
        let rel = |i: u32| truth.binary_search(&i).is_ok();
        if let Some(lo) = (1..n).find(|&j| rel(perm[j]) && !rel(perm[j - 1])) {
            let mut up = perm.clone();
            up.swap(lo - 1, lo);
            prop_assert!(ndcg_at_n(&up, &truth, n) > base);
        }
    }
}
