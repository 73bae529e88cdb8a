use alloc::vec::Vec;

use super::items::ItemEmbeddingModel;
use crate::error::{Error, Result};
use crate::math;

/// Metrics of one target user. Metric fields are `None` for uncovered
/// users; `diversity` is also `None` for lists shorter than two items.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub user: u32,
    pub covered: bool,
    pub ndcg: Option<f64>,
    pub novelty: Option<f64>,
    pub diversity: Option<f64>,
}

impl EvalRecord {
    pub fn uncovered(user: u32) -> Self {
        EvalRecord { user, covered: false, ndcg: None, novelty: None, diversity: None }
    }
}

#[inline]
fn discount(rank: usize) -> f64 {
    1.0 / math::log2(rank as f64 + 2.0)
}

/// Binary-relevance nDCG@n; `truth` must be sorted.
pub fn ndcg_at_n(recs: &[u32], truth: &[u32], n: usize) -> f64 {
    if truth.is_empty() || n == 0 {
        return 0.0;
    }
    let dcg: f64 = recs.iter().take(n).enumerate().filter(|(_, i)| truth.binary_search(i).is_ok()).map(|(j, _)| discount(j)).sum();
    let idcg: f64 = (0..n.min(truth.len())).map(discount).sum();
    dcg / idcg
}

#[inline]
fn complement(item: u32, item_pop: &[u32], num_users: usize) -> f64 {
    let pop = item_pop.get(item as usize).copied().unwrap_or(0) as f64;
    (1.0 - pop / num_users.max(1) as f64).clamp(0.0, 1.0)
}

/// Mean popularity complement `1 - pop(i) / num_users` over the top `n`.
pub fn epc_novelty(recs: &[u32], item_pop: &[u32], num_users: usize, n: usize) -> f64 {
    let top = &recs[..recs.len().min(n)];
    if top.is_empty() {
        return 0.0;
    }
    top.iter().map(|&i| complement(i, item_pop, num_users)).sum::<f64>() / top.len() as f64
}

/// Rank-discounted EPC with discount `0.85^k`; with `truth`, only relevant
/// items contribute. Normalized by the summed discount.
pub fn epc_novelty_discounted(recs: &[u32], truth: Option<&[u32]>, item_pop: &[u32], num_users: usize, n: usize) -> f64 {
    let top = &recs[..recs.len().min(n)];
    let mut weight = 1.0;
    let (mut num, mut den) = (0.0, 0.0);
    for &i in top {
        let rel = truth.map_or(1.0, |t| if t.binary_search(&i).is_ok() { 1.0 } else { 0.0 });
        num += weight * rel * complement(i, item_pop, num_users);
        den += weight;
        weight *= 0.85;
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Mean `(1 - cos) / 2` over unordered pairs of the top `n`; `None` below
/// two items.
pub fn ild_diversity(recs: &[u32], model: &ItemEmbeddingModel, n: usize) -> Option<f64> {
    let top = &recs[..recs.len().min(n)];
    if top.len() < 2 {
        return None;
    }
    let e = &model.embedding;
    let row = |i: u32| if (i as usize) < e.num_nodes() { Some(e.row(i as usize)) } else { None };
    let (mut total, mut pairs) = (0.0, 0usize);
    for a in 0..top.len() {
        for b in a + 1..top.len() {
            let cos = match (row(top[a]), row(top[b])) {
                (Some(x), Some(y)) => crate::embedding::cosine(x, y),
                _ => 0.0,
            };
            total += ((1.0 - cos) / 2.0).clamp(0.0, 1.0);
            pairs += 1;
        }
    }
    Some(total / pairs as f64)
}

/// Record for one user; covered iff `recs` is non-empty.
pub fn evaluate_user(
    user: u32,
    recs: &[u32],
    truth: &[u32],
    item_pop: &[u32],
    num_users: usize,
    model: Option<&ItemEmbeddingModel>,
    n: usize,
) -> EvalRecord {
    if recs.is_empty() {
        return EvalRecord::uncovered(user);
    }
    EvalRecord {
        user,
        covered: true,
        ndcg: Some(ndcg_at_n(recs, truth, n)),
        novelty: Some(epc_novelty(recs, item_pop, num_users, n)),
        diversity: model.and_then(|m| ild_diversity(recs, m, n)),
    }
}

/// Fraction of records that are covered.
pub fn user_coverage(records: &[EvalRecord]) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::InsufficientData("no users to cover".into()));
    }
    Ok(records.iter().filter(|r| r.covered).count() as f64 / records.len() as f64)
}

/// Means over covered users, with coverage reported separately.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregate {
    pub ndcg: f64,
    pub novelty: f64,
    pub diversity: Option<f64>,
    pub coverage: f64,
    pub covered: usize,
    pub total: usize,
}

pub fn aggregate(records: &[EvalRecord]) -> Result<Aggregate> {
    let coverage = user_coverage(records)?;
    let mean = |f: fn(&EvalRecord) -> Option<f64>| {
        let v: Vec<f64> = records.iter().filter_map(f).collect();
        if v.is_empty() {
            None
        } else {
            Some(v.iter().sum::<f64>() / v.len() as f64)
        }
    };
    Ok(Aggregate {
        ndcg: mean(|r| r.ndcg).unwrap_or(0.0),
        novelty: mean(|r| r.novelty).unwrap_or(0.0),
        diversity: mean(|r| r.diversity),
        coverage,
        covered: records.iter().filter(|r| r.covered).count(),
        total: records.len(),
    })
}
