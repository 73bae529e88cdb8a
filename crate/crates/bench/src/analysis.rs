//! Pairwise significance of per-user nDCG and Kendall correlations between
//! per-user metrics.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use trustrec_core::eval::{bonferroni, kendall_tau, wilcoxon_signed_rank};

use crate::error::{BenchError, Result};
use crate::io::UserRecord;

pub const SIGNIFICANCE_LEVEL: f64 = 0.01;

/// Per-user records of one method.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodRecords {
    pub method: String,
    pub records: Vec<UserRecord>,
}

impl MethodRecords {
    /// Groups records by their `method` column, keeping first-seen order.
    pub fn group(records: Vec<UserRecord>) -> Vec<MethodRecords> {
        let mut out: Vec<MethodRecords> = Vec::new();
        for r in records {
            match out.iter_mut().find(|m| m.method == r.method) {
                Some(m) => m.records.push(r),
                None => out.push(MethodRecords { method: r.method.clone(), records: vec![r] }),
            }
        }
        out
    }

    fn ndcg_by_user(&self) -> BTreeMap<&str, f64> {
        self.records.iter().filter(|r| r.covered).filter_map(|r| Some((r.user.as_str(), r.ndcg?))).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificanceMatrix {
    pub methods: Vec<String>,
    /// Bonferroni-adjusted two-sided p-values; `None` on the diagonal and
    /// where too few paired users differ.
    pub p_values: Vec<Vec<Option<f64>>>,
    /// `better[i][j]`: method i beats method j at the significance level.
    pub better: Vec<Vec<bool>>,
    /// Significantly better than every other method.
    pub flagged: Vec<bool>,
    pub comparisons: usize,
}

/// Pairwise Wilcoxon tests on per-user nDCG over users covered by both
/// methods, Bonferroni-corrected over all unordered pairs.
pub fn compare_methods(methods: &[MethodRecords]) -> Result<SignificanceMatrix> {
    if methods.len() < 2 {
        return Err(BenchError::data("comparison needs at least two methods"));
    }
    fn universe(m: &MethodRecords) -> BTreeSet<&str> {
        m.records.iter().map(|r| r.user.as_str()).collect()
    }
    let first = universe(&methods[0]);
    if let Some(m) = methods.iter().find(|m| universe(m) != first) {
        return Err(BenchError::data(format!(
            "user universe of `{}` differs from `{}`",
            m.method, methods[0].method
        )));
    }
    let k = methods.len();
    let m = k * (k - 1) / 2;
    let scores: Vec<BTreeMap<&str, f64>> = methods.iter().map(MethodRecords::ndcg_by_user).collect();
    let mut p_values = vec![vec![None; k]; k];
    let mut better = vec![vec![false; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let (a, b): (Vec<f64>, Vec<f64>) =
                scores[i].iter().filter_map(|(u, &x)| Some((x, *scores[j].get(u)?))).unzip();
            let Ok(w) = wilcoxon_signed_rank(&a, &b) else { continue };
            let p = bonferroni(&[w.p_value], m)?[0];
            p_values[i][j] = Some(p);
            p_values[j][i] = Some(p);
            if p < SIGNIFICANCE_LEVEL {
                if w.w_plus > w.w_minus {
                    better[i][j] = true;
                } else if w.w_minus > w.w_plus {
                    better[j][i] = true;
                }
            }
        }
    }
    let flagged = (0..k).map(|i| (0..k).all(|j| i == j || better[i][j])).collect();
    Ok(SignificanceMatrix {
        methods: methods.iter().map(|m| m.method.clone()).collect(),
        p_values,
        better,
        flagged,
        comparisons: m,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Ndcg,
    Novelty,
    Diversity,
}

impl Metric {
    fn of(&self, r: &UserRecord) -> Option<f64> {
        match self {
            Metric::Ndcg => r.ndcg,
            Metric::Novelty => r.novelty,
            Metric::Diversity => r.diversity,
        }
    }
}

pub const METRIC_PAIRS: [(Metric, Metric); 3] =
    [(Metric::Ndcg, Metric::Novelty), (Metric::Ndcg, Metric::Diversity), (Metric::Diversity, Metric::Novelty)];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodCorrelation {
    pub method: String,
    pub users: usize,
    pub tau: f64,
    pub p_value: f64,
    /// Bonferroni-adjusted over every test in the report.
    pub adjusted_p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricCorrelation {
    pub a: Metric,
    pub b: Metric,
    pub per_method: Vec<MethodCorrelation>,
    /// Mean tau across methods where it is defined.
    pub mean_tau: Option<f64>,
}

/// Kendall tau per method and metric pair over users where both metrics
/// are non-zero, averaged across methods.
pub fn correlate_metrics(methods: &[MethodRecords]) -> Result<Vec<MetricCorrelation>> {
    if methods.is_empty() {
        return Err(BenchError::data("correlation needs per-user records of at least one method"));
    }
    let mut out = Vec::new();
    let mut tests = 0usize;
    for (a, b) in METRIC_PAIRS {
        let mut per_method = Vec::new();
        for m in methods {
            let (x, y): (Vec<f64>, Vec<f64>) = m
                .records
                .iter()
                .filter_map(|r| Some((a.of(r)?, b.of(r)?)))
                .filter(|&(x, y)| x != 0.0 && y != 0.0)
                .unzip();
            if let Ok(k) = kendall_tau(&x, &y) {
                per_method.push(MethodCorrelation {
                    method: m.method.clone(),
                    users: x.len(),
                    tau: k.tau,
                    p_value: k.p_value,
                    adjusted_p: k.p_value,
                });
                tests += 1;
            }
        }
        let mean_tau = if per_method.is_empty() {
            None
        } else {
            Some(per_method.iter().map(|c| c.tau).sum::<f64>() / per_method.len() as f64)
        };
        out.push(MetricCorrelation { a, b, per_method, mean_tau });
    }
    for c in out.iter_mut().flat_map(|c| c.per_method.iter_mut()) {
        c.adjusted_p = bonferroni(&[c.p_value], tests.max(1))?[0];
    }
    Ok(out)
}
