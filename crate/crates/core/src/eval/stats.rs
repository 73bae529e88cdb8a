//! Wilcoxon signed-rank test, Bonferroni correction and Kendall's tau-b.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Largest number of non-zero differences handled by the exact null
/// distribution.
pub const WILCOXON_EXACT_MAX: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilcoxonResult {
    /// `min(W+, W-)`
    pub statistic: f64,
    pub w_plus: f64,
    pub w_minus: f64,
    /// Pairs left after dropping zero differences.
    pub n: usize,
    pub p_value: f64,
    pub exact: bool,
}

/// Average ranks (1-based) of `values`, ties sharing their mean rank.
pub(crate) fn midranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = alloc::vec![0.0; values.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &o in &order[i..=j] {
            ranks[o] = r;
        }
        if j > i {
            ties.push(j - i + 1);
        }
        i = j + 1;
    }
    (ranks, ties)
}

/// Two-sided paired test. Exact null distribution (ties via midranks) up
/// to [`WILCOXON_EXACT_MAX`] effective pairs, tie-corrected normal
/// approximation above.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<WilcoxonResult> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|&d| d != 0.0).collect();
    let n = d.len();
    if n < 5 {
        return Err(Error::InsufficientData(alloc::format!("{n} non-zero paired differences, need at least 5")));
    }
    let abs: Vec<f64> = d.iter().map(|x| x.abs()).collect();
    let (ranks, ties) = midranks(&abs);
    let w_plus: f64 = d.iter().zip(&ranks).filter(|(x, _)| **x > 0.0).map(|(_, r)| r).sum();
    let total = (n * (n + 1)) as f64 / 2.0;
    let w_minus = total - w_plus;

    let (p_value, exact) = if n <= WILCOXON_EXACT_MAX {
        // ranks doubled are integers; count sign patterns by subset sum
        let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r) as usize).collect();
        let max: usize = doubled.iter().sum();
        let mut ways = alloc::vec![0.0f64; max + 1];
        ways[0] = 1.0;
        for &r in &doubled {
            for s in (r..=max).rev() {
                ways[s] += ways[s - r];
            }
        }
        let all = math::powf(2.0, n as f64);
        let t = (2.0 * w_plus) as usize;
        let lower: f64 = ways[..=t].iter().sum::<f64>() / all;
        let upper: f64 = ways[t..].iter().sum::<f64>() / all;
        ((2.0 * lower.min(upper)).min(1.0), true)
    } else {
        let nf = n as f64;
        let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / 48.0;
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term;
        let p = if var > 0.0 { math::normal_two_sided((w_plus - total / 2.0) / math::sqrt(var)) } else { 1.0 };
        (p, false)
    };
    Ok(WilcoxonResult { statistic: w_plus.min(w_minus), w_plus, w_minus, n, p_value, exact })
}

/// `min(1, p * m)` for each p-value.
pub fn bonferroni(p_values: &[f64], m: usize) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(Error::param("m", "number of comparisons must be at least 1"));
    }
    Ok(p_values.iter().map(|p| (p * m as f64).min(1.0)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KendallResult {
    pub tau: f64,
    /// Concordant minus discordant pairs.
    pub s: i64,
    pub p_value: f64,
}

/// Tie sums `sum t(t-1)`, `sum t(t-1)(t-2)`, `sum t(t-1)(2t+5)` over runs of
/// equal values in sorted `v`, plus the tied pair count `sum t(t-1)/2`.
fn tie_sums(sorted: &[f64]) -> (f64, f64, f64, u64) {
    let (mut a, mut b, mut c, mut pairs) = (0.0, 0.0, 0.0, 0u64);
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        a += t * (t - 1.0);
        b += t * (t - 1.0) * (t - 2.0);
        c += t * (t - 1.0) * (2.0 * t + 5.0);
        pairs += ((j - i) * (j - i - 1) / 2) as u64;
        i = j;
    }
    (a, b, c, pairs)
}

/// Merge sort counting pairs `i < j` with `v[i] > v[j]`.
fn count_inversions(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut inv = count_inversions(&mut v[..mid], &mut buf[..mid]) + count_inversions(&mut v[mid..], &mut buf[mid..]);
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[j] < v[i] {
            buf[k] = v[j];
            inv += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    inv
}

/// Kendall's tau-b in `O(n log n)` with a normal-approximation p-value
/// (variance corrected for ties).
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<KendallResult> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::InsufficientData("Kendall tau needs at least two observations".into()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("kendall input"));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(y[a].total_cmp(&y[b])));
    let xs: Vec<f64> = order.iter().map(|&i| x[i]).collect();
    let mut ys: Vec<f64> = order.iter().map(|&i| y[i]).collect();

    // pairs tied in both x and y
    let mut joint = 0u64;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && xs[j] == xs[i] && ys[j] == ys[i] {
            j += 1;
        }
        joint += ((j - i) * (j - i - 1) / 2) as u64;
        i = j;
    }
    let (xa, xb, xc, x_pairs) = tie_sums(&xs);
    let mut buf = alloc::vec![0.0; n];
    let swaps = count_inversions(&mut ys, &mut buf);
    let (ya, yb, yc, y_pairs) = tie_sums(&ys);

    let n0 = (n * (n - 1) / 2) as u64;
    if x_pairs == n0 || y_pairs == n0 {
        return Err(Error::Undefined("Kendall tau of a constant sequence"));
    }
    let s = n0 as i64 - x_pairs as i64 - y_pairs as i64 + joint as i64 - 2 * swaps as i64;
    let tau = s as f64 / math::sqrt((n0 - x_pairs) as f64 * (n0 - y_pairs) as f64);

    let nf = n as f64;
    let m = nf * (nf - 1.0);
    let mut var = (m * (2.0 * nf + 5.0) - xc - yc) / 18.0 + xa * ya / (2.0 * m);
    if n > 2 {
        var += xb * yb / (9.0 * m * (nf - 2.0));
    }
    let p_value = if var > 0.0 { math::normal_two_sided(s as f64 / math::sqrt(var)) } else { 1.0 };
    Ok(KendallResult { tau: tau.clamp(-1.0, 1.0), s, p_value })
}
