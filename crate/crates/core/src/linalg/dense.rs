use alloc::vec::Vec;

use rand::Rng as _;

use crate::math;
use crate::rng::Rng;

/// Small column-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    pub nrows: usize,
    pub ncols: usize,
    pub data: Vec<f64>,
}

impl Mat {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Mat { nrows, ncols, data: alloc::vec![0.0; nrows * ncols] }
    }

    pub fn from_cols(nrows: usize, cols: &[Vec<f64>]) -> Self {
        let mut data = Vec::with_capacity(nrows * cols.len());
        for c in cols {
            assert_eq!(c.len(), nrows);
            data.extend_from_slice(c);
        }
        Mat { nrows, ncols: cols.len(), data }
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.nrows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.nrows + i] = v;
    }

    /// `self * other`
    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.ncols, other.nrows);
        let mut out = Mat::zeros(self.nrows, other.ncols);
        for j in 0..other.ncols {
            for k in 0..self.ncols {
                let b = other.get(k, j);
                if b != 0.0 {
                    math::axpy(b, self.col(k), out.col_mut(j));
                }
            }
        }
        out
    }

    /// Largest `|<c_i, c_j> - delta_ij|` over all column pairs.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.ncols {
            for j in i..self.ncols {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((math::dot(self.col(i), self.col(j)) - target).abs());
            }
        }
        worst
    }
}

/// Eigen-decomposition of the symmetric tridiagonal matrix with diagonal
/// `diag` and off-diagonal `offdiag` (length `n - 1`) by implicit QL.
///
/// Returns eigenvalues ascending and, for each requested row index `r` of
/// the eigenvector matrix, the row `Z[r, :]` (eigenvector components in the
/// same ascending order). Requesting all rows yields the full basis.
pub fn tridiagonal_eigen(diag: &[f64], offdiag: &[f64], rows: &[usize]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = diag.len();
    assert_eq!(offdiag.len() + 1, n.max(1));
    let mut d = diag.to_vec();
    let mut e = alloc::vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(offdiag);
    // z[k][i]: row rows[k] of the accumulated rotation matrix
    let mut z: Vec<Vec<f64>> = rows
        .iter()
        .map(|&r| {
            let mut v = alloc::vec![0.0; n];
            v[r] = 1.0;
            v
        })
        .collect();

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m == n {
            m = n - 1;
        }
        if m > l {
            let mut guard = 0;
            loop {
                guard += 1;
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = libm::hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = libm::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for zr in z.iter_mut() {
                        let h = zr[i + 1];
                        zr[i + 1] = s * zr[i] + c * h;
                        zr[i] = c * zr[i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 || guard > 200 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&i| d[i]).collect();
    let z = z.into_iter().map(|zr| order.iter().map(|&i| zr[i]).collect()).collect();
    (values, z)
}

/// Thin SVD of a tall matrix `b` (`nrows >= ncols`) by one-sided Jacobi.
///
/// Returns `(U, sigma, W)` with `b = U diag(sigma) W^T`, sigma descending.
/// Columns of `U` for zero singular values are left as zero vectors.
pub fn jacobi_svd(b: &Mat) -> (Mat, Vec<f64>, Mat) {
    let (m, k) = (b.nrows, b.ncols);
    let mut a = b.clone();
    let mut w = Mat::zeros(k, k);
    for i in 0..k {
        w.set(i, i, 1.0);
    }
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let alpha = math::dot(a.col(p), a.col(p));
                let beta = math::dot(a.col(q), a.col(q));
                let gamma = math::dot(a.col(p), a.col(q));
                if gamma == 0.0 || gamma.abs() <= 1e-15 * math::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + libm::hypot(1.0, zeta));
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::hypot(1.0, t);
                let s = c * t;
                rotate_cols(&mut a, p, q, c, s);
                rotate_cols(&mut w, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    let sigma: Vec<f64> = (0..k).map(|j| math::norm(a.col(j))).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&x, &y| sigma[y].total_cmp(&sigma[x]));
    let mut u = Mat::zeros(m, k);
    let mut w_sorted = Mat::zeros(k, k);
    let mut s_sorted = Vec::with_capacity(k);
    for (dst, &src) in order.iter().enumerate() {
        let s = sigma[src];
        s_sorted.push(s);
        if s > 0.0 {
            for (o, v) in u.col_mut(dst).iter_mut().zip(a.col(src)) {
                *o = v / s;
            }
        }
        w_sorted.col_mut(dst).copy_from_slice(w.col(src));
    }
    (u, s_sorted, w_sorted)
}

fn rotate_cols(a: &mut Mat, p: usize, q: usize, c: f64, s: f64) {
    let n = a.nrows;
    for i in 0..n {
        let ap = a.data[p * n + i];
        let aq = a.data[q * n + i];
        a.data[p * n + i] = c * ap - s * aq;
        a.data[q * n + i] = s * ap + c * aq;
    }
}

/// Replaces zero (or numerically dependent) columns of `m` by random unit
/// vectors orthogonal to the other columns. Columns flagged `keep` are left
/// untouched; the rest are re-orthonormalized against them.
pub fn orthonormalize_columns(m: &mut Mat, keep: &[bool], rng: &mut Rng) {
    let n = m.nrows;
    for j in 0..m.ncols {
        if keep[j] {
            continue;
        }
        for _attempt in 0..8 {
            let mut v: Vec<f64> = m.col(j).to_vec();
            if math::norm(&v) < 1e-8 {
                v = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
            }
            for _ in 0..2 {
                for i in 0..m.ncols {
                    if i == j || (!keep[i] && i > j) {
                        continue;
                    }
                    let c = math::dot(m.col(i), &v);
                    math::axpy(-c, m.col(i), &mut v);
                }
            }
            let nv = math::norm(&v);
            if nv > 1e-8 {
                for (o, x) in m.col_mut(j).iter_mut().zip(&v) {
                    *o = x / nv;
                }
                break;
            }
            m.col_mut(j).iter_mut().for_each(|x| *x = 0.0);
        }
    }
}
