//! Lanczos iteration with full reorthogonalization for the largest
//! eigenpairs of a symmetric operator.

use alloc::vec::Vec;

use rand::Rng as _;

use super::dense::{tridiagonal_eigen, Mat};
use crate::error::{Error, Result};
use crate::math;
use crate::rng;

#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    /// Krylov dimension cap; `None` means `50 * k`.
    pub max_iter: Option<usize>,
    /// Ritz residual tolerance, relative to the operator norm estimate.
    pub tol: f64,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions { max_iter: None, tol: 1e-8, seed: 0x5eed }
    }
}

/// Eigenvalues in descending order with unit eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: Mat,
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

/// The `k` algebraically largest eigenpairs of the symmetric operator
/// `apply` acting on `R^n`.
///
/// Restarts from a fresh random direction when the Krylov space becomes
/// invariant, so repeated eigenvalues (e.g. one per connected component)
/// are recovered.
pub fn largest_eigenpairs<F>(n: usize, k: usize, apply: F, opts: LanczosOptions) -> Result<EigenPairs>
where
    F: Fn(&[f64], &mut [f64]),
{
    if k == 0 || k > n {
        return Err(Error::param("k", alloc::format!("need 1 <= k <= n (k = {k}, n = {n})")));
    }
    let cap = opts.max_iter.unwrap_or(50 * k).max(k).min(n);
    let mut rng = rng::seeded(opts.seed);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(cap);
    let mut alphas: Vec<f64> = Vec::with_capacity(cap);
    let mut betas: Vec<f64> = Vec::with_capacity(cap);
    let mut anorm = 0.0f64;
    let check_every = 10usize.max(k / 4);

    let mut q = random_unit(n, &[], &mut rng).ok_or(Error::param("n", "empty space"))?;
    let mut w = alloc::vec![0.0; n];
    let mut prev_beta = 0.0;
    // Ritz values accepted at the last checkpoint; convergence is only
    // reported after a restart from a fresh orthogonal direction leaves them
    // unchanged, which catches eigenvalues of multiplicity > 1.
    let mut pending: Option<Vec<f64>> = None;
    let mut force_restart = false;
    loop {
        apply(&q, &mut w);
        let alpha = math::dot(&q, &w);
        math::axpy(-alpha, &q, &mut w);
        if let Some(prev) = basis.last() {
            math::axpy(-prev_beta, prev, &mut w);
        }
        basis.push(core::mem::take(&mut q));
        alphas.push(alpha);
        reorthogonalize(&mut w, &basis);
        let beta = math::norm(&w);
        anorm = anorm.max(alpha.abs() + beta + prev_beta);
        let m = basis.len();
        let breakdown = beta <= 1e-12 * anorm.max(f64::MIN_POSITIVE);

        if m >= k && (m == cap || m % check_every == 0) {
            let (theta, last_row) = tridiagonal_eigen(&alphas, &betas, &[m - 1]);
            let residuals: Vec<f64> = (0..k).map(|i| (beta * last_row[0][m - 1 - i]).abs()).collect();
            let scale = anorm.max(f64::MIN_POSITIVE);
            let converged = residuals.iter().all(|&r| r <= opts.tol * scale);
            if m == n {
                return Ok(finalize(n, k, &basis, &alphas, &betas, residuals, m));
            }
            if converged {
                let top: Vec<f64> = (0..k).map(|i| theta[m - 1 - i]).collect();
                let stable = pending
                    .as_ref()
                    .is_some_and(|p| p.iter().zip(&top).all(|(a, b)| (a - b).abs() <= 10.0 * opts.tol * scale));
                if stable || m == cap {
                    return Ok(finalize(n, k, &basis, &alphas, &betas, residuals, m));
                }
                pending = Some(top);
                force_restart = true;
            } else {
                pending = None;
            }
            if m == cap {
                return Err(Error::NoConvergence { iterations: m, residuals });
            }
        }
        if breakdown || force_restart {
            force_restart = false;
            match random_unit(n, &basis, &mut rng) {
                Some(fresh) => {
                    q = fresh;
                    betas.push(0.0);
                    prev_beta = 0.0;
                }
                None => {
                    let (_, last_row) = tridiagonal_eigen(&alphas, &betas, &[m - 1]);
                    let residuals = (0..k).map(|i| (beta * last_row[0][m - 1 - i]).abs()).collect();
                    return Ok(finalize(n, k, &basis, &alphas, &betas, residuals, m));
                }
            }
        } else {
            q = w.iter().map(|x| x / beta).collect();
            betas.push(beta);
            prev_beta = beta;
        }
    }
}

fn finalize(n: usize, k: usize, basis: &[Vec<f64>], alphas: &[f64], betas: &[f64], residuals: Vec<f64>, m: usize) -> EigenPairs {
    let rows: Vec<usize> = (0..m).collect();
    let (theta, z) = tridiagonal_eigen(alphas, &betas[..m - 1], &rows);
    let mut vectors = Mat::zeros(n, k);
    let mut values = Vec::with_capacity(k);
    for i in 0..k {
        let col = m - 1 - i;
        values.push(theta[col]);
        let out = vectors.col_mut(i);
        for (j, q) in basis.iter().enumerate() {
            math::axpy(z[j][col], q, out);
        }
        let nv = math::norm(out);
        if nv > 0.0 {
            out.iter_mut().for_each(|x| *x /= nv);
        }
    }
    EigenPairs { values, vectors, residuals, iterations: m }
}

fn reorthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = math::dot(b, w);
            math::axpy(-c, b, w);
        }
    }
}

fn random_unit(n: usize, basis: &[Vec<f64>], rng: &mut rng::Rng) -> Option<Vec<f64>> {
    if basis.len() >= n {
        return None;
    }
    for _ in 0..8 {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        reorthogonalize(&mut v, basis);
        let nv = math::norm(&v);
        if nv > 1e-10 {
            v.iter_mut().for_each(|x| *x /= nv);
            return Some(v);
        }
    }
    None
}

/// Power-iteration estimate of the spectral radius of a symmetric
/// non-negative matrix. Iterates on `A + I` so that the `-rho` eigenvalue of
/// bipartite graphs cannot cause oscillation.
pub fn spectral_radius<F>(n: usize, apply: F, seed: u64) -> f64
where
    F: Fn(&[f64], &mut [f64]),
{
    if n == 0 {
        return 0.0;
    }
    let mut rng = rng::seeded(seed);
    let mut x: Vec<f64> = (0..n).map(|_| 0.5 + rng.random::<f64>()).collect();
    let nx = math::norm(&x);
    x.iter_mut().for_each(|v| *v /= nx);
    let mut y = alloc::vec![0.0; n];
    let mut estimate = 0.0;
    for _ in 0..10_000 {
        apply(&x, &mut y);
        for (yi, xi) in y.iter_mut().zip(&x) {
            *yi += xi;
        }
        let rq = math::dot(&x, &y) - 1.0;
        let ny = math::norm(&y);
        if ny == 0.0 {
            return 0.0;
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / ny;
        }
        if (rq - estimate).abs() <= 1e-13 * rq.abs().max(1.0) {
            return rq;
        }
        estimate = rq;
    }
    estimate
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{CsrMatrix, LinearOperator};

    #[test]
    fn repeated_eigenvalues_are_recovered() {
        // two disjoint edges: adjacency eigenvalues {1, 1, -1, -1}
        let a = CsrMatrix::from_dense(4, 4, &[0., 1., 0., 0., 1., 0., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0.]);
        let e = largest_eigenpairs(4, 2, |x, y| a.apply(x, y), LanczosOptions::default()).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-10 && (e.values[1] - 1.0).abs() < 1e-10);
        assert!(e.vectors.orthonormality_error() < 1e-10);
    }

    #[test]
    fn radius_of_bipartite_path() {
        // path 0-1-2 has spectrum {-sqrt2, 0, sqrt2}
        let a = CsrMatrix::from_dense(3, 3, &[0., 1., 0., 1., 0., 1., 0., 1., 0.]);
        let rho = spectral_radius(3, |x, y| a.apply(x, y), 1);
        assert!((rho - core::f64::consts::SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn k_out_of_range() {
        assert!(largest_eigenpairs(3, 4, |_: &[f64], _: &mut [f64]| {}, LanczosOptions::default()).is_err());
    }
}
