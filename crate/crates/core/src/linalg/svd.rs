//! Truncated SVD of an implicit matrix: Lanczos on the Gram operator of the
//! smaller side, followed by a Rayleigh-Ritz step (one-sided Jacobi on the
//! projected matrix) that restores orthonormality of both factors.

use alloc::vec::Vec;

use super::dense::{jacobi_svd, orthonormalize_columns, Mat};
use super::lanczos::{largest_eigenpairs, LanczosOptions};
use super::sparse::LinearOperator;
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy)]
pub struct SvdOptions {
    pub lanczos: LanczosOptions,
}

impl Default for SvdOptions {
    fn default() -> Self {
        SvdOptions { lanczos: LanczosOptions { max_iter: None, tol: 1e-10, seed: 0x5eed } }
    }
}

/// `A ~ U diag(s) V^T` with `s` non-increasing and non-negative.
#[derive(Debug, Clone)]
pub struct TruncatedSvd {
    pub u: Mat,
    pub s: Vec<f64>,
    pub v: Mat,
}

/// Rank-`rank` truncated SVD of `op`.
///
/// Sign convention: the largest-magnitude entry of every left singular
/// vector is positive.
pub fn truncated_svd(op: &dyn LinearOperator, rank: usize, opts: SvdOptions) -> Result<TruncatedSvd> {
    let (m, n) = (op.nrows(), op.ncols());
    if rank == 0 || rank > m.min(n) {
        return Err(Error::param("rank", alloc::format!("need 1 <= rank <= {} (got {rank})", m.min(n))));
    }
    let transposed = n > m;
    // work on the side of dimension `small`
    let small = if transposed { m } else { n };
    let gram = |x: &[f64], y: &mut [f64]| {
        if transposed {
            let mut t = alloc::vec![0.0; n];
            op.apply_transpose(x, &mut t);
            op.apply(&t, y);
        } else {
            let mut t = alloc::vec![0.0; m];
            op.apply(x, &mut t);
            op.apply_transpose(&t, y);
        }
    };
    let eig = largest_eigenpairs(small, rank, gram, opts.lanczos)?;
    let basis = eig.vectors;

    // project: B = A V_k (or A^T U_k), tall with `rank` columns
    let big = if transposed { n } else { m };
    let mut b = Mat::zeros(big, rank);
    for j in 0..rank {
        if transposed {
            op.apply_transpose(basis.col(j), b.col_mut(j));
        } else {
            op.apply(basis.col(j), b.col_mut(j));
        }
    }
    let (mut left, s, w) = jacobi_svd(&b);
    let right = basis.matmul(&w);

    let smax = s.first().copied().unwrap_or(0.0);
    let keep: Vec<bool> = s.iter().map(|&x| x > 1e-13 * smax.max(f64::MIN_POSITIVE)).collect();
    let mut rng = rng::seeded(opts.lanczos.seed ^ 0x9e37_79b9);
    orthonormalize_columns(&mut left, &keep, &mut rng);
    let s: Vec<f64> = s.iter().zip(&keep).map(|(&x, &k)| if k { x } else { 0.0 }).collect();

    // B = left S W^T: for A V_k this gives A ~ left S (V_k W)^T, for A^T U_k
    // the sides swap
    let (mut u, mut v) = if transposed { (right, left) } else { (left, right) };
    for j in 0..rank {
        let col = u.col(j);
        let pivot = col.iter().copied().fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        if pivot < 0.0 {
            u.col_mut(j).iter_mut().for_each(|x| *x = -*x);
            v.col_mut(j).iter_mut().for_each(|x| *x = -*x);
        }
    }
    Ok(TruncatedSvd { u, s, v })
}
