//! Sparse and dense kernels shared by the factorization embedders.

mod dense;
mod lanczos;
mod sparse;
mod svd;

pub use dense::{jacobi_svd, orthonormalize_columns, tridiagonal_eigen, Mat};
pub use lanczos::{largest_eigenpairs, spectral_radius, EigenPairs, LanczosOptions};
pub use sparse::{CsrMatrix, LinearOperator};
pub use svd::{truncated_svd, SvdOptions, TruncatedSvd};
