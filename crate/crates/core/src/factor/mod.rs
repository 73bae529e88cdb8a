//! Factorization-family node embeddings.
//!
//! Every method returns one row per graph node. Nodes without trust edges
//! get the zero vector, which downstream kNN treats as "no neighbors".

mod gf;
mod grarep;
mod hope;
mod spectral;

use alloc::vec::Vec;

pub use gf::{gf_gradient, gf_objective, graph_factorization, GfConfig, GfReport};
pub use grarep::{grarep, log_transition_matrix, GraRepConfig};
pub use hope::{hope, HopeConfig, ProximityKind, ProximityOperator};
pub use spectral::{
    laplacian_eigenmaps, lle_eigenpairs, locally_linear_embedding, normalized_laplacian_eigenpairs, SpectralConfig,
    SpectralPairs,
};

use crate::graph::TrustGraph;
use crate::linalg::Mat;

/// Default embedding dimension.
pub const DEFAULT_DIM: usize = 128;

pub(crate) fn non_isolated(g: &TrustGraph) -> Vec<bool> {
    (0..g.num_nodes() as u32).map(|u| g.degree(u) > 0).collect()
}

/// Makes the largest-magnitude entry of every column positive.
pub(crate) fn fix_column_signs(m: &mut Mat) {
    for j in 0..m.ncols {
        let pivot = m.col(j).iter().copied().fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        if pivot < 0.0 {
            m.col_mut(j).iter_mut().for_each(|x| *x = -*x);
        }
    }
}
