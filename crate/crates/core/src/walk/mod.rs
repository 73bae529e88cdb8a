//! Random-walk embeddings (DeepWalk, node2vec, role2vec) and LINE.

mod alias;
mod line;
mod roles;
mod sgns;
mod walks;

pub use alias::AliasTable;
pub use line::{line, LineConfig, LineOrder};
pub use roles::{assign_roles, kmeans, role_features, RoleConfig, RoleFeatures};
pub use sgns::{fit_sgns, pair_gradient, pair_objective, train_sgns, SgnsConfig, SgnsModel};
pub(crate) use sgns::{train, PairSource};
pub use walks::{generate_walks, transition_probabilities, WalkBias, WalkConfig, WalkCorpus};

use crate::embedding::{EmbeddingMatrix, EmbeddingMeta};
use crate::error::{Error, Result};
use crate::graph::TrustGraph;

fn walk_meta(name: &str, walk: &WalkConfig, sgns: &SgnsConfig) -> EmbeddingMeta {
    let mut meta = EmbeddingMeta::new(name).param("num_walks", walk.num_walks).param("walk_length", walk.walk_length);
    if let WalkBias::SecondOrder { p, q } = walk.bias {
        meta = meta.param("p", p).param("q", q);
    }
    let mut meta = sgns.describe(meta);
    meta.seed = Some(walk.seed);
    meta
}

fn check_undirected(g: &TrustGraph) -> Result<()> {
    if g.is_directed() {
        return Err(Error::DirectedGraph);
    }
    Ok(())
}

/// Uniform walks followed by SGNS.
pub fn deepwalk(g: &TrustGraph, walk: &WalkConfig, sgns: &SgnsConfig) -> Result<EmbeddingMatrix> {
    check_undirected(g)?;
    let walk = WalkConfig { bias: WalkBias::Uniform, ..*walk };
    let corpus = generate_walks(g, &walk)?;
    let mut e = train_sgns(&corpus, None, sgns)?;
    e.meta = walk_meta("deepwalk", &walk, sgns);
    Ok(e)
}

/// Second-order biased walks followed by SGNS.
pub fn node2vec(g: &TrustGraph, walk: &WalkConfig, sgns: &SgnsConfig) -> Result<EmbeddingMatrix> {
    check_undirected(g)?;
    let walk = match walk.bias {
        WalkBias::Uniform => WalkConfig { bias: WalkBias::SecondOrder { p: 1.0, q: 1.0 }, ..*walk },
        WalkBias::SecondOrder { .. } => *walk,
    };
    let corpus = generate_walks(g, &walk)?;
    let mut e = train_sgns(&corpus, None, sgns)?;
    e.meta = walk_meta("node2vec", &walk, sgns);
    Ok(e)
}

/// Walks whose tokens are replaced by structural roles; every node receives
/// its role's vector.
pub fn role2vec(g: &TrustGraph, walk: &WalkConfig, roles: &RoleConfig, sgns: &SgnsConfig) -> Result<EmbeddingMatrix> {
    check_undirected(g)?;
    let role_of = assign_roles(g, roles, walk.seed)?;
    let corpus = generate_walks(g, walk)?;
    let mut e = train_sgns(&corpus, Some(&role_of), sgns)?;
    let mut meta = walk_meta("role2vec", walk, sgns).param("num_clusters", roles.num_clusters).param("log_binning", roles.log_binning);
    meta = match roles.features {
        RoleFeatures::WlDegree { iterations } => meta.param("features", "wl_degree").param("iterations", iterations),
        RoleFeatures::Motif3 => meta.param("features", "motif3"),
    };
    e.meta = meta;
    Ok(e)
}
