//! Per-user accuracy and beyond-accuracy metrics, their aggregation, and the
//! significance tests used to compare methods.

mod items;
mod metrics;
mod stats;

pub use items::{train_item_embeddings, ItemEmbeddingModel};
pub use metrics::{
    aggregate, epc_novelty, epc_novelty_discounted, evaluate_user, ild_diversity, ndcg_at_n, user_coverage, Aggregate,
    EvalRecord,
};
pub use stats::{bonferroni, kendall_tau, wilcoxon_signed_rank, KendallResult, WilcoxonResult, WILCOXON_EXACT_MAX};
