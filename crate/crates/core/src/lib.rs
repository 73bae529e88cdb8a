//! Algorithmic core for trust-based cold-start recommendation.
//!
//! The crate is `no_std` + `alloc`. It covers trust graphs and ratings,
//! factorization- and random-walk-based node embeddings, kNN recommendation
//! over a trust network (including the trust baselines), and the accuracy
//! and beyond-accuracy metrics with their significance tests.
//!
//! Enabling the default `std` feature adds parallel code paths (rayon) for
//! walk generation, SGNS training and neighbor search.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod embedding;
pub mod error;
pub mod eval;
pub mod factor;
pub mod graph;
pub mod ids;
pub mod linalg;
mod math;
pub mod ratings;
pub mod recsys;
pub mod rng;
pub mod split;
pub mod walk;

pub use embedding::{EmbeddingMatrix, EmbeddingMeta};
pub use error::{Error, Result};
pub use graph::TrustGraph;
pub use ids::IdMap;
pub use ratings::RatingsMatrix;
pub use split::{split_users, SplitSpec};
