use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Method name, hyperparameters and seed that produced an embedding.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmbeddingMeta {
    pub method: String,
    pub params: Vec<(String, String)>,
    pub seed: Option<u64>,
}

impl EmbeddingMeta {
    pub fn new(method: &str) -> Self {
        EmbeddingMeta { method: method.into(), ..Default::default() }
    }

    pub fn param(mut self, key: &str, value: impl core::fmt::Display) -> Self {
        self.params.push((key.into(), alloc::format!("{value}")));
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// Dense row-per-node embedding. Every entry is finite; isolated nodes carry
/// the zero vector.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    rows: usize,
    dim: usize,
    values: Vec<f64>,
    pub meta: EmbeddingMeta,
}

impl EmbeddingMatrix {
    pub fn new(rows: usize, dim: usize, values: Vec<f64>, meta: EmbeddingMeta) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("dim", "embedding dimension must be at least 1"));
        }
        if values.len() != rows * dim {
            return Err(Error::DimensionMismatch { expected: rows * dim, found: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("embedding"));
        }
        Ok(EmbeddingMatrix { rows, dim, values, meta })
    }

    pub fn zeros(rows: usize, dim: usize, meta: EmbeddingMeta) -> Self {
        EmbeddingMatrix { rows, dim: dim.max(1), values: alloc::vec![0.0; rows * dim.max(1)], meta }
    }

    pub fn num_nodes(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn row(&self, u: usize) -> &[f64] {
        &self.values[u * self.dim..(u + 1) * self.dim]
    }

    #[inline]
    pub fn row_mut(&mut self, u: usize) -> &mut [f64] {
        &mut self.values[u * self.dim..(u + 1) * self.dim]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn norms(&self) -> Vec<f64> {
        (0..self.rows).map(|u| math::norm(self.row(u))).collect()
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Cosine similarity of two rows; zero if either row is the zero vector.
    pub fn cosine(&self, a: usize, b: usize) -> f64 {
        cosine(self.row(a), self.row(b))
    }
}

pub(crate) fn cosine(a: &[f64], b: &[f64]) -> f64 {
    cosine_with(a, b, math::dot(a, a), math::dot(b, b))
}

/// Cosine given squared norms; identical vectors give exactly 1.
#[inline]
pub(crate) fn cosine_with(a: &[f64], b: &[f64], sq_a: f64, sq_b: f64) -> f64 {
    if sq_a == 0.0 || sq_b == 0.0 {
        0.0
    } else {
        (math::dot(a, b) / math::sqrt(sq_a * sq_b)).clamp(-1.0, 1.0)
    }
}
