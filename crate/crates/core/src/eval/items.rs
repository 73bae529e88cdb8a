use alloc::vec::Vec;

use crate::embedding::{EmbeddingMatrix, EmbeddingMeta};
use crate::error::{Error, Result};
use crate::ratings::RatingsMatrix;
use crate::walk::{train, PairSource, SgnsConfig};

/// Item vectors for diversity; rows of unrated items are zero.
#[derive(Debug, Clone)]
pub struct ItemEmbeddingModel {
    pub embedding: EmbeddingMatrix,
    pub epoch_loss: Vec<f64>,
}

/// Every item is a document whose tokens are its raters.
struct Documents {
    offsets: Vec<usize>,
    users: Vec<u32>,
}

impl PairSource for Documents {
    fn num_units(&self) -> usize {
        self.offsets.len() - 1
    }

    fn pairs(&self, unit: usize, out: &mut Vec<(u32, u32)>) {
        out.extend(self.users[self.offsets[unit]..self.offsets[unit + 1]].iter().map(|&u| (unit as u32, u)));
    }
}

/// Paragraph-vector (DBOW) training: each item vector predicts the ids of
/// its raters against negative-sampled users.
pub fn train_item_embeddings(r: &RatingsMatrix, cfg: &SgnsConfig) -> Result<ItemEmbeddingModel> {
    if r.num_entries() == 0 {
        return Err(Error::EmptyVocabulary);
    }
    let (ni, nu) = (r.num_items(), r.num_users());
    let mut offsets = alloc::vec![0usize; ni + 1];
    for (_, i, _) in r.entries() {
        offsets[i as usize + 1] += 1;
    }
    for i in 0..ni {
        offsets[i + 1] += offsets[i];
    }
    let mut fill = offsets.clone();
    let mut users = alloc::vec![0u32; r.num_entries()];
    for (u, i, _) in r.entries() {
        users[fill[i as usize]] = u;
        fill[i as usize] += 1;
    }
    let counts: Vec<f64> = (0..nu as u32).map(|u| r.row_len(u) as f64).collect();
    let docs = Documents { offsets, users };
    let model = train(&docs, ni, nu, &counts, cfg)?;
    let d = cfg.dim;
    let mut values = model.input;
    for (i, &pop) in r.item_pop().iter().enumerate() {
        if pop == 0 {
            values[i * d..(i + 1) * d].iter_mut().for_each(|x| *x = 0.0);
        }
    }
    let embedding = EmbeddingMatrix::new(ni, d, values, cfg.describe(EmbeddingMeta::new("pv-dbow")))?;
    Ok(ItemEmbeddingModel { embedding, epoch_loss: model.epoch_loss })
}
