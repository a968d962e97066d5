use rand::Rng;

use super::{init, ModelError};
use crate::corpus::{LangTag, PAD_ID};
use crate::tensor::{Parameter, Tensor};

/// Width of the optional language-tag one-hot (HIN, ENG, O, EMT).
pub const LANG_FEATURES: usize = 4;

/// Token embedding table. Row 0 (PAD) stays zero and never receives gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingLayer {
    pub table: Parameter,
    pub lang_features: bool,
}

impl EmbeddingLayer {
    pub fn new<R: Rng>(rng: &mut R, vocab_size: usize, dim: usize, lang_features: bool) -> Self {
        let mut value = init::uniform(rng, &[vocab_size, dim], 0.05);
        value.row_mut(PAD_ID).fill(0.0);
        Self {
            table: Parameter::new(value),
            lang_features,
        }
    }

    pub fn vocab_size(&self) -> usize {
        self.table.shape()[0]
    }

    pub fn dim(&self) -> usize {
        self.table.shape()[1]
    }

    pub fn output_width(&self) -> usize {
        self.dim() + if self.lang_features { LANG_FEATURES } else { 0 }
    }

    /// Looks up each id. With language features on, the tag one-hot is
    /// appended; positions without a tag (padding) get zeros.
    pub fn forward(&self, ids: &[usize], tags: &[LangTag]) -> Result<Tensor, ModelError> {
        let (size, dim, width) = (self.vocab_size(), self.dim(), self.output_width());
        if ids.is_empty() {
            return Err(ModelError::Config("empty input sequence".into()));
        }
        let mut out = Tensor::zeros(&[ids.len(), width]);
        for (pos, &id) in ids.iter().enumerate() {
            if id >= size {
                return Err(ModelError::Vocab { id, size });
            }
            let row = out.row_mut(pos);
            row[..dim].copy_from_slice(self.table.value.row(id));
            if self.lang_features {
                if let Some(tag) = tags.get(pos) {
                    row[dim + tag.index()] = 1.0;
                }
            }
        }
        Ok(out)
    }

    /// Scatters `d_out` rows into the table gradient, skipping PAD.
    pub fn backward(&mut self, ids: &[usize], d_out: &Tensor) {
        let dim = self.dim();
        for (pos, &id) in ids.iter().enumerate() {
            if id == PAD_ID {
                continue;
            }
            let src = &d_out.row(pos)[..dim];
            for (g, s) in self.table.grad.row_mut(id).iter_mut().zip(src) {
                *g += s;
            }
        }
    }
}
