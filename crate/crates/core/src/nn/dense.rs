use rand::Rng;

use super::{init, ModelError, NUM_CLASSES};
use crate::tensor::{ops, Parameter, Tensor, TensorError};

/// Fully connected layer producing class logits; softmax is applied by the caller.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseHead {
    /// `[w×3]`
    pub weight: Parameter,
    /// `[3]`
    pub bias: Parameter,
}

impl DenseHead {
    pub fn new<R: Rng>(rng: &mut R, width: usize) -> Self {
        Self {
            weight: Parameter::new(init::glorot_uniform(rng, &[width, NUM_CLASSES], width, NUM_CLASSES)),
            bias: Parameter::zeros(&[NUM_CLASSES]),
        }
    }

    pub fn width(&self) -> usize {
        self.weight.shape()[0]
    }

    fn as_row(&self, g: &Tensor) -> Result<Tensor, ModelError> {
        if g.len() != self.width() {
            return Err(TensorError::Dimension {
                op: "dense_head",
                left: g.shape().to_vec(),
                right: self.weight.shape().to_vec(),
            }
            .into());
        }
        Ok(Tensor::new(vec![1, g.len()], g.data().to_vec())?)
    }

    /// `G·W + b`.
    pub fn logits(&self, g: &Tensor) -> Result<Tensor, ModelError> {
        let z = ops::matmul(&self.as_row(g)?, &self.weight.value)?;
        Ok(ops::add(&z.flatten(), &self.bias.value)?)
    }

    /// `softmax(G·W + b)`.
    pub fn forward(&self, g: &Tensor) -> Result<Tensor, ModelError> {
        Ok(ops::softmax(&self.logits(g)?))
    }

    /// Accumulates `dW`, `db` from the logit gradient; returns `dG` shaped like `g`.
    pub fn backward(&mut self, g: &Tensor, d_logits: &Tensor) -> Result<Tensor, ModelError> {
        let row = self.as_row(g)?;
        let d = Tensor::new(vec![1, NUM_CLASSES], d_logits.data().to_vec())?;
        let (dg, dw) = ops::matmul_backward(&row, &self.weight.value, &d)?;
        self.weight.accumulate(&dw)?;
        self.bias.accumulate(&d_logits.clone().flatten())?;
        Ok(dg.reshape(g.shape().to_vec())?)
    }
}
