use rand::Rng;

use super::{init, ModelError, Pooling};
use crate::tensor::{ops, Parameter, Tensor};

/// `MaxPool(ReLU(Conv1d(X)))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvBlock {
    pub filters: Parameter,
    pub bias: Parameter,
    pub stride: usize,
    pub pooling: Pooling,
}

#[derive(Debug, Clone)]
pub struct ConvCache {
    input: Tensor,
    pre: Tensor,
    act: Tensor,
}

impl ConvBlock {
    pub fn new<R: Rng>(
        rng: &mut R,
        in_width: usize,
        filters: usize,
        kernel: usize,
        stride: usize,
        pooling: Pooling,
    ) -> Self {
        let shape = [filters, kernel, in_width];
        Self {
            filters: Parameter::new(init::glorot_uniform(rng, &shape, kernel * in_width, kernel * filters)),
            bias: Parameter::zeros(&[filters]),
            stride,
            pooling,
        }
    }

    pub fn channels(&self) -> usize {
        self.filters.shape()[0]
    }

    pub fn kernel(&self) -> usize {
        self.filters.shape()[1]
    }

    fn pool_window(&self, len: usize) -> (usize, usize) {
        match self.pooling {
            Pooling::Window { size, stride } => (size, stride),
            Pooling::Global => (len, 1),
        }
    }

    pub fn forward(&self, input: &Tensor) -> Result<(Tensor, ConvCache), ModelError> {
        let pre = ops::conv1d(input, &self.filters.value, &self.bias.value, self.stride)?;
        let act = ops::relu(&pre);
        let (size, stride) = self.pool_window(act.rows());
        let out = ops::maxpool1d(&act, size, stride)?;
        Ok((
            out,
            ConvCache {
                input: input.clone(),
                pre,
                act,
            },
        ))
    }

    /// Accumulates filter and bias gradients; returns the input gradient.
    pub fn backward(&mut self, cache: &ConvCache, d_out: &Tensor) -> Result<Tensor, ModelError> {
        let (size, stride) = self.pool_window(cache.act.rows());
        let d_act = ops::maxpool1d_backward(&cache.act, size, stride, d_out)?;
        let d_pre = ops::relu_backward(&cache.pre, &d_act)?;
        let grads = ops::conv1d_backward(&cache.input, &self.filters.value, self.stride, &d_pre)?;
        self.filters.accumulate(&grads.filters)?;
        self.bias.accumulate(&grads.bias)?;
        Ok(grads.input)
    }
}
