//! Loss, optimiser, training loop and checkpoint persistence.

mod adam;
pub mod checkpoint;
pub mod loss;
mod trainer;

pub use adam::adam_step;
pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint, CheckpointError};
pub use loss::{class_cross_entropy, cross_entropy, cross_entropy_backward, fused_logit_grad, one_hot};
pub use trainer::{evaluate, train, EpochLog, Evaluation, Example, TrainOutcome};

use thiserror::Error;

use crate::metrics::EvalError;
use crate::nn::ModelError;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("label error: {0}")]
    Label(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Adam settings. Defaults: lr 0.01, β1 0.9, β2 0.99, ε 1e-7.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            lr: 0.01,
            beta1: 0.9,
            beta2: 0.99,
            epsilon: 1e-7,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        let ok = self.lr >= 0.0
            && self.lr.is_finite()
            && self.beta1 > 0.0
            && self.beta1 < 1.0
            && self.beta2 > 0.0
            && self.beta2 < 1.0
            && self.epsilon > 0.0;
        if ok {
            Ok(())
        } else {
            Err(TrainError::Config(format!("invalid optimizer settings {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub shuffle: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 30,
            batch_size: 32,
            seed: 42,
            shuffle: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(TrainError::Config("epochs and batch_size must be >= 1".into()));
        }
        Ok(())
    }
}
