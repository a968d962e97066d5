//! The classifier layer stack: embedding lookup, convolution block,
//! pairwise additive self-attention and the dense softmax head.

mod attention;
mod conv;
mod dense;
mod embedding;
pub mod init;
mod model;

pub use attention::{AttentionCache, SelfAttention};
pub use conv::{ConvBlock, ConvCache};
pub use dense::DenseHead;
pub use embedding::{EmbeddingLayer, LANG_FEATURES};
pub use model::{ForwardCache, Hcms};

use thiserror::Error;

use crate::tensor::{ops::window_count, TensorError};

/// Number of output classes (positive, negative, neutral).
pub const NUM_CLASSES: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("token id {id} out of range for vocabulary of size {size}")]
    Vocab { id: usize, size: usize },
    #[error("invalid model configuration: {0}")]
    Config(String),
}

/// How convolution features are pooled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pooling {
    /// Sliding max over `size` rows, advancing by `stride`.
    Window { size: usize, stride: usize },
    /// One max per channel over the whole sequence.
    Global,
}

/// Nonlinearity applied to the additive alignment score before the softmax.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreActivation {
    Sigmoid,
    /// Raw scores go straight into the softmax.
    Identity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub vocab_size: usize,
    pub embed_dim: usize,
    /// Append a 4-wide language-tag one-hot to each embedding row.
    pub lang_features: bool,
    pub filters: usize,
    pub kernel: usize,
    pub stride: usize,
    pub pooling: Pooling,
    pub attention_enabled: bool,
    pub attention_hidden: usize,
    pub include_self: bool,
    pub score_activation: ScoreActivation,
    /// Every input is right-padded with PAD (or truncated) to this length.
    pub max_len: usize,
}

impl ModelConfig {
    /// Reference hyperparameters: 200-wide embeddings, 200 filters of
    /// width 8 at stride 1.
    pub fn new(vocab_size: usize) -> Self {
        Self {
            vocab_size,
            embed_dim: 200,
            lang_features: false,
            filters: 200,
            kernel: 8,
            stride: 1,
            pooling: Pooling::Window { size: 2, stride: 2 },
            attention_enabled: true,
            attention_hidden: 64,
            include_self: false,
            score_activation: ScoreActivation::Sigmoid,
            max_len: 48,
        }
    }

    /// Width of each embedded input row.
    pub fn input_width(&self) -> usize {
        self.embed_dim + if self.lang_features { LANG_FEATURES } else { 0 }
    }

    /// Number of convolution windows over a full-length input.
    pub fn conv_len(&self) -> Option<usize> {
        window_count(self.max_len, self.kernel, self.stride)
    }

    /// Number of context vectors surviving pooling.
    pub fn context_len(&self) -> Option<usize> {
        let conv = self.conv_len()?;
        match self.pooling {
            Pooling::Window { size, stride } => window_count(conv, size, stride),
            Pooling::Global => Some(1),
        }
    }

    /// Width of the flattened global context vector fed to the head.
    pub fn head_width(&self) -> Option<usize> {
        Some(self.context_len()? * self.filters)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let positive = [
            ("vocab_size", self.vocab_size),
            ("embed_dim", self.embed_dim),
            ("filters", self.filters),
            ("kernel", self.kernel),
            ("stride", self.stride),
            ("attention_hidden", self.attention_hidden),
            ("max_len", self.max_len),
        ];
        for (name, value) in positive {
            if value == 0 {
                return Err(ModelError::Config(format!("{name} must be positive")));
            }
        }
        if self.vocab_size < 2 {
            return Err(ModelError::Config("vocabulary must hold PAD and UNK".into()));
        }
        if let Pooling::Window { size, stride } = self.pooling {
            if size == 0 || stride == 0 {
                return Err(ModelError::Config("pool size and stride must be positive".into()));
            }
        }
        let conv = self.conv_len().ok_or(TensorError::SequenceTooShort {
            len: self.max_len,
            needed: self.kernel,
        })?;
        let context = self.context_len().ok_or_else(|| {
            let needed = match self.pooling {
                Pooling::Window { size, .. } => size,
                Pooling::Global => 1,
            };
            TensorError::SequenceTooShort { len: conv, needed }
        })?;
        let needed = if self.include_self { 1 } else { 2 };
        if self.attention_enabled && context < needed {
            return Err(TensorError::AttentionDomain { len: context, needed }.into());
        }
        Ok(())
    }
}
