use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    AttentionCache, ConvBlock, ConvCache, DenseHead, EmbeddingLayer, ModelConfig, ModelError, SelfAttention,
};
use crate::corpus::{LangTag, PAD_ID};
use crate::tensor::{ops, Parameter, Tensor};

/// Convolution + self-attention sentence classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct Hcms {
    config: ModelConfig,
    pub embedding: EmbeddingLayer,
    pub conv: ConvBlock,
    pub attention: Option<SelfAttention>,
    pub head: DenseHead,
}

/// Intermediate values retained by [`Hcms::forward`] for the backward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    ids: Vec<usize>,
    conv: ConvCache,
    context_shape: Vec<usize>,
    attention: Option<AttentionCache>,
    global: Tensor,
    probs: Tensor,
}

impl ForwardCache {
    pub fn probs(&self) -> &Tensor {
        &self.probs
    }

    /// The flattened global context vector fed to the head.
    pub fn global(&self) -> &Tensor {
        &self.global
    }

    pub fn attention(&self) -> Option<&AttentionCache> {
        self.attention.as_ref()
    }
}

impl Hcms {
    /// Builds a model with parameters drawn from a generator seeded by `seed`.
    pub fn new(config: ModelConfig, seed: u64) -> Result<Self, ModelError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let embedding = EmbeddingLayer::new(&mut rng, config.vocab_size, config.embed_dim, config.lang_features);
        let conv = ConvBlock::new(
            &mut rng,
            config.input_width(),
            config.filters,
            config.kernel,
            config.stride,
            config.pooling,
        );
        let attention = config.attention_enabled.then(|| {
            SelfAttention::new(
                &mut rng,
                config.filters,
                config.attention_hidden,
                config.include_self,
                config.score_activation,
            )
        });
        let head_width = config.head_width().expect("validated");
        let head = DenseHead::new(&mut rng, head_width);
        Ok(Self {
            config,
            embedding,
            conv,
            attention,
            head,
        })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    /// Right-pads with PAD or truncates to the configured input length.
    pub fn fit_length(&self, ids: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = ids.iter().copied().take(self.config.max_len).collect();
        out.resize(self.config.max_len, PAD_ID);
        out
    }

    pub fn forward(&self, ids: &[usize], tags: &[LangTag]) -> Result<(Tensor, ForwardCache), ModelError> {
        let ids = self.fit_length(ids);
        let x = self.embedding.forward(&ids, tags)?;
        let (context, conv) = self.conv.forward(&x)?;
        let context_shape = context.shape().to_vec();
        let (global, attention) = match &self.attention {
            Some(layer) => {
                let (a, cache) = layer.forward(&context)?;
                (a.flatten(), Some(cache))
            }
            None => (context.flatten(), None),
        };
        let probs = self.head.forward(&global)?;
        Ok((
            probs.clone(),
            ForwardCache {
                ids,
                conv,
                context_shape,
                attention,
                global,
                probs,
            },
        ))
    }

    pub fn predict_proba(&self, ids: &[usize], tags: &[LangTag]) -> Result<Tensor, ModelError> {
        Ok(self.forward(ids, tags)?.0)
    }

    pub fn predict(&self, ids: &[usize], tags: &[LangTag]) -> Result<usize, ModelError> {
        Ok(self.predict_proba(ids, tags)?.argmax())
    }

    /// Backward pass from a gradient on the pre-softmax logits.
    pub fn backward_logits(&mut self, cache: &ForwardCache, d_logits: &Tensor) -> Result<(), ModelError> {
        let d_global = self.head.backward(&cache.global, d_logits)?;
        let d_shaped = d_global.reshape(cache.context_shape.clone())?;
        let d_context = match (&mut self.attention, &cache.attention) {
            (Some(layer), Some(att)) => layer.backward(att, &d_shaped)?,
            _ => d_shaped,
        };
        let d_x = self.conv.backward(&cache.conv, &d_context)?;
        self.embedding.backward(&cache.ids, &d_x);
        Ok(())
    }

    /// Backward pass from a gradient on the output probabilities.
    pub fn backward(&mut self, cache: &ForwardCache, d_probs: &Tensor) -> Result<(), ModelError> {
        let d_logits = ops::softmax_backward(&cache.probs, d_probs)?;
        self.backward_logits(cache, &d_logits)
    }

    /// Named parameters in a fixed order.
    pub fn parameters(&self) -> Vec<(&'static str, &Parameter)> {
        let mut out = vec![
            ("embedding.table", &self.embedding.table),
            ("conv.filters", &self.conv.filters),
            ("conv.bias", &self.conv.bias),
        ];
        if let Some(a) = &self.attention {
            out.extend([
                ("attention.query_proj", &a.query_proj),
                ("attention.key_proj", &a.key_proj),
                ("attention.hidden_bias", &a.hidden_bias),
                ("attention.score_proj", &a.score_proj),
                ("attention.score_bias", &a.score_bias),
            ]);
        }
        out.extend([("head.weight", &self.head.weight), ("head.bias", &self.head.bias)]);
        out
    }

    pub fn parameters_mut(&mut self) -> Vec<(&'static str, &mut Parameter)> {
        let mut out = vec![
            ("embedding.table", &mut self.embedding.table),
            ("conv.filters", &mut self.conv.filters),
            ("conv.bias", &mut self.conv.bias),
        ];
        if let Some(a) = &mut self.attention {
            out.extend([
                ("attention.query_proj", &mut a.query_proj),
                ("attention.key_proj", &mut a.key_proj),
                ("attention.hidden_bias", &mut a.hidden_bias),
                ("attention.score_proj", &mut a.score_proj),
                ("attention.score_bias", &mut a.score_bias),
            ]);
        }
        out.extend([
            ("head.weight", &mut self.head.weight),
            ("head.bias", &mut self.head.bias),
        ]);
        out
    }

    pub fn zero_grad(&mut self) {
        for (_, p) in self.parameters_mut() {
            p.zero_grad();
        }
    }

    pub fn num_parameters(&self) -> usize {
        self.parameters().iter().map(|(_, p)| p.value.len()).sum()
    }
}
