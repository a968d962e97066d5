use rand::Rng;

use super::{init, ModelError, ScoreActivation};
use crate::tensor::{ops, Parameter, Tensor, TensorError};

/// Pairwise additive self-attention over context vectors.
///
/// For query row `t` and each attended key row `t'`:
/// `h = tanh(c_t·W_q + c_t'·W_k + b_h)`, `e = σ(h·w_s + b_s)`,
/// `q_t = softmax_t'(e)`, `a_t = Σ_t' q_{t,t'} c_t'`.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfAttention {
    /// `[d'×d_h]`, applied to the query row.
    pub query_proj: Parameter,
    /// `[d'×d_h]`, applied to the key row.
    pub key_proj: Parameter,
    /// `[d_h]`
    pub hidden_bias: Parameter,
    /// `[d_h×1]`
    pub score_proj: Parameter,
    /// `[1]`
    pub score_bias: Parameter,
    pub include_self: bool,
    pub activation: ScoreActivation,
}

#[derive(Debug, Clone)]
pub struct AttentionCache {
    context: Tensor,
    /// `v×v×d_h` hidden activations, zero for unattended pairs.
    hidden: Vec<f64>,
    /// `v×v` activated scores.
    scores: Vec<f64>,
    /// `v×v` attention weights; row `t` sums to 1 over its keys.
    weights: Tensor,
}

impl AttentionCache {
    pub fn weights(&self) -> &Tensor {
        &self.weights
    }
}

impl SelfAttention {
    pub fn new<R: Rng>(
        rng: &mut R,
        width: usize,
        hidden: usize,
        include_self: bool,
        activation: ScoreActivation,
    ) -> Self {
        Self {
            query_proj: Parameter::new(init::glorot_uniform(rng, &[width, hidden], width, hidden)),
            key_proj: Parameter::new(init::glorot_uniform(rng, &[width, hidden], width, hidden)),
            hidden_bias: Parameter::zeros(&[hidden]),
            score_proj: Parameter::new(init::glorot_uniform(rng, &[hidden, 1], hidden, 1)),
            score_bias: Parameter::zeros(&[1]),
            include_self,
            activation,
        }
    }

    pub fn hidden(&self) -> usize {
        self.query_proj.shape()[1]
    }

    /// Minimum number of context vectors this layer accepts.
    pub fn min_len(&self) -> usize {
        if self.include_self {
            1
        } else {
            2
        }
    }

    /// Whether query `t` attends to key `k`.
    pub fn attends(&self, t: usize, k: usize) -> bool {
        self.include_self || t != k
    }

    /// Returns the attention vectors `A[v×d']`, one row per context vector.
    pub fn forward(&self, context: &Tensor) -> Result<(Tensor, AttentionCache), ModelError> {
        let (v, width) = (context.rows(), context.row_len());
        if v < self.min_len() {
            return Err(TensorError::AttentionDomain {
                len: v,
                needed: self.min_len(),
            }
            .into());
        }
        if self.query_proj.shape()[0] != width {
            return Err(TensorError::Dimension {
                op: "self_attention",
                left: context.shape().to_vec(),
                right: self.query_proj.shape().to_vec(),
            }
            .into());
        }
        let dh = self.hidden();
        let queries = ops::matmul(context, &self.query_proj.value)?;
        let keys = ops::matmul(context, &self.key_proj.value)?;
        let (bh, ws, bs) = (
            self.hidden_bias.value.data(),
            self.score_proj.value.data(),
            self.score_bias.value.data()[0],
        );

        let mut hidden = vec![0.0; v * v * dh];
        let mut scores = vec![0.0; v * v];
        let mut weights = Tensor::zeros(&[v, v]);
        let mut row_scores = Vec::with_capacity(v);
        for t in 0..v {
            row_scores.clear();
            let q = queries.row(t);
            for k in (0..v).filter(|&k| self.attends(t, k)) {
                let h = &mut hidden[(t * v + k) * dh..(t * v + k + 1) * dh];
                let mut z = bs;
                for (j, hj) in h.iter_mut().enumerate() {
                    *hj = (q[j] + keys.get2(k, j) + bh[j]).tanh();
                    z += *hj * ws[j];
                }
                let e = match self.activation {
                    ScoreActivation::Sigmoid => ops::sigmoid_scalar(z),
                    ScoreActivation::Identity => z,
                };
                scores[t * v + k] = e;
                row_scores.push(e);
            }
            ops::softmax_in_place(&mut row_scores);
            let mut probs = row_scores.iter();
            let row = weights.row_mut(t);
            for k in (0..v).filter(|&k| self.attends(t, k)) {
                row[k] = *probs.next().expect("one weight per key");
            }
        }
        let out = ops::matmul(&weights, context)?;
        Ok((
            out,
            AttentionCache {
                context: context.clone(),
                hidden,
                scores,
                weights,
            },
        ))
    }

    /// Accumulates all five parameter gradients; returns `dC`.
    pub fn backward(&mut self, cache: &AttentionCache, d_out: &Tensor) -> Result<Tensor, ModelError> {
        let context = &cache.context;
        let (v, width) = (context.rows(), context.row_len());
        let dh = self.hidden();
        // value path: A = Q·C
        let (d_weights, mut d_context) = ops::matmul_backward(&cache.weights, context, d_out)?;

        let ws = self.score_proj.value.data().to_vec();
        let mut d_queries = Tensor::zeros(&[v, dh]);
        let mut d_keys = Tensor::zeros(&[v, dh]);
        let mut d_hidden_bias = vec![0.0; dh];
        let mut d_score_proj = vec![0.0; dh];
        let mut d_score_bias = 0.0;

        let mut q_row = Vec::with_capacity(v);
        let mut dq_row = Vec::with_capacity(v);
        let mut de_row = Vec::with_capacity(v);
        for t in 0..v {
            let keys: Vec<usize> = (0..v).filter(|&k| self.attends(t, k)).collect();
            q_row.clear();
            dq_row.clear();
            for &k in &keys {
                q_row.push(cache.weights.get2(t, k));
                dq_row.push(d_weights.get2(t, k));
            }
            de_row.clear();
            de_row.resize(keys.len(), 0.0);
            ops::softmax_backward_slice(&q_row, &dq_row, &mut de_row);

            for (&k, &de) in keys.iter().zip(&de_row) {
                let e = cache.scores[t * v + k];
                let dz = match self.activation {
                    ScoreActivation::Sigmoid => de * e * (1.0 - e),
                    ScoreActivation::Identity => de,
                };
                d_score_bias += dz;
                let h = &cache.hidden[(t * v + k) * dh..(t * v + k + 1) * dh];
                for j in 0..dh {
                    d_score_proj[j] += h[j] * dz;
                    let d_pre = dz * ws[j] * (1.0 - h[j] * h[j]);
                    d_hidden_bias[j] += d_pre;
                    d_queries.row_mut(t)[j] += d_pre;
                    d_keys.row_mut(k)[j] += d_pre;
                }
            }
        }

        let (dc_q, d_query_proj) = ops::matmul_backward(context, &self.query_proj.value, &d_queries)?;
        let (dc_k, d_key_proj) = ops::matmul_backward(context, &self.key_proj.value, &d_keys)?;
        d_context.add_assign(&dc_q)?;
        d_context.add_assign(&dc_k)?;
        debug_assert_eq!(d_context.shape(), &[v, width]);

        self.query_proj.accumulate(&d_query_proj)?;
        self.key_proj.accumulate(&d_key_proj)?;
        self.hidden_bias.accumulate(&Tensor::vector(d_hidden_bias))?;
        self.score_proj.accumulate(&Tensor::new(vec![dh, 1], d_score_proj)?)?;
        self.score_bias.accumulate(&Tensor::vector(vec![d_score_bias]))?;
        Ok(d_context)
    }
}
