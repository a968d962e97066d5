//! Independent oracles shared by the integration tests and the acceptance
//! runner: central finite differences, a pairwise-loop attention, and a
//! gradient suite over every op, layer and the full model.

#![allow(dead_code, clippy::needless_range_loop)]

use hcms::nn::{ConvBlock, DenseHead, EmbeddingLayer, Hcms, ModelConfig, Pooling, ScoreActivation, SelfAttention};
use hcms::tensor::ops;
use hcms::tensor::Tensor;
use hcms::train::{class_cross_entropy, cross_entropy, cross_entropy_backward, fused_logit_grad, one_hot};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const STEP: f64 = 1e-4;
pub const REL_TOL: f64 = 1e-3;
/// Gradients smaller than this are compared on an absolute scale.
pub const DENOM_FLOOR: f64 = 1e-3;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_tensor(rng: &mut impl Rng, shape: &[usize], scale: f64) -> Tensor {
    let n = shape.iter().product();
    let data = (0..n).map(|_| rng.random_range(-scale..scale)).collect();
    Tensor::new(shape.to_vec(), data).unwrap()
}

fn dot(a: &Tensor, b: &Tensor) -> f64 {
    a.data().iter().zip(b.data()).map(|(x, y)| x * y).sum()
}

pub fn rel_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(DENOM_FLOOR)
}

/// Outcome of checking one op over many random instances.
#[derive(Debug, Clone, Default)]
pub struct GradReport {
    pub name: String,
    pub trials: usize,
    pub coords: usize,
    /// Coordinates skipped because a non-differentiable point lay within
    /// one step (one-sided slopes disagree).
    pub kinks: usize,
    pub worst: f64,
}

impl GradReport {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            ..Self::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.worst <= REL_TOL && self.kinks * 100 <= self.coords
    }

    /// Compares `analytic` with central differences of `f` around `x`.
    /// `piecewise` enables kink detection for ReLU / max-pool paths.
    pub fn check(&mut self, x: &[f64], analytic: &[f64], piecewise: bool, mut f: impl FnMut(&[f64]) -> f64) {
        self.check_coords(x, analytic, piecewise, 0..x.len(), &mut f);
    }

    pub fn check_coords(
        &mut self,
        x: &[f64],
        analytic: &[f64],
        piecewise: bool,
        coords: impl IntoIterator<Item = usize>,
        f: &mut impl FnMut(&[f64]) -> f64,
    ) {
        assert_eq!(x.len(), analytic.len(), "{}: gradient shape", self.name);
        let mut buf = x.to_vec();
        let f0 = if piecewise { f(x) } else { 0.0 };
        for i in coords {
            buf[i] = x[i] + STEP;
            let plus = f(&buf);
            buf[i] = x[i] - STEP;
            let minus = f(&buf);
            buf[i] = x[i];
            let numeric = (plus - minus) / (2.0 * STEP);
            self.coords += 1;
            if piecewise {
                let fwd = (plus - f0) / STEP;
                let bwd = (f0 - minus) / STEP;
                if (fwd - bwd).abs() > 1e-2 * numeric.abs().max(1.0) {
                    self.kinks += 1;
                    continue;
                }
            }
            let e = rel_error(analytic[i], numeric);
            if e > self.worst {
                self.worst = e;
            }
        }
    }
}

fn dims(rng: &mut impl Rng, lo: usize, hi: usize) -> usize {
    rng.random_range(lo..=hi)
}

pub fn check_matmul(trials: usize, seed: u64) -> GradReport {
    let mut rep = GradReport::new("matmul");
    let mut rng = rng(seed);
    for _ in 0..trials {
        let (n, k, m) = (dims(&mut rng, 1, 5), dims(&mut rng, 1, 5), dims(&mut rng, 1, 5));
        let a = random_tensor(&mut rng, &[n, k], 1.0);
        let b = random_tensor(&mut rng, &[k, m], 1.0);
        let r = random_tensor(&mut rng, &[n, m], 1.0);
        let (da, db) = ops::matmul_backward(&a, &b, &r).unwrap();
        rep.check(a.data(), da.data(), false, |x| {
            dot(&ops::matmul(&Tensor::new(vec![n, k], x.to_vec()).unwrap(), &b).unwrap(), &r)
        });
        rep.check(b.data(), db.data(), false, |x| {
            dot(&ops::matmul(&a, &Tensor::new(vec![k, m], x.to_vec()).unwrap()).unwrap(), &r)
        });
        rep.trials += 1;
    }
    rep
}

pub fn check_conv1d(trials: usize, seed: u64) -> GradReport {
    let mut rep = GradReport::new("conv1d");
    let mut rng = rng(seed);
    for _ in 0..trials {
        let (d, f, k, stride) = (dims(&mut rng, 1, 4), dims(&mut rng, 1, 4), dims(&mut rng, 1, 4), dims(&mut rng, 1, 3));
        let u = dims(&mut rng, k, 10);
        let x = random_tensor(&mut rng, &[u, d], 1.0);
        let w = random_tensor(&mut rng, &[f, k, d], 1.0);
        let b = random_tensor(&mut rng, &[f], 1.0);
        let out = ops::conv1d(&x, &w, &b, stride).unwrap();
        let r = random_tensor(&mut rng, out.shape(), 1.0);
        let g = ops::conv1d_backward(&x, &w, stride, &r).unwrap();
        rep.check(x.data(), g.input.data(), false, |v| {
            dot(&ops::conv1d(&Tensor::new(vec![u, d], v.to_vec()).unwrap(), &w, &b, stride).unwrap(), &r)
        });
        rep.check(w.data(), g.filters.data(), false, |v| {
            dot(&ops::conv1d(&x, &Tensor::new(vec![f, k, d], v.to_vec()).unwrap(), &b, stride).unwrap(), &r)
        });
        rep.check(b.data(), g.bias.data(), false, |v| {
            dot(&ops::conv1d(&x, &w, &Tensor::vector(v.to_vec()), stride).unwrap(), &r)
        });
        rep.trials += 1;
    }
    rep
}

pub fn check_relu(trials: usize, seed: u64) -> GradReport {
    let mut rep = GradReport::new("relu");
    let mut rng = rng(seed);
    for _ in 0..trials {
        let n = dims(&mut rng, 1, 12);
        let x = random_tensor(&mut rng, &[n], 1.0);
        let r = random_tensor(&mut rng, &[n], 1.0);
        let g = ops::relu_backward(&x, &r).unwrap();
        rep.check(x.data(), g.data(), true, |v| dot(&ops::relu(&Tensor::vector(v.to_vec())), &r));
        rep.trials += 1;
    }
    rep
}

pub fn check_maxpool(trials: usize, seed: u64) -> GradReport {
    let mut rep = GradReport::new("maxpool1d");
    let mut rng = rng(seed);
    for _ in 0..trials {
        let (f, pool, stride) = (dims(&mut rng, 1, 4), dims(&mut rng, 1, 3), dims(&mut rng, 1, 3));
        let v = dims(&mut rng, pool, 10);
        let x = random_tensor(&mut rng, &[v, f], 1.0);
        let out = ops::maxpool1d(&x, pool, stride).unwrap();
        let r = random_tensor(&mut rng, out.shape(), 1.0);
        let g = ops::maxpool1d_backward(&x, pool, stride, &r).unwrap();
        rep.check(x.data(), g.data(), true, |d| {
            dot(&ops::maxpool1d(&Tensor::new(vec![v, f], d.to_vec()).unwrap(), pool, stride).unwrap(), &r)
        });
        rep.trials += 1;
    }
    rep
}

pub fn check_softmax(trials: usize, seed: u64) -> GradReport {
    let mut rep = GradReport::new("softmax");
    let mut rng = rng(seed);
    for _ in 0..trials {
        let n = dims(&mut rng, 1, 8);
        let x = random_tensor(&mut rng, &[n], 3.0);
        let r = random_tensor(&mut rng, &[n], 1.0);
        let g = ops::softmax_backward(&ops::softmax(&x), &r).unwrap();
        rep.check(x.data(), g.data(), false, |v| dot(&ops::softmax(&Tensor::vector(v.to_vec())), &r));
        rep.trials += 1;
    }
    rep
}

pub fn check_pointwise(trials: usize, seed: u64) -> Vec<GradReport> {
    let mut tanh = GradReport::new("tanh");
    let mut sigmoid = GradReport::new("sigmoid");
    let mut add = GradReport::new("add");
    let mut scale = GradReport::new("scale");
    let mut rng = rng(seed);
    for _ in 0..trials {
        let n = dims(&mut rng, 1, 10);
        let x = random_tensor(&mut rng, &[n], 3.0);
        let y = random_tensor(&mut rng, &[n], 3.0);
        let r = random_tensor(&mut rng, &[n], 1.0);
        let s = rng.random_range(-2.0..2.0);
        let vec = |v: &[f64]| Tensor::vector(v.to_vec());

        let g = ops::tanh_backward(&ops::tanh(&x), &r).unwrap();
        tanh.check(x.data(), g.data(), false, |v| dot(&ops::tanh(&vec(v)), &r));
        let g = ops::sigmoid_backward(&ops::sigmoid(&x), &r).unwrap();
        sigmoid.check(x.data(), g.data(), false, |v| dot(&ops::sigmoid(&vec(v)), &r));
        let (ga, gb) = ops::add_backward(&r);
        add.check(x.data(), ga.data(), false, |v| dot(&ops::add(&vec(v), &y).unwrap(), &r));
        add.check(y.data(), gb.data(), false, |v| dot(&ops::add(&x, &vec(v)).unwrap(), &r));
        let g = ops::scale_backward(&r, s);
        scale.check(x.data(), g.data(), false, |v| dot(&ops::scale(&vec(v), s), &r));
        for rep in [&mut tanh, &mut sigmoid, &mut add, &mut scale] {
            rep.trials += 1;
        }
    }
    vec![tanh, sigmoid, add, scale]
}

pub fn check_concat(trials: usize, seed: u64) -> GradReport {
    let mut rep = GradReport::new("concat");
    let mut rng = rng(seed);
    for _ in 0..trials {
        let parts: Vec<Tensor> = (0..dims(&mut rng, 1, 4))
            .map(|_| {
                let shape = [dims(&mut rng, 1, 3), dims(&mut rng, 1, 3)];
                random_tensor(&mut rng, &shape, 1.0)
            })
            .collect();
        let shapes: Vec<Vec<usize>> = parts.iter().map(|p| p.shape().to_vec()).collect();
        let r = random_tensor(&mut rng, &[shapes.iter().map(|s| s[0] * s[1]).sum()], 1.0);
        let grads = ops::concat_backward(&r, &shapes).unwrap();
        for (i, part) in parts.iter().enumerate() {
            rep.check(part.data(), grads[i].data(), false, |v| {
                let mut ps = parts.clone();
                ps[i] = Tensor::new(shapes[i].clone(), v.to_vec()).unwrap();
                dot(&ops::concat(&ps).unwrap(), &r)
            });
        }
        rep.trials += 1;
    }
    rep
}

fn random_probs(rng: &mut impl Rng) -> Tensor {
    ops::softmax(&random_tensor(rng, &[3], 2.0))
}

pub fn check_loss(trials: usize, seed: u64) -> Vec<GradReport> {
    let mut ce = GradReport::new("cross_entropy");
    let mut fused = GradReport::new("softmax+cross_entropy");
    let mut rng = rng(seed);
    for _ in 0..trials {
        let class = rng.random_range(0..3);
        let y = one_hot(class);
        let p = random_probs(&mut rng);
        let g = cross_entropy_backward(&y, &p);
        ce.check(p.data(), g.data(), false, |v| cross_entropy(&y, &Tensor::vector(v.to_vec())).unwrap());

        let z = random_tensor(&mut rng, &[3], 3.0);
        let g = fused_logit_grad(class, &ops::softmax(&z));
        fused.check(z.data(), g.data(), false, |v| {
            class_cross_entropy(class, &ops::softmax(&Tensor::vector(v.to_vec())))
        });
        ce.trials += 1;
        fused.trials += 1;
    }
    vec![ce, fused]
}

pub fn check_embedding(trials: usize, seed: u64) -> GradReport {
    let mut rep = GradReport::new("embedding");
    let mut rng = rng(seed);
    for _ in 0..trials {
        let (vocab, dim) = (dims(&mut rng, 2, 8), dims(&mut rng, 1, 4));
        let layer = EmbeddingLayer::new(&mut rng, vocab, dim, false);
        let ids: Vec<usize> = (0..dims(&mut rng, 1, 8)).map(|_| rng.random_range(0..vocab)).collect();
        let r = random_tensor(&mut rng, &[ids.len(), dim], 1.0);
        let mut l = layer.clone();
        l.table.zero_grad();
        l.backward(&ids, &r);
        let x = layer.table.value.clone();
        // row 0 is the frozen PAD row
        let mut f = |v: &[f64]| {
            let mut m = layer.clone();
            m.table.value = Tensor::new(x.shape().to_vec(), v.to_vec()).unwrap();
            dot(&m.forward(&ids, &[]).unwrap(), &r)
        };
        rep.check_coords(x.data(), l.table.grad.data(), false, dim..x.len(), &mut f);
        assert!(l.table.grad.row(0).iter().all(|&g| g == 0.0));
        rep.trials += 1;
    }
    rep
}

pub fn check_conv_block(trials: usize, seed: u64) -> GradReport {
    let mut rep = GradReport::new("conv block");
    let mut rng = rng(seed);
    for _ in 0..trials {
        let (d, f, k, stride) = (dims(&mut rng, 1, 4), dims(&mut rng, 1, 4), dims(&mut rng, 1, 3), dims(&mut rng, 1, 2));
        let pooling = if rng.random_bool(0.3) {
            Pooling::Global
        } else {
            Pooling::Window {
                size: dims(&mut rng, 1, 3),
                stride: dims(&mut rng, 1, 2),
            }
        };
        let u = dims(&mut rng, k + 3 * stride + 2, 12);
        let mut block = ConvBlock::new(&mut rng, d, f, k, stride, pooling);
        block.bias.value = random_tensor(&mut rng, &[f], 0.3);
        let x = random_tensor(&mut rng, &[u, d], 1.0);
        let Ok((out, cache)) = block.forward(&x) else { continue };
        let r = random_tensor(&mut rng, out.shape(), 1.0);
        let mut b = block.clone();
        let dx = b.backward(&cache, &r).unwrap();
        rep.check(x.data(), dx.data(), true, |v| {
            dot(&block.forward(&Tensor::new(vec![u, d], v.to_vec()).unwrap()).unwrap().0, &r)
        });
        rep.check(block.filters.value.data(), b.filters.grad.data(), true, |v| {
            let mut m = block.clone();
            m.filters.value = Tensor::new(vec![f, k, d], v.to_vec()).unwrap();
            dot(&m.forward(&x).unwrap().0, &r)
        });
        rep.check(block.bias.value.data(), b.bias.grad.data(), true, |v| {
            let mut m = block.clone();
            m.bias.value = Tensor::vector(v.to_vec());
            dot(&m.forward(&x).unwrap().0, &r)
        });
        rep.trials += 1;
    }
    rep
}

fn attention_param(layer: &mut SelfAttention, i: usize) -> &mut hcms::tensor::Parameter {
    match i {
        0 => &mut layer.query_proj,
        1 => &mut layer.key_proj,
        2 => &mut layer.hidden_bias,
        3 => &mut layer.score_proj,
        _ => &mut layer.score_bias,
    }
}

pub fn random_attention(rng: &mut impl Rng, width: usize, hidden: usize) -> SelfAttention {
    let include_self = rng.random_bool(0.3);
    let activation = if rng.random_bool(0.3) {
        ScoreActivation::Identity
    } else {
        ScoreActivation::Sigmoid
    };
    let mut layer = SelfAttention::new(rng, width, hidden, include_self, activation);
    layer.hidden_bias.value = random_tensor(rng, &[hidden], 0.5);
    layer.score_bias.value = random_tensor(rng, &[1], 0.5);
    layer.score_proj.value = random_tensor(rng, &[hidden, 1], 2.0);
    layer
}

pub fn check_attention(trials: usize, seed: u64) -> GradReport {
    let mut rep = GradReport::new("self-attention");
    let mut rng = rng(seed);
    for _ in 0..trials {
        let (v, width, hidden) = (dims(&mut rng, 2, 6), dims(&mut rng, 1, 4), dims(&mut rng, 1, 5));
        let layer = random_attention(&mut rng, width, hidden);
        let c = random_tensor(&mut rng, &[v, width], 1.0);
        let (out, cache) = layer.forward(&c).unwrap();
        let r = random_tensor(&mut rng, out.shape(), 1.0);
        let mut l = layer.clone();
        let dc = l.backward(&cache, &r).unwrap();
        rep.check(c.data(), dc.data(), false, |x| {
            dot(&layer.forward(&Tensor::new(vec![v, width], x.to_vec()).unwrap()).unwrap().0, &r)
        });
        for i in 0..5 {
            let value = attention_param(&mut layer.clone(), i).value.clone();
            let grad = attention_param(&mut l, i).grad.clone();
            rep.check(value.data(), grad.data(), false, |x| {
                let mut m = layer.clone();
                attention_param(&mut m, i).value = Tensor::new(value.shape().to_vec(), x.to_vec()).unwrap();
                dot(&m.forward(&c).unwrap().0, &r)
            });
        }
        rep.trials += 1;
    }
    rep
}

pub fn check_dense(trials: usize, seed: u64) -> GradReport {
    let mut rep = GradReport::new("dense head");
    let mut rng = rng(seed);
    for _ in 0..trials {
        let w = dims(&mut rng, 1, 12);
        let mut head = DenseHead::new(&mut rng, w);
        head.bias.value = random_tensor(&mut rng, &[3], 0.5);
        let g = random_tensor(&mut rng, &[w], 1.0);
        let r = random_tensor(&mut rng, &[3], 1.0);
        let mut h = head.clone();
        let dg = h.backward(&g, &r).unwrap();
        rep.check(g.data(), dg.data(), false, |x| dot(&head.logits(&Tensor::vector(x.to_vec())).unwrap(), &r));
        rep.check(head.weight.value.data(), h.weight.grad.data(), false, |x| {
            let mut m = head.clone();
            m.weight.value = Tensor::new(vec![w, 3], x.to_vec()).unwrap();
            dot(&m.logits(&g).unwrap(), &r)
        });
        rep.check(head.bias.value.data(), h.bias.grad.data(), false, |x| {
            let mut m = head.clone();
            m.bias.value = Tensor::vector(x.to_vec());
            dot(&m.logits(&g).unwrap(), &r)
        });
        rep.trials += 1;
    }
    rep
}

/// The small end-to-end configuration: d = 4, f = 3, k = 2, d_h = 5, u = 12.
pub fn small_model_config(vocab: usize, attention: bool) -> ModelConfig {
    ModelConfig {
        vocab_size: vocab,
        embed_dim: 4,
        lang_features: false,
        filters: 3,
        kernel: 2,
        stride: 1,
        pooling: Pooling::Window { size: 2, stride: 2 },
        attention_enabled: attention,
        attention_hidden: 5,
        include_self: false,
        score_activation: ScoreActivation::Sigmoid,
        max_len: 12,
    }
}

fn set_param(model: &mut Hcms, index: usize, values: &[f64]) {
    let mut params = model.parameters_mut();
    let p = &mut params[index].1;
    p.value = Tensor::new(p.value.shape().to_vec(), values.to_vec()).unwrap();
}

pub fn check_model(trials: usize, seed: u64) -> GradReport {
    let mut rep = GradReport::new("end-to-end model");
    let mut rng = rng(seed);
    let vocab = 10;
    for trial in 0..trials {
        let attention = trial % 4 != 3;
        let mut model = Hcms::new(small_model_config(vocab, attention), rng.random()).unwrap();
        for (_, p) in model.parameters_mut() {
            let shape = p.value.shape().to_vec();
            p.value = random_tensor(&mut rng, &shape, 0.8);
        }
        // keep the PAD row at zero as initialisation does
        model.embedding.table.value.row_mut(0).fill(0.0);
        let len = dims(&mut rng, 3, 12);
        let ids: Vec<usize> = (0..len).map(|_| rng.random_range(1..vocab)).collect();
        let class = rng.random_range(0..3);

        let (probs, cache) = model.forward(&ids, &[]).unwrap();
        let mut g = model.clone();
        g.zero_grad();
        if trial % 2 == 0 {
            g.backward_logits(&cache, &fused_logit_grad(class, &probs)).unwrap();
        } else {
            g.backward(&cache, &cross_entropy_backward(&one_hot(class), &probs)).unwrap();
        }
        let names: Vec<&str> = model.parameters().iter().map(|(n, _)| *n).collect();
        for (i, name) in names.iter().enumerate() {
            let value = model.parameters()[i].1.value.clone();
            let grad = g.parameters()[i].1.grad.clone();
            let mut f = |x: &[f64]| {
                let mut m = model.clone();
                set_param(&mut m, i, x);
                class_cross_entropy(class, &m.predict_proba(&ids, &[]).unwrap())
            };
            let start = if *name == "embedding.table" { value.shape()[1] } else { 0 };
            rep.check_coords(value.data(), grad.data(), true, start..value.len(), &mut f);
        }
        rep.trials += 1;
    }
    rep
}

/// Every gradient check, `trials` random instances each.
pub fn gradient_suite(trials: usize, seed: u64) -> Vec<GradReport> {
    let mut out = vec![
        check_matmul(trials, seed),
        check_conv1d(trials, seed + 1),
        check_relu(trials, seed + 2),
        check_maxpool(trials, seed + 3),
        check_softmax(trials, seed + 4),
        check_concat(trials, seed + 5),
        check_embedding(trials, seed + 6),
        check_conv_block(trials, seed + 7),
        check_attention(trials, seed + 8),
        check_dense(trials, seed + 9),
        check_model(trials, seed + 10),
    ];
    out.extend(check_pointwise(trials, seed + 11));
    out.extend(check_loss(trials, seed + 12));
    out
}

/// Direct transcription of the attention equations with explicit loops over
/// every (t, t') pair.
pub fn pairwise_attention(layer: &SelfAttention, c: &Tensor) -> Vec<Vec<f64>> {
    let (v, width) = (c.rows(), c.row_len());
    let dh = layer.hidden_bias.value.len();
    let wq = &layer.query_proj.value;
    let wk = &layer.key_proj.value;
    let mut out = vec![vec![0.0; width]; v];
    for t in 0..v {
        let mut keys = Vec::new();
        let mut scores = Vec::new();
        for t2 in 0..v {
            if t2 == t && !layer.include_self {
                continue;
            }
            let mut e = layer.score_bias.value.data()[0];
            for j in 0..dh {
                let mut h = layer.hidden_bias.value.data()[j];
                for i in 0..width {
                    h += c.get2(t, i) * wq.get2(i, j) + c.get2(t2, i) * wk.get2(i, j);
                }
                e += h.tanh() * layer.score_proj.value.get2(j, 0);
            }
            if layer.activation == ScoreActivation::Sigmoid {
                e = 1.0 / (1.0 + (-e).exp());
            }
            keys.push(t2);
            scores.push(e);
        }
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = scores.iter().map(|s| (s - max).exp()).sum();
        for (&t2, s) in keys.iter().zip(&scores) {
            let q = (s - max).exp() / z;
            for i in 0..width {
                out[t][i] += q * c.get2(t2, i);
            }
        }
    }
    out
}

/// Largest elementwise gap between the layer and the loop oracle over
/// `trials` random instances with v ≤ 8, d' ≤ 6.
pub fn attention_oracle_gap(trials: usize, seed: u64) -> f64 {
    let mut rng = rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let (v, width, hidden) = (dims(&mut rng, 2, 8), dims(&mut rng, 1, 6), dims(&mut rng, 1, 8));
        let layer = random_attention(&mut rng, width, hidden);
        let c = random_tensor(&mut rng, &[v, width], 2.0);
        let (a, _) = layer.forward(&c).unwrap();
        let expected = pairwise_attention(&layer, &c);
        for t in 0..v {
            for i in 0..width {
                worst = worst.max((a.get2(t, i) - expected[t][i]).abs());
            }
        }
    }
    worst
}

pub fn data_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

const FUZZ_PIECES: &[&str] = &[
    "a", "b", "e", "l", "o", "A", "B", "Z", "x", "yaar", "BHAI", "accha", "so", "oooo", "!!", "!", "?", ".", ",",
    "'", "\u{2019}", "@", "#", "##", "http://", "https://", "HTTP://", "www.", "WWW.", "wwww.", "t.co/x", "😂", "❤️",
    "❤", "👍🏽", "🤦\u{200d}\u{2642}\u{fe0f}", "\u{200d}", "\u{fe0f}", "🇮🇳", "😂😂😂", "can't", "CAN'T", "won’t",
    "don", "t", "it's", "y'all", "'cause", "İ", "ß", "ǅ", "ﬁ", "é", "e\u{301}", "ttt", "1", "22", "_",
];

/// Random tweet tokens built from pieces chosen to hit cleaning edge cases.
pub fn fuzz_token(rng: &mut impl Rng) -> String {
    let mut tok = String::new();
    for _ in 0..rng.random_range(1..=4) {
        tok.push_str(FUZZ_PIECES[rng.random_range(0..FUZZ_PIECES.len())]);
    }
    tok
}

pub fn fuzz_records(seed: u64, count: usize) -> Vec<hcms::corpus::TweetRecord> {
    use hcms::corpus::{LangTag, Sentiment, TweetRecord};
    let mut rng = rng(seed);
    (0..count)
        .map(|i| {
            let label = match rng.random_range(0..4) {
                0 => None,
                k => Sentiment::from_index(k - 1),
            };
            let mut r = TweetRecord::new(format!("f{i}"), label);
            for _ in 0..rng.random_range(0..=10) {
                let tag = LangTag::ALL[rng.random_range(0..4)];
                r.push(fuzz_token(&mut rng), tag);
            }
            r
        })
        .collect()
}

/// Records whose tokens and ids survive the CONLL format: non-empty and
/// free of whitespace.
pub fn random_conll_records(seed: u64, count: usize) -> Vec<hcms::corpus::TweetRecord> {
    let mut recs = fuzz_records(seed, count);
    for r in &mut recs {
        for t in &mut r.tokens {
            t.retain(|c| !c.is_whitespace());
            if t.is_empty() {
                t.push('_');
            }
        }
    }
    recs
}

/// Per-class counts by direct enumeration.
pub struct BruteForce {
    pub tp: [u64; 3],
    pub fp: [u64; 3],
    pub fn_: [u64; 3],
    pub correct: u64,
    pub total: u64,
}

pub fn brute_force_counts(truth: &[usize], pred: &[usize]) -> BruteForce {
    let mut b = BruteForce {
        tp: [0; 3],
        fp: [0; 3],
        fn_: [0; 3],
        correct: 0,
        total: truth.len() as u64,
    };
    for c in 0..3 {
        for i in 0..truth.len() {
            match (truth[i] == c, pred[i] == c) {
                (true, true) => b.tp[c] += 1,
                (false, true) => b.fp[c] += 1,
                (true, false) => b.fn_[c] += 1,
                _ => {}
            }
        }
    }
    b.correct = truth.iter().zip(pred).filter(|(t, p)| t == p).count() as u64;
    b
}

fn safe_div(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        0.0
    } else {
        a / b
    }
}

/// Returns a description of the first disagreement, if any.
pub fn metrics_mismatch(truth: &[usize], pred: &[usize]) -> Option<String> {
    let r = hcms::metrics::score(truth, pred).unwrap();
    let b = brute_force_counts(truth, pred);
    let mut prec = [0.0; 3];
    let mut rec = [0.0; 3];
    let mut f1 = [0.0; 3];
    for c in 0..3 {
        let support = b.tp[c] + b.fn_[c];
        if r.confusion.support(c) != support || r.confusion.predicted(c) != b.tp[c] + b.fp[c] || r.confusion.counts[c][c] != b.tp[c] {
            return Some(format!("counts differ for class {c}"));
        }
        prec[c] = safe_div(b.tp[c] as f64, (b.tp[c] + b.fp[c]) as f64);
        rec[c] = safe_div(b.tp[c] as f64, support as f64);
        f1[c] = safe_div(2.0 * prec[c] * rec[c], prec[c] + rec[c]);
        let s = &r.per_class[c];
        if s.precision != prec[c] || s.recall != rec[c] || s.f1 != f1[c] || s.support != support {
            return Some(format!("class {c}: {s:?} vs p={} r={} f1={}", prec[c], rec[c], f1[c]));
        }
    }
    let present: Vec<usize> = (0..3).filter(|&c| b.tp[c] + b.fp[c] + b.fn_[c] > 0).collect();
    let n = present.len() as f64;
    let macro_f1 = present.iter().map(|&c| f1[c]).sum::<f64>() / n;
    let weighted_f1 = (0..3).map(|c| (b.tp[c] + b.fn_[c]) as f64 * f1[c]).sum::<f64>() / b.total as f64;
    let accuracy = b.correct as f64 / b.total as f64;
    if r.macro_avg.f1 != macro_f1 || r.weighted_avg.f1 != weighted_f1 || r.accuracy != accuracy {
        return Some(format!(
            "averages: macro {} vs {macro_f1}, weighted {} vs {weighted_f1}, accuracy {} vs {accuracy}",
            r.macro_avg.f1, r.weighted_avg.f1, r.accuracy
        ));
    }
    None
}

pub fn random_labels(rng: &mut impl Rng) -> (Vec<usize>, Vec<usize>) {
    let n = rng.random_range(1..=40);
    // skew toward fewer classes so absent-class paths are exercised
    let k = rng.random_range(1..=3);
    let truth = (0..n).map(|_| rng.random_range(0..k)).collect();
    let pred = (0..n).map(|_| rng.random_range(0..3)).collect();
    (truth, pred)
}
