use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{adam_step, class_cross_entropy, fused_logit_grad, OptimizerConfig, TrainConfig, TrainError};
use crate::corpus::LangTag;
use crate::metrics::{score, MetricsReport};
use crate::nn::Hcms;

/// An encoded, labeled training example.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example {
    pub ids: Vec<usize>,
    pub lang: Vec<LangTag>,
    pub label: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochLog {
    pub epoch: usize,
    /// Mean loss over the epoch's training steps.
    pub train_loss: f64,
    /// Accuracy on the training set after the epoch.
    pub train_accuracy: f64,
    pub val_loss: f64,
    pub val_accuracy: f64,
    /// Headline (support-weighted) F1 on the selection set.
    pub val_f1: f64,
    pub val_macro_f1: f64,
}

impl EpochLog {
    pub const HEADER: &'static str =
        "epoch\ttrain_loss\ttrain_accuracy\tval_loss\tval_accuracy\tval_f1_weighted\tval_f1_macro";
}

impl fmt::Display for EpochLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{:.10}\t{:.10}\t{:.10}\t{:.10}\t{:.10}\t{:.10}",
            self.epoch,
            self.train_loss,
            self.train_accuracy,
            self.val_loss,
            self.val_accuracy,
            self.val_f1,
            self.val_macro_f1
        )
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Snapshot with the best selection-set F1 (earliest on ties).
    pub model: Hcms,
    pub best_epoch: usize,
    pub log: Vec<EpochLog>,
}

impl TrainOutcome {
    pub fn log_tsv(&self) -> String {
        let mut out = String::from(EpochLog::HEADER);
        out.push('\n');
        for e in &self.log {
            out.push_str(&e.to_string());
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub report: MetricsReport,
    pub mean_loss: f64,
    pub predictions: Vec<usize>,
}

pub fn evaluate(model: &Hcms, examples: &[Example]) -> Result<Evaluation, TrainError> {
    if examples.is_empty() {
        return Err(TrainError::Data("nothing to evaluate".into()));
    }
    let mut predictions = Vec::with_capacity(examples.len());
    let mut loss = 0.0;
    for ex in examples {
        let probs = model.predict_proba(&ex.ids, &ex.lang)?;
        loss += class_cross_entropy(ex.label, &probs);
        predictions.push(probs.argmax());
    }
    let truth: Vec<usize> = examples.iter().map(|e| e.label).collect();
    Ok(Evaluation {
        report: score(&truth, &predictions)?,
        mean_loss: loss / examples.len() as f64,
        predictions,
    })
}

/// Mini-batch Adam training. Gradients are averaged over each batch. When
/// `val` is empty the training set doubles as the selection set.
pub fn train(
    mut model: Hcms,
    train: &[Example],
    val: &[Example],
    cfg: &TrainConfig,
    opt: &OptimizerConfig,
) -> Result<TrainOutcome, TrainError> {
    if train.is_empty() {
        return Err(TrainError::Data("training corpus is empty".into()));
    }
    cfg.validate()?;
    opt.validate()?;
    let selection = if val.is_empty() { train } else { val };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut log = Vec::with_capacity(cfg.epochs);
    let mut best: Option<(f64, usize, Hcms)> = None;

    for epoch in 1..=cfg.epochs {
        if cfg.shuffle {
            order.shuffle(&mut rng);
        }
        let mut total_loss = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            model.zero_grad();
            let scale = 1.0 / batch.len() as f64;
            for &i in batch {
                let ex = &train[i];
                let (probs, cache) = model.forward(&ex.ids, &ex.lang)?;
                total_loss += class_cross_entropy(ex.label, &probs);
                let d_logits = fused_logit_grad(ex.label, &probs).map(|g| g * scale);
                model.backward_logits(&cache, &d_logits)?;
            }
            for (_, p) in model.parameters_mut() {
                adam_step(p, opt);
            }
        }

        let train_eval = evaluate(&model, train)?;
        let sel_eval = if val.is_empty() {
            train_eval.clone()
        } else {
            evaluate(&model, selection)?
        };
        let entry = EpochLog {
            epoch,
            train_loss: total_loss / train.len() as f64,
            train_accuracy: train_eval.report.accuracy,
            val_loss: sel_eval.mean_loss,
            val_accuracy: sel_eval.report.accuracy,
            val_f1: sel_eval.report.f1(),
            val_macro_f1: sel_eval.report.macro_avg.f1,
        };
        if best.as_ref().is_none_or(|(f1, _, _)| entry.val_f1 > *f1) {
            best = Some((entry.val_f1, epoch, model.clone()));
        }
        log.push(entry);
    }

    let (_, best_epoch, model) = best.expect("at least one epoch");
    Ok(TrainOutcome {
        model,
        best_epoch,
        log,
    })
}
