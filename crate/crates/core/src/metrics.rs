//! Confusion-matrix accounting with per-class and averaged
//! precision, recall and F1.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::corpus::Sentiment;
use crate::nn::NUM_CLASSES;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("label vectors differ in length: {truth} true vs {predicted} predicted")]
    LengthMismatch { truth: usize, predicted: usize },
    #[error("no labels to evaluate")]
    Empty,
    #[error("class index {0} out of range")]
    ClassOutOfRange(usize),
}

/// Rows are true classes, columns predicted classes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; NUM_CLASSES]; NUM_CLASSES],
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..NUM_CLASSES).map(|i| self.counts[i][i]).sum()
    }

    pub fn support(&self, class: usize) -> u64 {
        self.counts[class].iter().sum()
    }

    pub fn predicted(&self, class: usize) -> u64 {
        self.counts.iter().map(|row| row[class]).sum()
    }
}

/// Which average the headline F1 refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    Macro,
    Weighted,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ClassScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Averaged {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub confusion: ConfusionMatrix,
    /// Indexed by class (positive, negative, neutral).
    pub per_class: [ClassScores; NUM_CLASSES],
    /// Unweighted mean over classes seen in either label vector.
    pub macro_avg: Averaged,
    /// Support-weighted mean.
    pub weighted_avg: Averaged,
    pub accuracy: f64,
    /// Number of ratios whose denominator was zero (and were set to 0).
    pub zero_division: u32,
    pub headline: Averaging,
}

impl MetricsReport {
    pub fn headline_avg(&self) -> Averaged {
        match self.headline {
            Averaging::Macro => self.macro_avg,
            Averaging::Weighted => self.weighted_avg,
        }
    }

    pub fn f1(&self) -> f64 {
        self.headline_avg().f1
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    /// Per-class detail followed by the averages.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<10} {:>9} {:>9} {:>9} {:>8}", "class", "precision", "recall", "f1", "support");
        for s in Sentiment::ALL {
            let c = &self.per_class[s.index()];
            let _ = writeln!(
                out,
                "{:<10} {:>9.4} {:>9.4} {:>9.4} {:>8}",
                s.as_str(),
                c.precision,
                c.recall,
                c.f1,
                c.support
            );
        }
        for (name, a) in [("macro", self.macro_avg), ("weighted", self.weighted_avg)] {
            let _ = writeln!(
                out,
                "{:<10} {:>9.4} {:>9.4} {:>9.4} {:>8}",
                name,
                a.precision,
                a.recall,
                a.f1,
                self.confusion.total()
            );
        }
        let _ = writeln!(out, "accuracy   {:.4}", self.accuracy);
        let _ = writeln!(out, "headline F1 average: {:?}", self.headline);
        out
    }
}

fn ratio(num: u64, den: u64, zero_division: &mut u32) -> f64 {
    if den == 0 {
        *zero_division += 1;
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Scores predicted class indices against true ones.
pub fn score(truth: &[usize], predicted: &[usize]) -> Result<MetricsReport, EvalError> {
    if truth.len() != predicted.len() {
        return Err(EvalError::LengthMismatch {
            truth: truth.len(),
            predicted: predicted.len(),
        });
    }
    if truth.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut confusion = ConfusionMatrix::default();
    for (&t, &p) in truth.iter().zip(predicted) {
        for c in [t, p] {
            if c >= NUM_CLASSES {
                return Err(EvalError::ClassOutOfRange(c));
            }
        }
        confusion.counts[t][p] += 1;
    }

    let mut zero_division = 0;
    let mut per_class = [ClassScores::default(); NUM_CLASSES];
    for (c, scores) in per_class.iter_mut().enumerate() {
        let tp = confusion.counts[c][c];
        let support = confusion.support(c);
        let precision = ratio(tp, confusion.predicted(c), &mut zero_division);
        let recall = ratio(tp, support, &mut zero_division);
        let f1 = if precision + recall == 0.0 {
            zero_division += 1;
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        *scores = ClassScores {
            precision,
            recall,
            f1,
            support,
        };
    }

    let present: Vec<usize> = (0..NUM_CLASSES)
        .filter(|&c| confusion.support(c) + confusion.predicted(c) > 0)
        .collect();
    let n = present.len() as f64;
    let macro_avg = Averaged {
        precision: present.iter().map(|&c| per_class[c].precision).sum::<f64>() / n,
        recall: present.iter().map(|&c| per_class[c].recall).sum::<f64>() / n,
        f1: present.iter().map(|&c| per_class[c].f1).sum::<f64>() / n,
    };
    let total = confusion.total() as f64;
    let weighted = |f: fn(&ClassScores) -> f64| per_class.iter().map(|s| s.support as f64 * f(s)).sum::<f64>() / total;
    let weighted_avg = Averaged {
        precision: weighted(|s| s.precision),
        recall: weighted(|s| s.recall),
        f1: weighted(|s| s.f1),
    };

    Ok(MetricsReport {
        confusion,
        per_class,
        macro_avg,
        weighted_avg,
        accuracy: confusion.trace() as f64 / total,
        zero_division,
        headline: Averaging::Weighted,
    })
}

pub fn score_labels(truth: &[Sentiment], predicted: &[Sentiment]) -> Result<MetricsReport, EvalError> {
    let t: Vec<usize> = truth.iter().map(|s| s.index()).collect();
    let p: Vec<usize> = predicted.iter().map(|s| s.index()).collect();
    score(&t, &p)
}

/// Aligned results table: one row per named run, values in percent.
pub fn results_table(rows: &[(String, &MetricsReport)]) -> String {
    let width = rows.iter().map(|(n, _)| n.len()).max().unwrap_or(0).max("Model".len());
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<width$}  {:>9}  {:>6}  {:>6}  {:>6}",
        "Model", "Precision", "Recall", "Acc.", "F1"
    );
    for (name, r) in rows {
        let a = r.headline_avg();
        let _ = writeln!(
            out,
            "{:<width$}  {:>9.2}  {:>6.2}  {:>6.2}  {:>6.2}",
            name,
            100.0 * a.precision,
            100.0 * a.recall,
            100.0 * r.accuracy,
            100.0 * a.f1
        );
    }
    out
}
