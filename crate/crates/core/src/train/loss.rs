//! Categorical cross-entropy against one-hot targets.

use super::TrainError;
use crate::nn::NUM_CLASSES;
use crate::tensor::Tensor;

/// Probabilities are floored here before the log.
pub const PROB_FLOOR: f64 = 1e-12;

pub fn one_hot(class: usize) -> Tensor {
    let mut t = Tensor::zeros(&[NUM_CLASSES]);
    t.data_mut()[class] = 1.0;
    t
}

/// Class index of a one-hot target.
pub fn target_class(target: &Tensor) -> Result<usize, TrainError> {
    let ones = target.data().iter().filter(|&&x| x == 1.0).count();
    let zeros = target.data().iter().filter(|&&x| x == 0.0).count();
    if ones != 1 || ones + zeros != target.len() {
        return Err(TrainError::Label(format!("target {:?} is not one-hot", target.data())));
    }
    Ok(target.data().iter().position(|&x| x == 1.0).expect("one entry is 1"))
}

/// `−Σ y ⊙ log(max(p, floor))`.
pub fn cross_entropy(target: &Tensor, probs: &Tensor) -> Result<f64, TrainError> {
    if target.shape() != probs.shape() {
        return Err(TrainError::Label(format!(
            "target shape {:?} does not match prediction shape {:?}",
            target.shape(),
            probs.shape()
        )));
    }
    let class = target_class(target)?;
    Ok(class_cross_entropy(class, probs))
}

pub fn class_cross_entropy(class: usize, probs: &Tensor) -> f64 {
    -probs.data()[class].max(PROB_FLOOR).ln()
}

/// Gradient with respect to the probabilities: `−y / max(p, floor)`.
pub fn cross_entropy_backward(target: &Tensor, probs: &Tensor) -> Tensor {
    let data = target
        .data()
        .iter()
        .zip(probs.data())
        .map(|(&y, &p)| if y == 0.0 { 0.0 } else { -y / p.max(PROB_FLOOR) })
        .collect();
    Tensor::new(probs.shape().to_vec(), data).expect("same shape")
}

/// Gradient with respect to the pre-softmax logits: `p − y`.
pub fn fused_logit_grad(class: usize, probs: &Tensor) -> Tensor {
    let mut g = probs.clone();
    g.data_mut()[class] -= 1.0;
    g
}
