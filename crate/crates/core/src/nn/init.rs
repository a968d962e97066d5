//! Seeded parameter initialisation.

use rand::Rng;

use crate::tensor::Tensor;

/// Uniform in `±√(6 / (fan_in + fan_out))`.
pub fn glorot_uniform<R: Rng>(rng: &mut R, shape: &[usize], fan_in: usize, fan_out: usize) -> Tensor {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    uniform(rng, shape, limit)
}

/// Uniform in `±limit`.
pub fn uniform<R: Rng>(rng: &mut R, shape: &[usize], limit: f64) -> Tensor {
    let mut t = Tensor::zeros(shape);
    for x in t.data_mut() {
        *x = rng.random_range(-limit..=limit);
    }
    t
}
