//! Pairwise additive self-attention over a short feature sequence.

use hcms::nn::{ScoreActivation, SelfAttention};
use hcms::tensor::Tensor;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let layer = SelfAttention::new(&mut rng, 3, 4, false, ScoreActivation::Sigmoid);
    let c = Tensor::from_rows(&[
        vec![1.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0],
        vec![0.0, 0.0, 1.0],
        vec![1.0, 1.0, 0.0],
    ])?;
    let (a, cache) = layer.forward(&c)?;
    println!("attention weights (row t attends over t' != t):");
    for t in 0..c.rows() {
        let row: Vec<String> = cache.weights().row(t).iter().map(|w| format!("{w:.3}")).collect();
        println!("  t={t}: [{}]", row.join(", "));
    }
    println!("context vectors:");
    for t in 0..a.rows() {
        println!("  a_{t} = {:?}", a.row(t));
    }
    Ok(())
}
