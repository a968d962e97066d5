//! Forward and backward passes of the primitive ops on a tiny input.

use hcms::tensor::{ops, Tensor};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // three tokens, two-dimensional embeddings
    let x = Tensor::from_rows(&[vec![1.0, -1.0], vec![0.5, 2.0], vec![-0.5, 0.0]])?;
    // one filter of width two
    let w = Tensor::new(vec![1, 2, 2], vec![0.5, 0.5, -1.0, 1.0])?;
    let b = Tensor::vector(vec![0.1]);

    let c = ops::relu(&ops::conv1d(&x, &w, &b, 1)?);
    println!("conv + relu  -> {:?}", c.data());

    let pooled = ops::maxpool1d(&c, 2, 1)?;
    println!("maxpool      -> {:?}", pooled.data());

    let p = ops::softmax(&Tensor::vector(vec![2.0, 1.0, 0.1]));
    println!("softmax      -> {:?} (sum {})", p.data(), p.sum());

    let dp = Tensor::vector(vec![1.0, 0.0, 0.0]);
    println!("softmax grad -> {:?}", ops::softmax_backward(&p, &dp)?.data());

    let ones = Tensor::vector(vec![1.0, 1.0]).reshape(vec![2, 1])?;
    let grads = ops::conv1d_backward(&x, &w, 1, &ones)?;
    println!("d filters    -> {:?}", grads.filters.data());
    Ok(())
}
