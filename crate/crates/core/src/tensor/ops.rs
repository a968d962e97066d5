//! Forward and backward kernels.
//!
//! Backward functions take the forward inputs (or outputs, where cheaper)
//! plus the upstream gradient and return gradients for each input.

use super::{Tensor, TensorError};

fn expect_ndim(op: &'static str, t: &Tensor, ndim: usize) -> Result<(), TensorError> {
    if t.ndim() != ndim {
        return Err(TensorError::InvalidArgument(format!(
            "{op}: expected a {ndim}-D tensor, got shape {:?}",
            t.shape()
        )));
    }
    Ok(())
}

fn same_shape(op: &'static str, a: &Tensor, b: &Tensor) -> Result<(), TensorError> {
    if a.shape() != b.shape() {
        return Err(TensorError::Dimension {
            op,
            left: a.shape().to_vec(),
            right: b.shape().to_vec(),
        });
    }
    Ok(())
}

/// `a[m×k] · b[k×n]`.
pub fn matmul(a: &Tensor, b: &Tensor) -> Result<Tensor, TensorError> {
    expect_ndim("matmul", a, 2)?;
    expect_ndim("matmul", b, 2)?;
    let (m, k) = (a.shape()[0], a.shape()[1]);
    let (k2, n) = (b.shape()[0], b.shape()[1]);
    if k != k2 {
        return Err(TensorError::Dimension {
            op: "matmul",
            left: a.shape().to_vec(),
            right: b.shape().to_vec(),
        });
    }
    let mut out = vec![0.0; m * n];
    let (ad, bd) = (a.data(), b.data());
    for i in 0..m {
        let orow = &mut out[i * n..(i + 1) * n];
        for p in 0..k {
            let av = ad[i * k + p];
            if av == 0.0 {
                continue;
            }
            for (o, &bv) in orow.iter_mut().zip(&bd[p * n..(p + 1) * n]) {
                *o += av * bv;
            }
        }
    }
    Tensor::new(vec![m, n], out)
}

pub fn transpose(a: &Tensor) -> Result<Tensor, TensorError> {
    expect_ndim("transpose", a, 2)?;
    let (m, n) = (a.shape()[0], a.shape()[1]);
    let mut out = vec![0.0; m * n];
    for i in 0..m {
        for j in 0..n {
            out[j * m + i] = a.data()[i * n + j];
        }
    }
    Tensor::new(vec![n, m], out)
}

/// Returns `(dA, dB) = (dOut·bᵀ, aᵀ·dOut)`.
pub fn matmul_backward(
    a: &Tensor,
    b: &Tensor,
    dout: &Tensor,
) -> Result<(Tensor, Tensor), TensorError> {
    let da = matmul(dout, &transpose(b)?)?;
    let db = matmul(&transpose(a)?, dout)?;
    Ok((da, db))
}

/// Number of sliding windows of width `window` over `len` positions.
pub fn window_count(len: usize, window: usize, stride: usize) -> Option<usize> {
    if stride == 0 || window == 0 || len < window {
        None
    } else {
        Some((len - window) / stride + 1)
    }
}

fn conv_dims(
    input: &Tensor,
    filters: &Tensor,
    bias: &Tensor,
    stride: usize,
) -> Result<(usize, usize, usize, usize, usize), TensorError> {
    expect_ndim("conv1d", input, 2)?;
    expect_ndim("conv1d", filters, 3)?;
    let (u, d) = (input.shape()[0], input.shape()[1]);
    let (f, k, fd) = (filters.shape()[0], filters.shape()[1], filters.shape()[2]);
    if fd != d {
        return Err(TensorError::Dimension {
            op: "conv1d",
            left: input.shape().to_vec(),
            right: filters.shape().to_vec(),
        });
    }
    if bias.shape() != [f] {
        return Err(TensorError::Dimension {
            op: "conv1d bias",
            left: filters.shape().to_vec(),
            right: bias.shape().to_vec(),
        });
    }
    if stride == 0 {
        return Err(TensorError::InvalidArgument("conv1d: stride must be >= 1".into()));
    }
    let v = window_count(u, k, stride).ok_or(TensorError::SequenceTooShort { len: u, needed: k })?;
    Ok((u, d, f, k, v))
}

/// Valid 1-D convolution of `input[u×d]` with `filters[f×k×d]` → `[v×f]`,
/// `v = ⌊(u − k)/stride⌋ + 1`.
pub fn conv1d(
    input: &Tensor,
    filters: &Tensor,
    bias: &Tensor,
    stride: usize,
) -> Result<Tensor, TensorError> {
    let (_, d, f, k, v) = conv_dims(input, filters, bias, stride)?;
    let window = k * d;
    let (x, w) = (input.data(), filters.data());
    let mut out = vec![0.0; v * f];
    for t in 0..v {
        // a window is a contiguous run of k rows
        let xs = &x[t * stride * d..t * stride * d + window];
        for j in 0..f {
            let ws = &w[j * window..(j + 1) * window];
            out[t * f + j] = xs.iter().zip(ws).map(|(a, b)| a * b).sum::<f64>() + bias.data()[j];
        }
    }
    Tensor::new(vec![v, f], out)
}

#[derive(Debug, Clone)]
pub struct Conv1dGrads {
    pub input: Tensor,
    pub filters: Tensor,
    pub bias: Tensor,
}

pub fn conv1d_backward(
    input: &Tensor,
    filters: &Tensor,
    stride: usize,
    dout: &Tensor,
) -> Result<Conv1dGrads, TensorError> {
    let f = filters.shape()[0];
    let bias = Tensor::zeros(&[f]);
    let (u, d, f, k, v) = conv_dims(input, filters, &bias, stride)?;
    if dout.shape() != [v, f] {
        return Err(TensorError::Dimension {
            op: "conv1d_backward",
            left: vec![v, f],
            right: dout.shape().to_vec(),
        });
    }
    let window = k * d;
    let (x, w, g) = (input.data(), filters.data(), dout.data());
    let mut dx = vec![0.0; u * d];
    let mut dw = vec![0.0; f * window];
    let mut db = vec![0.0; f];
    for t in 0..v {
        let base = t * stride * d;
        for j in 0..f {
            let gj = g[t * f + j];
            if gj == 0.0 {
                continue;
            }
            db[j] += gj;
            let ws = &w[j * window..(j + 1) * window];
            let dws = &mut dw[j * window..(j + 1) * window];
            for i in 0..window {
                dws[i] += gj * x[base + i];
                dx[base + i] += gj * ws[i];
            }
        }
    }
    Ok(Conv1dGrads {
        input: Tensor::new(vec![u, d], dx)?,
        filters: Tensor::new(filters.shape().to_vec(), dw)?,
        bias: Tensor::new(vec![f], db)?,
    })
}

pub fn relu(x: &Tensor) -> Tensor {
    x.map(|v| v.max(0.0))
}

/// Passes `dout` where `x > 0`; the subgradient at exactly 0 is 0.
pub fn relu_backward(x: &Tensor, dout: &Tensor) -> Result<Tensor, TensorError> {
    same_shape("relu_backward", x, dout)?;
    let data = x
        .data()
        .iter()
        .zip(dout.data())
        .map(|(&xv, &g)| if xv > 0.0 { g } else { 0.0 })
        .collect();
    Tensor::new(x.shape().to_vec(), data)
}

fn pool_dims(input: &Tensor, pool: usize, stride: usize) -> Result<(usize, usize, usize), TensorError> {
    expect_ndim("maxpool1d", input, 2)?;
    if pool == 0 || stride == 0 {
        return Err(TensorError::InvalidArgument(
            "maxpool1d: pool and stride must be >= 1".into(),
        ));
    }
    let (v, f) = (input.shape()[0], input.shape()[1]);
    let out = window_count(v, pool, stride).ok_or(TensorError::SequenceTooShort {
        len: v,
        needed: pool,
    })?;
    Ok((v, f, out))
}

/// Row index of the window maximum for channel `j`; first index wins ties.
fn window_argmax(input: &Tensor, start: usize, pool: usize, j: usize) -> usize {
    let f = input.shape()[1];
    let x = input.data();
    let mut best = start;
    for r in start + 1..start + pool {
        if x[r * f + j] > x[best * f + j] {
            best = r;
        }
    }
    best
}

/// Per-channel max over windows of `pool` rows: `[v×f]` → `[v'×f]`.
pub fn maxpool1d(input: &Tensor, pool: usize, stride: usize) -> Result<Tensor, TensorError> {
    let (_, f, out_len) = pool_dims(input, pool, stride)?;
    let mut out = vec![0.0; out_len * f];
    for t in 0..out_len {
        for j in 0..f {
            let r = window_argmax(input, t * stride, pool, j);
            out[t * f + j] = input.data()[r * f + j];
        }
    }
    Tensor::new(vec![out_len, f], out)
}

/// Routes each window's gradient to its (first) argmax row.
pub fn maxpool1d_backward(
    input: &Tensor,
    pool: usize,
    stride: usize,
    dout: &Tensor,
) -> Result<Tensor, TensorError> {
    let (v, f, out_len) = pool_dims(input, pool, stride)?;
    if dout.shape() != [out_len, f] {
        return Err(TensorError::Dimension {
            op: "maxpool1d_backward",
            left: vec![out_len, f],
            right: dout.shape().to_vec(),
        });
    }
    let mut dx = vec![0.0; v * f];
    for t in 0..out_len {
        for j in 0..f {
            let r = window_argmax(input, t * stride, pool, j);
            dx[r * f + j] += dout.data()[t * f + j];
        }
    }
    Tensor::new(vec![v, f], dx)
}

/// Numerically stable softmax over all elements of `x` (max-subtracted).
pub fn softmax(x: &Tensor) -> Tensor {
    let mut out = x.clone();
    softmax_in_place(out.data_mut());
    out
}

pub(crate) fn softmax_in_place(xs: &mut [f64]) {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for x in xs.iter_mut() {
        *x = (*x - max).exp();
        total += *x;
    }
    for x in xs.iter_mut() {
        *x /= total;
    }
}

/// Jacobian-vector product of softmax given its output `y`:
/// `dx = y ⊙ (dy − ⟨y, dy⟩)`.
pub fn softmax_backward(y: &Tensor, dy: &Tensor) -> Result<Tensor, TensorError> {
    same_shape("softmax_backward", y, dy)?;
    let mut out = y.clone();
    softmax_backward_slice(y.data(), dy.data(), out.data_mut());
    Ok(out)
}

pub(crate) fn softmax_backward_slice(y: &[f64], dy: &[f64], out: &mut [f64]) {
    let dot: f64 = y.iter().zip(dy).map(|(a, b)| a * b).sum();
    for ((o, &yv), &g) in out.iter_mut().zip(y).zip(dy) {
        *o = yv * (g - dot);
    }
}

pub fn add(a: &Tensor, b: &Tensor) -> Result<Tensor, TensorError> {
    same_shape("add", a, b)?;
    let mut out = a.clone();
    out.add_assign(b)?;
    Ok(out)
}

/// The gradient of a sum flows unchanged to both operands.
pub fn add_backward(dout: &Tensor) -> (Tensor, Tensor) {
    (dout.clone(), dout.clone())
}

pub fn scale(x: &Tensor, s: f64) -> Tensor {
    x.map(|v| v * s)
}

pub fn scale_backward(dout: &Tensor, s: f64) -> Tensor {
    dout.map(|g| g * s)
}

pub fn tanh(x: &Tensor) -> Tensor {
    x.map(f64::tanh)
}

/// Takes the forward output `y = tanh(x)`.
pub fn tanh_backward(y: &Tensor, dout: &Tensor) -> Result<Tensor, TensorError> {
    zip_map("tanh_backward", y, dout, |y, g| g * (1.0 - y * y))
}

pub fn sigmoid_scalar(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub fn sigmoid(x: &Tensor) -> Tensor {
    x.map(sigmoid_scalar)
}

/// Takes the forward output `y = σ(x)`.
pub fn sigmoid_backward(y: &Tensor, dout: &Tensor) -> Result<Tensor, TensorError> {
    zip_map("sigmoid_backward", y, dout, |y, g| g * y * (1.0 - y))
}

fn zip_map(
    op: &'static str,
    a: &Tensor,
    b: &Tensor,
    f: impl Fn(f64, f64) -> f64,
) -> Result<Tensor, TensorError> {
    same_shape(op, a, b)?;
    let data = a.data().iter().zip(b.data()).map(|(&x, &y)| f(x, y)).collect();
    Tensor::new(a.shape().to_vec(), data)
}

/// Concatenates the flattened parts into one vector.
pub fn concat(parts: &[Tensor]) -> Result<Tensor, TensorError> {
    if parts.is_empty() {
        return Err(TensorError::InvalidArgument("concat of zero tensors".into()));
    }
    let data: Vec<f64> = parts.iter().flat_map(|p| p.data().iter().copied()).collect();
    Tensor::new(vec![data.len()], data)
}

/// Splits `dout` back into segments shaped like the concatenated parts.
pub fn concat_backward(dout: &Tensor, shapes: &[Vec<usize>]) -> Result<Vec<Tensor>, TensorError> {
    let total: usize = shapes.iter().map(|s| s.iter().product::<usize>()).sum();
    if total != dout.len() {
        return Err(TensorError::Dimension {
            op: "concat_backward",
            left: vec![total],
            right: dout.shape().to_vec(),
        });
    }
    let mut offset = 0;
    shapes
        .iter()
        .map(|s| {
            let n: usize = s.iter().product();
            let seg = dout.data()[offset..offset + n].to_vec();
            offset += n;
            Tensor::new(s.clone(), seg)
        })
        .collect()
}
