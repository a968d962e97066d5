use super::OptimizerConfig;
use crate::tensor::Parameter;

/// One bias-corrected Adam update of `p` from its accumulated gradient,
/// which is zeroed afterwards.
pub fn adam_step(p: &mut Parameter, cfg: &OptimizerConfig) {
    p.step += 1;
    let t = p.step as i32;
    let c1 = 1.0 - cfg.beta1.powi(t);
    let c2 = 1.0 - cfg.beta2.powi(t);
    let g = p.grad.data();
    let value = p.value.data_mut();
    let m = p.m.data_mut();
    let v = p.v.data_mut();
    for i in 0..g.len() {
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
        let m_hat = m[i] / c1;
        let v_hat = v[i] / c2;
        value[i] -= cfg.lr * m_hat / (v_hat.sqrt() + cfg.epsilon);
    }
    p.zero_grad();
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Tensor;

    #[test]
    fn zero_gradient_leaves_value() {
        let mut p = Parameter::new(Tensor::vector(vec![1.5, -2.0]));
        adam_step(&mut p, &OptimizerConfig::default());
        assert_eq!(p.value.data(), &[1.5, -2.0]);
        assert_eq!(p.step, 1);
    }

    #[test]
    fn first_step_magnitude() {
        let cfg = OptimizerConfig::default();
        let mut p = Parameter::new(Tensor::vector(vec![0.0]));
        p.grad.data_mut()[0] = 1.0;
        adam_step(&mut p, &cfg);
        let expected = 0.01 / (1.0 + 1e-7);
        assert!((p.value.data()[0] + expected).abs() < 1e-15);
        assert_eq!(p.grad.data(), &[0.0]);
    }

    #[test]
    fn bias_correction_after_two_steps() {
        let cfg = OptimizerConfig::default();
        let g = 0.37;
        let mut p = Parameter::new(Tensor::vector(vec![0.0]));
        for _ in 0..2 {
            p.grad.data_mut()[0] = g;
            adam_step(&mut p, &cfg);
        }
        assert_eq!(p.step, 2);
        let v_hat = p.v.data()[0] / (1.0 - cfg.beta2.powi(2));
        assert!((v_hat - g * g).abs() < 1e-16);
        let m_hat = p.m.data()[0] / (1.0 - cfg.beta1.powi(2));
        assert!((m_hat - g).abs() < 1e-16);
    }
}
