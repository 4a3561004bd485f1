use serde::{Deserialize, Serialize};

use super::ParamStore;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    /// Coupled L2: `weight_decay · θ` is added to the gradient.
    pub weight_decay: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            lr: 0.005,
            weight_decay: 5e-4,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// One bias-corrected Adam update of every parameter; gradients are zeroed
/// afterwards.
pub fn adam_step(params: &mut ParamStore, cfg: &AdamConfig) {
    for p in params.iter_mut() {
        p.step += 1;
        let t = p.step as i32;
        let c1 = 1.0 - cfg.beta1.powi(t);
        let c2 = 1.0 - cfg.beta2.powi(t);
        let values = p.value.values_mut();
        let grads = p.grad.values_mut();
        let m = p.first_moment.values_mut();
        let v = p.second_moment.values_mut();
        for i in 0..values.len() {
            let g = grads[i] + cfg.weight_decay * values[i];
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
            let m_hat = m[i] / c1;
            let v_hat = v[i] / c2;
            values[i] -= cfg.lr * m_hat / (v_hat.sqrt() + cfg.eps);
            grads[i] = 0.0;
        }
    }
}
