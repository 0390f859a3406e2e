//! Adam with bias correction.

use serde::{Deserialize, Serialize};

use crate::encoder::{EncoderConfig, Parameters, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig { learning_rate: 1e-5, beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }
}

/// First and second moment estimates plus the number of steps taken.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState<F> {
    pub first_moment: Parameters<F>,
    pub second_moment: Parameters<F>,
    pub step: u64,
}

impl<F: Scalar> AdamState<F> {
    pub fn new(config: &EncoderConfig) -> Self {
        AdamState { first_moment: Parameters::zeros(config), second_moment: Parameters::zeros(config), step: 0 }
    }
}

/// Updates one flat tensor in place. `step` is the 1-based index of the
/// step being taken.
pub fn adam_update<F: Scalar>(param: &mut [F], grad: &[F], m: &mut [F], v: &mut [F], step: u64, cfg: &AdamConfig) {
    let b1 = F::from_f64(cfg.beta1);
    let b2 = F::from_f64(cfg.beta2);
    let one = F::one();
    let lr = F::from_f64(cfg.learning_rate);
    let eps = F::from_f64(cfg.eps);
    let bc1 = one - F::from_f64(cfg.beta1.powi(step as i32));
    let bc2 = one - F::from_f64(cfg.beta2.powi(step as i32));
    for (((p, &g), m), v) in param.iter_mut().zip(grad).zip(m.iter_mut()).zip(v.iter_mut()) {
        *m = b1 * *m + (one - b1) * g;
        *v = b2 * *v + (one - b2) * g * g;
        let m_hat = *m / bc1;
        let v_hat = *v / bc2;
        *p -= lr * m_hat / (v_hat.sqrt() + eps);
    }
}

pub fn adam_step<F: Scalar>(params: &mut Parameters<F>, grads: &Parameters<F>, state: &mut AdamState<F>, cfg: &AdamConfig) {
    state.step += 1;
    let step = state.step;
    let tensors = params
        .tensors_mut()
        .into_iter()
        .zip(grads.tensors())
        .zip(state.first_moment.tensors_mut())
        .zip(state.second_moment.tensors_mut());
    for (((p, g), m), v) in tensors {
        adam_update(p.data, g.data, m.data, v.data, step, cfg);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::init_parameters;

    #[test]
    fn first_step_moves_by_lr_times_sign() {
        let cfg = AdamConfig { learning_rate: 0.01, ..Default::default() };
        for g in [0.5f64, -2.0, 1e-3] {
            let (mut p, mut m, mut v) = ([1.0f64], [0.0], [0.0]);
            adam_update(&mut p, &[g], &mut m, &mut v, 1, &cfg);
            let expected = 1.0 - 0.01 * g / (g.abs() + 1e-8);
            assert!((p[0] - expected).abs() < 1e-15, "g={g}");
        }
    }

    #[test]
    fn matches_five_step_scalar_trace() {
        let cfg = AdamConfig { learning_rate: 0.1, beta1: 0.9, beta2: 0.999, eps: 1e-8 };
        let grads = [0.3f64, -0.1, 0.25, 0.0, -0.6];
        // Trace computed by hand from the update rule.
        let (mut tp, mut tm, mut tv) = (0.5f64, 0.0f64, 0.0f64);
        let (mut p, mut m, mut v) = ([0.5f64], [0.0f64], [0.0f64]);
        for (i, &g) in grads.iter().enumerate() {
            let t = (i + 1) as i32;
            tm = 0.9 * tm + 0.1 * g;
            tv = 0.999 * tv + 0.001 * g * g;
            let mh = tm / (1.0 - 0.9f64.powi(t));
            let vh = tv / (1.0 - 0.999f64.powi(t));
            tp -= 0.1 * mh / (vh.sqrt() + 1e-8);
            adam_update(&mut p, &[g], &mut m, &mut v, t as u64, &cfg);
            assert!((p[0] - tp).abs() < 1e-10, "step {t}");
        }
    }

    #[test]
    fn zero_gradient_leaves_parameters_unchanged() {
        let cfg = EncoderConfig::new(10, 4, 1, 2, 4);
        let mut p = init_parameters::<f64>(&cfg, 0);
        let before = p.clone();
        let zeros = p.zeros_like();
        let mut state = AdamState::new(&cfg);
        adam_step(&mut p, &zeros, &mut state, &AdamConfig::default());
        assert_eq!(p, before);
        assert_eq!(state.step, 1);
    }

    #[test]
    fn identical_inputs_give_identical_results() {
        let cfg = EncoderConfig::new(10, 4, 1, 2, 4);
        let p0 = init_parameters::<f32>(&cfg, 0);
        let g = init_parameters::<f32>(&cfg, 1);
        let run = || {
            let mut p = p0.clone();
            let mut s = AdamState::new(&cfg);
            adam_step(&mut p, &g, &mut s, &AdamConfig::default());
            (p, s)
        };
        assert_eq!(run(), run());
    }
}
