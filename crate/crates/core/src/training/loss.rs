//! Label-smoothed cross-entropy.

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::encoder::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossConfig {
    /// Probability mass moved off the correct class, in `[0, 1)`.
    pub epsilon: f64,
}

/// `1 - epsilon` on `label`, `epsilon / (classes - 1)` everywhere else.
pub fn smoothed_targets<F: Scalar>(label: usize, classes: usize, epsilon: f64) -> Vec<F> {
    assert!(label < classes, "label {label} outside 0..{classes}");
    let other = if classes > 1 { epsilon / (classes - 1) as f64 } else { 0.0 };
    (0..classes)
        .map(|c| F::from_f64(if c == label { 1.0 - epsilon } else { other }))
        .collect()
}

/// Mean over unmasked rows of `-sum_c target_c * log_softmax(logits)_c`.
/// Zero when every row is masked.
pub fn smoothed_ce_loss<F: Scalar>(logits: ArrayView2<F>, labels: &[usize], mask: &[bool], epsilon: f64) -> F {
    assert_eq!(logits.nrows(), labels.len());
    assert_eq!(logits.nrows(), mask.len());
    let classes = logits.ncols();
    let mut total = F::zero();
    let mut count = 0usize;
    for ((row, &label), &m) in logits.rows().into_iter().zip(labels).zip(mask) {
        if !m {
            continue;
        }
        let (log_probs, _) = crate::encoder::log_softmax_row(row);
        let target = smoothed_targets::<F>(label, classes, epsilon);
        total -= target.iter().zip(&log_probs).map(|(&t, &lp)| t * lp).sum::<F>();
        count += 1;
    }
    if count == 0 {
        F::zero()
    } else {
        total / F::from_f64(count as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    /// Plain cross-entropy written directly from the definition.
    fn plain_ce(logits: &[[f64; 3]], labels: &[usize]) -> f64 {
        let mut total = 0.0;
        for (row, &y) in logits.iter().zip(labels) {
            let z: f64 = row.iter().map(|v| v.exp()).sum();
            total += -(row[y].exp() / z).ln();
        }
        total / logits.len() as f64
    }

    #[test]
    fn target_examples() {
        assert_eq!(smoothed_targets::<f64>(0, 2, 0.1), vec![0.9, 0.1]);
        assert_eq!(smoothed_targets::<f64>(1, 2, 0.0), vec![0.0, 1.0]);
        let t = smoothed_targets::<f64>(1, 3, 0.3);
        assert!((t[0] - 0.15).abs() < 1e-15 && (t[1] - 0.7).abs() < 1e-15 && (t[2] - 0.15).abs() < 1e-15);
        assert!((t.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn uniform_logits_cost_ln2_for_any_epsilon() {
        let logits = array![[0.5f64, 0.5], [-2.0, -2.0]];
        for eps in [0.0, 0.1, 0.5, 0.9] {
            let l = smoothed_ce_loss(logits.view(), &[0, 1], &[true, true], eps);
            assert!((l - std::f64::consts::LN_2).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_epsilon_is_plain_cross_entropy() {
        let rows = [[1.0, -0.5, 2.0], [0.1, 0.2, 0.3], [-3.0, 4.0, 0.0]];
        let labels = [2, 0, 1];
        let logits = ndarray::Array2::from_shape_fn((3, 3), |(i, j)| rows[i][j]);
        let got = smoothed_ce_loss(logits.view(), &labels, &[true; 3], 0.0);
        assert!((got - plain_ce(&rows, &labels)).abs() < 1e-12);
    }

    #[test]
    fn confident_correct_logits_approach_zero() {
        let logits = array![[40.0f64, -40.0]];
        assert!(smoothed_ce_loss(logits.view(), &[0], &[true], 0.0) < 1e-30);
    }

    #[test]
    fn masked_rows_do_not_count() {
        let logits = array![[0.0f64, 0.0], [100.0, -100.0]];
        let l = smoothed_ce_loss(logits.view(), &[0, 1], &[true, false], 0.0);
        assert!((l - std::f64::consts::LN_2).abs() < 1e-12);
        assert_eq!(smoothed_ce_loss(logits.view(), &[0, 1], &[false, false], 0.1), 0.0);
    }
}
