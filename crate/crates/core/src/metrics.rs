//! Character-offset F1, averaged per comment.

use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::OffsetSet;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("gold has {gold} comments but predictions have {pred}")]
    LengthMismatch { gold: usize, pred: usize },
    #[error("cannot average over an empty corpus")]
    EmptyCorpus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub per_comment_f1: Vec<f64>,
    pub mean_f1: f64,
    pub empty_gold: usize,
    pub empty_pred: usize,
}

/// F1 between two offset sets. Both empty scores 1, exactly one empty
/// scores 0.
pub fn comment_f1(gold: &OffsetSet, pred: &OffsetSet) -> f64 {
    match (gold.is_empty(), pred.is_empty()) {
        (true, true) => return 1.0,
        (true, false) | (false, true) => return 0.0,
        _ => {}
    }
    let hits = gold.intersection_len(pred) as f64;
    let precision = hits / pred.len() as f64;
    let recall = hits / gold.len() as f64;
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Same contract as [`comment_f1`], computed by walking every character
/// index up to the largest offset and counting membership.
pub fn brute_force_f1(gold: &OffsetSet, pred: &OffsetSet) -> f64 {
    let upper = gold.last().into_iter().chain(pred.last()).max().map_or(0, |m| m + 1);
    let (mut tp, mut fp, mut fn_) = (0u64, 0u64, 0u64);
    for i in 0..upper {
        match (gold.contains(i), pred.contains(i)) {
            (true, true) => tp += 1,
            (false, true) => fp += 1,
            (true, false) => fn_ += 1,
            (false, false) => {}
        }
    }
    if tp + fp == 0 && tp + fn_ == 0 {
        return 1.0;
    }
    if tp + fp == 0 || tp + fn_ == 0 || tp == 0 {
        return 0.0;
    }
    let p = tp as f64 / (tp + fp) as f64;
    let r = tp as f64 / (tp + fn_) as f64;
    2.0 * p * r / (p + r)
}

pub fn evaluate_corpus(golds: &[OffsetSet], preds: &[OffsetSet]) -> Result<EvalResult, MetricsError> {
    if golds.len() != preds.len() {
        return Err(MetricsError::LengthMismatch { gold: golds.len(), pred: preds.len() });
    }
    if golds.is_empty() {
        return Err(MetricsError::EmptyCorpus);
    }
    let per_comment_f1: Vec<f64> = golds.par_iter().zip(preds).map(|(g, p)| comment_f1(g, p)).collect();
    let mean_f1 = per_comment_f1.iter().sum::<f64>() / per_comment_f1.len() as f64;
    Ok(EvalResult {
        mean_f1,
        empty_gold: golds.iter().filter(|g| g.is_empty()).count(),
        empty_pred: preds.iter().filter(|p| p.is_empty()).count(),
        per_comment_f1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> OffsetSet {
        v.iter().copied().collect()
    }

    #[test]
    fn examples() {
        assert_eq!(comment_f1(&set(&[1, 2]), &set(&[1, 2])), 1.0);
        let f = comment_f1(&OffsetSet::from(0..=9), &OffsetSet::from(0..=4));
        assert!((f - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(comment_f1(&set(&[]), &set(&[])), 1.0);
        assert_eq!(comment_f1(&set(&[]), &set(&[1])), 0.0);
        assert_eq!(comment_f1(&set(&[1]), &set(&[])), 0.0);
        assert_eq!(comment_f1(&set(&[1]), &set(&[2])), 0.0);
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(brute_force_f1(&set(&[]), &set(&[])), 1.0);
        assert_eq!(brute_force_f1(&set(&[1, 2]), &set(&[3, 4])), 0.0);
        assert!((brute_force_f1(&OffsetSet::from(0..=9), &OffsetSet::from(0..=4)) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn corpus_mean() {
        let r = evaluate_corpus(&[set(&[1]), set(&[1])], &[set(&[1]), set(&[])]).unwrap();
        assert_eq!(r.mean_f1, 0.5);
        assert_eq!(r.per_comment_f1, vec![1.0, 0.0]);
        assert_eq!((r.empty_gold, r.empty_pred), (0, 1));
        assert_eq!(evaluate_corpus(&[], &[]), Err(MetricsError::EmptyCorpus));
        assert_eq!(
            evaluate_corpus(&[set(&[])], &[]),
            Err(MetricsError::LengthMismatch { gold: 1, pred: 0 })
        );
        let all = vec![set(&[1, 2]), set(&[])];
        assert_eq!(evaluate_corpus(&all, &all).unwrap().mean_f1, 1.0);
    }
}
