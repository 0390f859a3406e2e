//! Training loop: label-smoothed cross-entropy, Adam, and per-epoch
//! evaluation on a held-out trial corpus. The epoch with the best trial F1
//! is kept.

pub mod adam;
pub mod loss;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Comment, OffsetSet};
use crate::encoder::{backward, init_parameters, EncoderConfig, EncoderError, Mode, Parameters, Scalar};
use crate::metrics::{evaluate_corpus, MetricsError};
use crate::pipeline::{chunk_comments, collate, predict_corpus, EncodedComment};
use crate::tokenizer::Vocab;

pub use adam::{adam_step, adam_update, AdamConfig, AdamState};
pub use loss::{smoothed_ce_loss, smoothed_targets, LossConfig};

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("training corpus has no tokens")]
    EmptyTrainCorpus,
    #[error("trial corpus is empty")]
    EmptyTrialCorpus,
    #[error("vocabulary has {vocab} pieces but the encoder expects {config}")]
    VocabMismatch { vocab: usize, config: usize },
    #[error(transparent)]
    Encoder(#[from] EncoderError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epsilon: f64,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub num_epochs: usize,
    /// Replaces the encoder's dropout rate when set.
    pub dropout: Option<f64>,
    pub seed: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub adam_eps: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epsilon: 0.1,
            learning_rate: 1e-5,
            batch_size: 8,
            num_epochs: 8,
            dropout: Some(0.25),
            seed: 0,
            beta1: 0.9,
            beta2: 0.999,
            adam_eps: 1e-8,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |m: String| Err(TrainError::InvalidConfig(m));
        if !(0.0..1.0).contains(&self.epsilon) {
            return bad(format!("epsilon {} outside [0, 1)", self.epsilon));
        }
        if self.batch_size == 0 {
            return bad("batch_size must be at least 1".into());
        }
        if self.num_epochs == 0 {
            return bad("num_epochs must be at least 1".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning_rate {} must be positive", self.learning_rate));
        }
        if let Some(p) = self.dropout {
            if !(0.0..1.0).contains(&p) {
                return bad(format!("dropout {p} outside [0, 1)"));
            }
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return bad("adam betas must be in [0, 1)".into());
        }
        Ok(())
    }

    pub fn adam(&self) -> AdamConfig {
        AdamConfig { learning_rate: self.learning_rate, beta1: self.beta1, beta2: self.beta2, eps: self.adam_eps }
    }

    /// The encoder config with this run's dropout override applied.
    pub fn apply_to(&self, model: &EncoderConfig) -> EncoderConfig {
        let mut model = model.clone();
        if let Some(p) = self.dropout {
            model.dropout = p;
        }
        model
    }
}

/// The selected snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint<F> {
    pub config: EncoderConfig,
    pub params: Parameters<F>,
    /// 1-based.
    pub epoch: usize,
    pub trial_f1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    /// 1-based.
    pub epoch: usize,
    pub mean_loss: f64,
    pub trial_f1: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome<F> {
    pub best: Checkpoint<F>,
    pub history: Vec<EpochRecord>,
}

/// 1-based index of the highest score; the earliest wins ties.
pub fn select_best_epoch(trial_f1: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &f) in trial_f1.iter().enumerate() {
        if best.is_none_or(|(_, b)| f > b) {
            best = Some((i + 1, f));
        }
    }
    best.map(|(e, _)| e)
}

/// Mean per-comment F1 of the model's predictions on `comments`.
pub fn corpus_f1<F: Scalar>(
    params: &Parameters<F>,
    config: &EncoderConfig,
    vocab: &Vocab,
    comments: &[Comment],
) -> Result<f64, TrainError> {
    let preds = predict_corpus(params, config, vocab, comments)?;
    let golds: Vec<OffsetSet> = comments.iter().map(|c| c.toxic_offsets.clone()).collect();
    Ok(evaluate_corpus(&golds, &preds)?.mean_f1)
}

/// Trains from a seeded initialization and returns the best trial epoch.
///
/// `on_epoch` is called after every epoch, in order.
pub fn train<F: Scalar>(
    model: &EncoderConfig,
    train_corpus: &[Comment],
    trial_corpus: &[Comment],
    vocab: &Vocab,
    cfg: &TrainConfig,
    mut on_epoch: impl FnMut(&EpochRecord),
) -> Result<TrainOutcome<F>, TrainError> {
    cfg.validate()?;
    let model = cfg.apply_to(model);
    model.validate()?;
    if model.vocab_size != vocab.len() {
        return Err(TrainError::VocabMismatch { vocab: vocab.len(), config: model.vocab_size });
    }
    if trial_corpus.is_empty() {
        return Err(TrainError::EmptyTrialCorpus);
    }
    let encoded: Vec<EncodedComment> = train_corpus.iter().map(|c| EncodedComment::new(c, vocab)).collect();
    let chunks = chunk_comments(&encoded, model.max_len);
    if chunks.is_empty() {
        return Err(TrainError::EmptyTrainCorpus);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut params: Parameters<F> = init_parameters(&model, cfg.seed);
    let mut state = AdamState::new(&model);
    let adam = cfg.adam();
    let loss = LossConfig { epsilon: cfg.epsilon };

    let mut history = Vec::with_capacity(cfg.num_epochs);
    let mut best: Option<Checkpoint<F>> = None;
    let mut order: Vec<usize> = (0..chunks.len()).collect();
    for epoch in 1..=cfg.num_epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        let mut batches = 0usize;
        for idx in order.chunks(cfg.batch_size) {
            let members: Vec<_> = idx.iter().map(|&i| &chunks[i]).collect();
            let (batch, labels) = collate(&members, vocab.pad_id());
            let mode = Mode::Train { seed: rng.random() };
            let (l, grads) = backward(&params, &model, &batch, &labels, &loss, mode)?;
            adam_step(&mut params, &grads, &mut state, &adam);
            loss_sum += l.as_f64();
            batches += 1;
        }
        let trial_f1 = corpus_f1(&params, &model, vocab, trial_corpus)?;
        let record = EpochRecord { epoch, mean_loss: loss_sum / batches as f64, trial_f1 };
        on_epoch(&record);
        history.push(record);
        if best.as_ref().is_none_or(|b| trial_f1 > b.trial_f1) {
            best = Some(Checkpoint { config: model.clone(), params: params.clone(), epoch, trial_f1 });
        }
    }
    Ok(TrainOutcome { best: best.expect("at least one epoch"), history })
}

/// Outcome of one depth-set configuration in [`layer_sweep`].
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub last_n: usize,
    pub classifier_input_dim: usize,
    pub best_epoch: usize,
    pub trial_f1: f64,
}

/// Trains one model per "last N blocks" head, `N = 1..=num_blocks`, and
/// reports each model's best trial F1.
pub fn layer_sweep<F: Scalar>(
    model: &EncoderConfig,
    train_corpus: &[Comment],
    trial_corpus: &[Comment],
    vocab: &Vocab,
    cfg: &TrainConfig,
) -> Result<Vec<SweepRow>, TrainError> {
    (1..=model.num_blocks)
        .map(|n| {
            let config = model.clone().with_depth(crate::encoder::DepthSpec::last(n));
            let out = train::<F>(&config, train_corpus, trial_corpus, vocab, cfg, |_| {})?;
            Ok(SweepRow {
                last_n: n,
                classifier_input_dim: config.classifier_input_dim(),
                best_epoch: out.best.epoch,
                trial_f1: out.best.trial_f1,
            })
        })
        .collect()
}
