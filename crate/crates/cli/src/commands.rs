//! Subcommand implementations. Each returns its result so callers decide
//! what reaches standard output.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use log::info;
use toxspan::corpus::{parse_tsd_csv, write_tsd_csv};
use toxspan::encoder::{read_checkpoint, write_checkpoint, CheckpointMeta, EncoderConfig, Parameters};
use toxspan::ensemble::{majority_vote, VoteConfig};
use toxspan::metrics::{evaluate_corpus, EvalResult};
use toxspan::pipeline::predict_corpus;
use toxspan::predictions::{read_offset_file, read_predictions, write_predictions, PredictionRecord};
use toxspan::spanclean::{clean_corpus, CleanOptions, CleanReport};
use toxspan::tokenizer::{build_vocab, load_vocab, Vocab};
use toxspan::training::{layer_sweep, train, EpochRecord, SweepRow};
use toxspan::{Comment, OffsetSet};

use crate::config::PipelineConfig;
use crate::highlight::{render_document, Format};

pub fn cmd_clean(input: &Path, output: &Path, opts: &CleanOptions) -> Result<CleanReport> {
    let comments = parse_tsd_csv(input).with_context(|| format!("reading {}", input.display()))?;
    let (cleaned, report) = clean_corpus(&comments, opts);
    write_tsd_csv(output, &cleaned).with_context(|| format!("writing {}", output.display()))?;
    info!("cleaned {} comments from {}", cleaned.len(), input.display());
    Ok(report)
}

pub fn format_clean_report(r: &CleanReport) -> String {
    format!(
        "trimmed_whitespace\t{}\ndropped_singletons\t{}\nexpanded_left\t{}\nexpanded_right\t{}\ndiscarded_partial_words\t{}\n",
        r.trimmed_whitespace, r.dropped_singletons, r.expanded_left, r.expanded_right, r.discarded_partial_words
    )
}

pub fn cmd_build_vocab(corpora: &[PathBuf], output: &Path, min_count: usize) -> Result<Vocab> {
    ensure!(!corpora.is_empty(), "no corpus given");
    let mut texts = Vec::new();
    for path in corpora {
        let comments = parse_tsd_csv(path).with_context(|| format!("reading {}", path.display()))?;
        texts.extend(comments.into_iter().map(|c| c.text));
    }
    let vocab = build_vocab(texts.iter().map(String::as_str), min_count);
    fs::write(output, vocab.to_text()).with_context(|| format!("writing {}", output.display()))?;
    info!("wrote {} pieces to {}", vocab.len(), output.display());
    Ok(vocab)
}

#[derive(Debug, Clone)]
pub struct TrainSummary {
    pub checkpoint: PathBuf,
    pub best_epoch: usize,
    pub trial_f1: f64,
    pub history: Vec<EpochRecord>,
}

struct TrainInputs {
    train: Vec<Comment>,
    trial: Vec<Comment>,
    vocab: Vocab,
    model: EncoderConfig,
}

fn load_train_inputs(cfg: &PipelineConfig) -> Result<TrainInputs> {
    let problems = cfg.training_problems();
    if !problems.is_empty() {
        bail!("invalid configuration:\n  - {}", problems.join("\n  - "));
    }
    let p = &cfg.paths;
    // training_problems guarantees these are set
    let (train_path, trial_path, vocab_path) = (p.train.as_ref().unwrap(), p.trial.as_ref().unwrap(), p.vocab.as_ref().unwrap());
    let vocab = load_vocab(vocab_path).with_context(|| format!("reading {}", vocab_path.display()))?;
    Ok(TrainInputs {
        train: parse_tsd_csv(train_path).with_context(|| format!("reading {}", train_path.display()))?,
        trial: parse_tsd_csv(trial_path).with_context(|| format!("reading {}", trial_path.display()))?,
        model: cfg.encoder_config(vocab.len())?,
        vocab,
    })
}

pub fn cmd_train(cfg: &PipelineConfig) -> Result<TrainSummary> {
    let inputs = load_train_inputs(cfg)?;
    let checkpoint = cfg.paths.checkpoint.clone().expect("validated");
    let mut log_text = String::from("epoch\tmean_loss\ttrial_f1\n");
    let out = train::<f32>(&inputs.model, &inputs.train, &inputs.trial, &inputs.vocab, &cfg.train, |r| {
        info!("epoch {} loss {:.6} trial F1 {:.4}", r.epoch, r.mean_loss, r.trial_f1);
        let _ = writeln!(log_text, "{}\t{:.6}\t{:.6}", r.epoch, r.mean_loss, r.trial_f1);
    })?;
    let meta = CheckpointMeta {
        epoch: out.best.epoch,
        trial_f1: out.best.trial_f1,
        seed: cfg.train.seed,
        vocab_size: inputs.vocab.len(),
        vocab_fingerprint: inputs.vocab.fingerprint(),
    };
    let file = File::create(&checkpoint).with_context(|| format!("creating {}", checkpoint.display()))?;
    write_checkpoint(BufWriter::new(file), &out.best.config, &meta, &out.best.params)?;
    if let Some(log_path) = cfg.log_path() {
        fs::write(&log_path, log_text).with_context(|| format!("writing {}", log_path.display()))?;
    }
    info!("kept epoch {} (trial F1 {:.4}) in {}", out.best.epoch, out.best.trial_f1, checkpoint.display());
    Ok(TrainSummary { checkpoint, best_epoch: out.best.epoch, trial_f1: out.best.trial_f1, history: out.history })
}

pub fn cmd_sweep(cfg: &PipelineConfig) -> Result<Vec<SweepRow>> {
    let inputs = load_train_inputs(cfg)?;
    Ok(layer_sweep::<f32>(&inputs.model, &inputs.train, &inputs.trial, &inputs.vocab, &cfg.train)?)
}

pub fn format_sweep(rows: &[SweepRow]) -> String {
    let mut out = String::from("last_n\tclassifier_input_dim\tbest_epoch\ttrial_f1\n");
    for r in rows {
        let _ = writeln!(out, "{}\t{}\t{}\t{:.4}", r.last_n, r.classifier_input_dim, r.best_epoch, r.trial_f1);
    }
    out
}

pub fn load_model(checkpoint: &Path, vocab: &Vocab) -> Result<(EncoderConfig, CheckpointMeta, Parameters<f32>)> {
    let file = File::open(checkpoint).with_context(|| format!("opening {}", checkpoint.display()))?;
    let (config, meta, params) =
        read_checkpoint::<f32, _>(BufReader::new(file)).with_context(|| format!("reading {}", checkpoint.display()))?;
    if config.vocab_size != vocab.len() || meta.vocab_fingerprint != vocab.fingerprint() {
        bail!(
            "checkpoint {} was trained with a different vocabulary ({} pieces, fingerprint {}) than the one given ({} pieces, fingerprint {})",
            checkpoint.display(),
            config.vocab_size,
            meta.vocab_fingerprint,
            vocab.len(),
            vocab.fingerprint()
        );
    }
    Ok((config, meta, params))
}

pub fn cmd_predict(checkpoint: &Path, vocab: &Path, corpus: &Path, output: &Path) -> Result<Vec<PredictionRecord>> {
    let vocab = load_vocab(vocab).with_context(|| format!("reading {}", vocab.display()))?;
    let (config, _, params) = load_model(checkpoint, &vocab)?;
    let comments = parse_tsd_csv(corpus).with_context(|| format!("reading {}", corpus.display()))?;
    let preds = predict_corpus(&params, &config, &vocab, &comments)?;
    let records: Vec<PredictionRecord> =
        comments.iter().zip(preds).map(|(c, offsets)| PredictionRecord { id: c.id, offsets }).collect();
    write_predictions(output, &records).with_context(|| format!("writing {}", output.display()))?;
    info!("wrote {} predictions to {}", records.len(), output.display());
    Ok(records)
}

fn format_ids(ids: &BTreeSet<usize>) -> String {
    const SHOWN: usize = 20;
    let mut s = ids.iter().take(SHOWN).map(usize::to_string).collect::<Vec<_>>().join(", ");
    if ids.len() > SHOWN {
        let _ = write!(s, " and {} more", ids.len() - SHOWN);
    }
    s
}

/// Orders `records` by `ids`, failing with the missing and unexpected ids
/// when the two do not match exactly.
pub fn align(ids: &[usize], records: Vec<PredictionRecord>, what: &str) -> Result<Vec<OffsetSet>> {
    let mut by_id: BTreeMap<usize, OffsetSet> = records.into_iter().map(|r| (r.id, r.offsets)).collect();
    let wanted: BTreeSet<usize> = ids.iter().copied().collect();
    let missing: BTreeSet<usize> = wanted.iter().copied().filter(|id| !by_id.contains_key(id)).collect();
    let extra: BTreeSet<usize> = by_id.keys().copied().filter(|id| !wanted.contains(id)).collect();
    if !missing.is_empty() || !extra.is_empty() {
        let mut msg = format!("{what} does not match the reference ids");
        if !missing.is_empty() {
            let _ = write!(msg, "; missing ids: {}", format_ids(&missing));
        }
        if !extra.is_empty() {
            let _ = write!(msg, "; unknown ids: {}", format_ids(&extra));
        }
        bail!(msg);
    }
    Ok(ids.iter().map(|id| by_id.remove(id).unwrap_or_default()).collect())
}

pub fn cmd_eval(gold: &Path, pred: &Path, per_comment: Option<&Path>) -> Result<EvalResult> {
    let gold_records = read_offset_file(gold).with_context(|| format!("reading {}", gold.display()))?;
    let pred_records = read_offset_file(pred).with_context(|| format!("reading {}", pred.display()))?;
    let ids: Vec<usize> = gold_records.iter().map(|r| r.id).collect();
    let preds = align(&ids, pred_records, &pred.display().to_string())?;
    let golds: Vec<OffsetSet> = gold_records.into_iter().map(|r| r.offsets).collect();
    let result = evaluate_corpus(&golds, &preds)?;
    if let Some(path) = per_comment {
        let mut out = String::from("id\tf1\n");
        for (id, f) in ids.iter().zip(&result.per_comment_f1) {
            let _ = writeln!(out, "{id}\t{f:.6}");
        }
        fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(result)
}

pub fn cmd_ensemble(members: &[PathBuf], output: &Path) -> Result<Vec<PredictionRecord>> {
    let vote = VoteConfig::new(members.len())?;
    let mut loaded = Vec::with_capacity(members.len());
    for path in members {
        loaded.push(read_predictions(path).with_context(|| format!("reading {}", path.display()))?);
    }
    let ids: Vec<usize> = loaded[0].iter().map(|r| r.id).collect();
    let mut aligned = Vec::with_capacity(members.len());
    for (path, records) in members.iter().zip(loaded) {
        aligned.push(align(&ids, records, &path.display().to_string())?);
    }
    let mut records = Vec::with_capacity(ids.len());
    for (i, &id) in ids.iter().enumerate() {
        let votes: Vec<OffsetSet> = aligned.iter().map(|m| m[i].clone()).collect();
        records.push(PredictionRecord { id, offsets: majority_vote(&votes, &vote)? });
    }
    write_predictions(output, &records).with_context(|| format!("writing {}", output.display()))?;
    info!("voted {} members (threshold {}) into {}", vote.members(), vote.threshold(), output.display());
    Ok(records)
}

pub fn cmd_highlight(gold: &Path, pred: &Path, format: Format) -> Result<String> {
    let comments = parse_tsd_csv(gold).with_context(|| format!("reading {}", gold.display()))?;
    let pred_records = read_offset_file(pred).with_context(|| format!("reading {}", pred.display()))?;
    let ids: Vec<usize> = comments.iter().map(|c| c.id).collect();
    let preds = align(&ids, pred_records, &pred.display().to_string())?;
    let rows: Vec<_> =
        comments.iter().zip(&preds).map(|(c, p)| (c.id, c.text.as_str(), &c.toxic_offsets, p)).collect();
    Ok(render_document(format, &rows))
}

/// Writes `data` to `path`, or to standard output when `path` is `None`.
pub fn emit(path: Option<&Path>, data: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, data).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(data.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: usize, o: &[usize]) -> PredictionRecord {
        PredictionRecord { id, offsets: o.iter().copied().collect() }
    }

    #[test]
    fn align_reorders() {
        let got = align(&[2, 0], vec![rec(0, &[1]), rec(2, &[5])], "p").unwrap();
        assert_eq!(got, vec![OffsetSet::from(5..=5), OffsetSet::from(1..=1)]);
    }

    #[test]
    fn align_lists_bad_ids() {
        let err = align(&[0, 1, 2], vec![rec(0, &[]), rec(7, &[])], "preds.tsv").unwrap_err().to_string();
        assert!(err.contains("missing ids: 1, 2"), "{err}");
        assert!(err.contains("unknown ids: 7"), "{err}");
    }
}
