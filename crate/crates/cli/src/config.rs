//! The pipeline config file.
//!
//! ```toml
//! [paths]
//! train = "train.csv"
//! trial = "trial.csv"
//! vocab = "vocab.txt"
//! checkpoint = "model.ckpt"
//!
//! [encoder]
//! hidden_dim = 32
//! num_blocks = 3
//! num_heads = 4
//! max_len = 64
//! depth_set = { last = 3 }
//! dropout = 0.1
//!
//! [train]
//! learning_rate = 1e-3
//! num_epochs = 20
//! seed = 1
//! ```
//!
//! Relative paths are resolved against the directory holding the file.
//! `encoder.vocab_size` may be omitted; it is taken from the vocabulary.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use toxspan::encoder::EncoderConfig;
use toxspan::tokenizer::load_vocab;
use toxspan::training::TrainConfig;

/// Environment variable that overrides the training seed from the file.
pub const SEED_ENV: &str = "TOXSPAN_SEED";

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub train: Option<PathBuf>,
    pub trial: Option<PathBuf>,
    pub vocab: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
    /// Per-epoch training log; defaults to the checkpoint path with `.log`
    /// appended.
    pub log: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub paths: Paths,
    /// Kept as a table until the vocabulary size is known.
    pub encoder: toml::Table,
    #[serde(default)]
    pub train: TrainConfig,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg = Self::parse(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let p = &mut self.paths;
        let all = [&mut p.train, &mut p.trial, &mut p.vocab, &mut p.checkpoint, &mut p.log]
            .into_iter()
            .flatten();
        for path in all {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
    }

    /// Seed precedence: flag, then the environment, then the file.
    pub fn apply_seed(&mut self, flag: Option<u64>) -> Result<()> {
        if let Some(seed) = flag {
            self.train.seed = seed;
        } else if let Ok(raw) = std::env::var(SEED_ENV) {
            self.train.seed = raw.trim().parse().with_context(|| format!("{SEED_ENV}={raw:?} is not a seed"))?;
        }
        Ok(())
    }

    pub fn encoder_config(&self, vocab_size: usize) -> Result<EncoderConfig> {
        let mut table = self.encoder.clone();
        match table.get("vocab_size").map(|v| v.as_integer()) {
            None => {
                table.insert("vocab_size".into(), toml::Value::Integer(vocab_size as i64));
            }
            Some(Some(n)) if n as usize == vocab_size => {}
            Some(_) => bail!("encoder.vocab_size does not match the vocabulary ({vocab_size} pieces)"),
        }
        let cfg: EncoderConfig = table.try_into().context("invalid [encoder] section")?;
        Ok(cfg)
    }

    pub fn log_path(&self) -> Option<PathBuf> {
        self.paths.log.clone().or_else(|| {
            self.paths.checkpoint.as_ref().map(|c| {
                let mut s = c.clone().into_os_string();
                s.push(".log");
                PathBuf::from(s)
            })
        })
    }

    /// Every problem that would stop a training run, gathered up front.
    pub fn training_problems(&self) -> Vec<String> {
        let mut problems = Vec::new();
        let p = &self.paths;
        for (name, path, must_exist) in [
            ("paths.train", &p.train, true),
            ("paths.trial", &p.trial, true),
            ("paths.vocab", &p.vocab, true),
            ("paths.checkpoint", &p.checkpoint, false),
        ] {
            match path {
                None => problems.push(format!("{name} is not set")),
                Some(path) if must_exist && !path.is_file() => {
                    problems.push(format!("{name}: {} does not exist", path.display()))
                }
                _ => {}
            }
        }
        if let Err(e) = self.train.validate() {
            problems.push(e.to_string());
        }
        let vocab_size = match p.vocab.as_deref().filter(|v| v.is_file()).map(load_vocab) {
            Some(Ok(v)) => Some(v.len()),
            Some(Err(e)) => {
                problems.push(format!("paths.vocab: {e}"));
                None
            }
            None => None,
        };
        // without a vocabulary the encoder section is still checked for shape
        match self.encoder_config(vocab_size.unwrap_or(2)) {
            Ok(enc) => {
                if let Err(e) = self.train.apply_to(&enc).validate() {
                    problems.push(e.to_string());
                }
            }
            Err(e) => problems.push(format!("{e:#}")),
        }
        problems
    }
}
