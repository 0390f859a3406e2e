//! Command-line front end for the toxspan pipeline.

pub mod commands;
pub mod config;
pub mod highlight;

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use toxspan::spanclean::CleanOptions;

pub use commands::*;
pub use config::PipelineConfig;
pub use highlight::Format;

#[derive(Debug, Parser)]
#[command(name = "toxspan", version, about = "Toxic span detection: cleaning, training, prediction, evaluation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Clean span annotations in a TSD CSV and print how often each rule fired.
    Clean {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Drop partially annotated words instead of completing them.
        #[arg(long)]
        discard_partial_words: bool,
    },
    /// Build a WordPiece vocabulary from one or more TSD CSVs.
    BuildVocab {
        #[arg(long = "corpus", required = true)]
        corpora: Vec<PathBuf>,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 2)]
        min_count: usize,
    },
    /// Train and keep the epoch with the best trial F1.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        learning_rate: Option<f64>,
        /// Overrides `paths.checkpoint`.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Train one model per "last N blocks" head and print a trial F1 table.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Predict toxic offsets for every comment of a TSD CSV.
    Predict {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Print the mean per-comment F1 of predictions against gold.
    Eval {
        /// TSD CSV or prediction TSV.
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        /// Also write `id<TAB>f1` rows here.
        #[arg(long)]
        per_comment: Option<PathBuf>,
    },
    /// Majority vote over prediction files.
    Ensemble {
        #[arg(long = "member", required = true)]
        members: Vec<PathBuf>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Render comments with gold spans underlined and predictions colored.
    Highlight {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Terminal)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn load_config(path: &Path, seed: Option<u64>, epochs: Option<usize>) -> Result<PipelineConfig> {
    let mut cfg = PipelineConfig::load(path)?;
    cfg.apply_seed(seed)?;
    if let Some(n) = epochs {
        cfg.train.num_epochs = n;
    }
    Ok(cfg)
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Clean { input, output, discard_partial_words } => {
            let report = cmd_clean(&input, &output, &CleanOptions { discard_partial_words })?;
            emit(None, &format_clean_report(&report))
        }
        Command::BuildVocab { corpora, output, min_count } => {
            cmd_build_vocab(&corpora, &output, min_count)?;
            Ok(())
        }
        Command::Train { config, seed, epochs, learning_rate, checkpoint } => {
            let mut cfg = load_config(&config, seed, epochs)?;
            if let Some(lr) = learning_rate {
                cfg.train.learning_rate = lr;
            }
            if let Some(c) = checkpoint {
                cfg.paths.checkpoint = Some(c);
            }
            let summary = cmd_train(&cfg)?;
            emit(None, &format!("best_epoch\t{}\ntrial_f1\t{:.4}\n", summary.best_epoch, summary.trial_f1))
        }
        Command::Sweep { config, seed, epochs, output } => {
            let cfg = load_config(&config, seed, epochs)?;
            let rows = cmd_sweep(&cfg)?;
            emit(output.as_deref(), &format_sweep(&rows))
        }
        Command::Predict { checkpoint, vocab, corpus, output } => {
            cmd_predict(&checkpoint, &vocab, &corpus, &output)?;
            Ok(())
        }
        Command::Eval { gold, pred, per_comment } => {
            let result = cmd_eval(&gold, &pred, per_comment.as_deref())?;
            emit(None, &format!("{:.4}\n", result.mean_f1))
        }
        Command::Ensemble { members, output } => {
            cmd_ensemble(&members, &output)?;
            Ok(())
        }
        Command::Highlight { gold, pred, format, output } => {
            let doc = cmd_highlight(&gold, &pred, format)?;
            emit(output.as_deref(), &doc).context("writing highlight output")
        }
    }
}
