//! Writes a planted-lexicon train/trial pair as TSD CSVs.
//!
//! cargo run -p toxspan --example planted_corpus -- <out_dir> [train_count] [trial_count]

use std::path::PathBuf;

use toxspan::corpus::write_tsd_csv;
use toxspan::synthetic::planted_lexicon_corpus;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().ok_or("usage: planted_corpus <out_dir> [train_count] [trial_count]")?);
    let train_count = args.next().map(|s| s.parse()).transpose()?.unwrap_or(64);
    let trial_count = args.next().map(|s| s.parse()).transpose()?.unwrap_or(32);
    std::fs::create_dir_all(&dir)?;
    write_tsd_csv(dir.join("train.csv"), &planted_lexicon_corpus(train_count, 1))?;
    write_tsd_csv(dir.join("trial.csv"), &planted_lexicon_corpus(trial_count, 2))?;
    Ok(())
}
