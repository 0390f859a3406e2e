//! Prediction files: one `id<TAB>[o1, o2, ...]` row per comment.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::corpus::{parse_span_list, parse_tsd_str, CorpusError, OffsetSet, SpanListError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionRecord {
    pub id: usize,
    pub offsets: OffsetSet,
}

#[derive(Debug, Error)]
pub enum PredictionError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: expected `id<TAB>[offsets]`")]
    MissingTab { line: usize },
    #[error("line {line}: invalid id {value:?}")]
    BadId { line: usize, value: String },
    #[error("line {line}: {source}")]
    SpanList {
        line: usize,
        #[source]
        source: SpanListError,
    },
    #[error("line {line}: duplicate id {id}")]
    DuplicateId { line: usize, id: usize },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

pub fn format_predictions(records: &[PredictionRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let _ = writeln!(out, "{}\t{}", r.id, r.offsets);
    }
    out
}

pub fn write_predictions(path: impl AsRef<Path>, records: &[PredictionRecord]) -> Result<(), PredictionError> {
    fs::write(path, format_predictions(records))?;
    Ok(())
}

/// Parses the TSV format. Blank lines are skipped; line numbers in errors
/// are 1-based.
pub fn parse_predictions(data: &str) -> Result<Vec<PredictionRecord>, PredictionError> {
    let mut seen = BTreeSet::new();
    let mut records = Vec::new();
    for (i, raw) in data.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let (id, list) = raw.split_once('\t').ok_or(PredictionError::MissingTab { line })?;
        let id_str = id.trim();
        if id_str.is_empty() || !id_str.bytes().all(|b| b.is_ascii_digit()) {
            return Err(PredictionError::BadId { line, value: id.to_string() });
        }
        let id: usize = id_str
            .parse()
            .map_err(|_| PredictionError::BadId { line, value: id.to_string() })?;
        if !seen.insert(id) {
            return Err(PredictionError::DuplicateId { line, id });
        }
        let offsets = parse_span_list(list).map_err(|source| PredictionError::SpanList { line, source })?;
        records.push(PredictionRecord { id, offsets });
    }
    Ok(records)
}

pub fn read_predictions(path: impl AsRef<Path>) -> Result<Vec<PredictionRecord>, PredictionError> {
    parse_predictions(&fs::read_to_string(path)?)
}

/// Reads either a TSD CSV (ids are row indices) or a prediction TSV,
/// deciding by the first line.
pub fn read_offset_file(path: impl AsRef<Path>) -> Result<Vec<PredictionRecord>, PredictionError> {
    let data = fs::read_to_string(path)?;
    parse_offset_data(&data)
}

pub fn parse_offset_data(data: &str) -> Result<Vec<PredictionRecord>, PredictionError> {
    let first = data.lines().next().unwrap_or_default().trim_start_matches('\u{feff}');
    let is_csv = first.split(',').any(|h| h.trim() == "spans") && !first.contains('\t');
    if is_csv {
        Ok(parse_tsd_str(data)?
            .into_iter()
            .map(|c| PredictionRecord { id: c.id, offsets: c.toxic_offsets })
            .collect())
    } else {
        parse_predictions(data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_and_parse() {
        let recs = vec![
            PredictionRecord { id: 0, offsets: OffsetSet::from(17..=19) },
            PredictionRecord { id: 1, offsets: OffsetSet::new() },
        ];
        let text = format_predictions(&recs);
        assert_eq!(text, "0\t[17, 18, 19]\n1\t[]\n");
        assert_eq!(parse_predictions(&text).unwrap(), recs);
    }

    #[test]
    fn errors_name_the_line() {
        assert!(matches!(parse_predictions("0\t[]\n1 []\n"), Err(PredictionError::MissingTab { line: 2 })));
        assert!(matches!(parse_predictions("x\t[]\n"), Err(PredictionError::BadId { line: 1, .. })));
        assert!(matches!(parse_predictions("0\t[]\n0\t[1]\n"), Err(PredictionError::DuplicateId { line: 2, id: 0 })));
        assert!(matches!(parse_predictions("0\t[a]\n"), Err(PredictionError::SpanList { line: 1, .. })));
    }

    #[test]
    fn offset_files_of_either_kind() {
        let csv = "spans,text\n\"[0, 1]\",ab\n";
        assert_eq!(parse_offset_data(csv).unwrap()[0].offsets, OffsetSet::from(0..=1));
        let tsv = "0\t[0, 1]\n";
        assert_eq!(parse_offset_data(tsv).unwrap()[0].offsets, OffsetSet::from(0..=1));
        assert!(parse_offset_data("").unwrap().is_empty());
    }
}
