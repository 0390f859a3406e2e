//! Span-annotated comment corpora in the TSD CSV layout.
//!
//! A corpus file is a two-column CSV with the header `spans,text`. The
//! `spans` column holds a bracketed list of character offsets, e.g.
//! `"[11, 12, 13, 14, 15]"`. Offsets count Unicode scalar values, not bytes.

use std::collections::BTreeSet;
use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use thiserror::Error;

/// A sorted set of character indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct OffsetSet(BTreeSet<usize>);

impl OffsetSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, offset: usize) -> bool {
        self.0.contains(&offset)
    }

    pub fn insert(&mut self, offset: usize) -> bool {
        self.0.insert(offset)
    }

    pub fn remove(&mut self, offset: usize) -> bool {
        self.0.remove(&offset)
    }

    /// Ascending iteration.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn union(&self, other: &OffsetSet) -> OffsetSet {
        OffsetSet(self.0.union(&other.0).copied().collect())
    }

    pub fn intersection_len(&self, other: &OffsetSet) -> usize {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.iter().filter(|o| large.contains(*o)).count()
    }

    pub fn is_subset(&self, other: &OffsetSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn extend_span(&mut self, span: Span) {
        self.0.extend(span.start..=span.end);
    }

    /// Maximal runs of consecutive offsets, sorted by start.
    pub fn to_spans(&self) -> Vec<Span> {
        offsets_to_spans(self)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.0.iter().copied().collect()
    }
}

impl FromIterator<usize> for OffsetSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        OffsetSet(iter.into_iter().collect())
    }
}

impl Extend<usize> for OffsetSet {
    fn extend<I: IntoIterator<Item = usize>>(&mut self, iter: I) {
        self.0.extend(iter)
    }
}

impl From<std::ops::RangeInclusive<usize>> for OffsetSet {
    fn from(range: std::ops::RangeInclusive<usize>) -> Self {
        range.collect()
    }
}

/// Renders the bracket-list syntax used by the corpus `spans` column.
impl fmt::Display for OffsetSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, o) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{o}")?;
        }
        f.write_str("]")
    }
}

/// An inclusive character range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    /// Panics if `start > end`.
    pub fn new(start: usize, end: usize) -> Self {
        assert!(start <= end, "span start {start} exceeds end {end}");
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    /// Always false; a span covers at least one character.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, offset: usize) -> bool {
        self.start <= offset && offset <= self.end
    }
}

pub fn offsets_to_spans(offsets: &OffsetSet) -> Vec<Span> {
    let mut spans: Vec<Span> = Vec::new();
    for o in offsets.iter() {
        match spans.last_mut() {
            Some(last) if last.end + 1 == o => last.end = o,
            _ => spans.push(Span { start: o, end: o }),
        }
    }
    spans
}

/// Union of the given ranges; overlapping spans merge.
pub fn spans_to_offsets(spans: &[Span]) -> OffsetSet {
    let mut out = OffsetSet::new();
    for s in spans {
        out.extend_span(*s);
    }
    out
}

/// One corpus record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comment {
    /// Zero-based record index within its file.
    pub id: usize,
    pub text: String,
    pub toxic_offsets: OffsetSet,
}

impl Comment {
    /// Builds a comment, checking that every offset falls inside `text`.
    pub fn new(id: usize, text: impl Into<String>, toxic_offsets: OffsetSet) -> Result<Self, CorpusError> {
        let text = text.into();
        let len = text.chars().count();
        if let Some(offset) = toxic_offsets.last().filter(|&o| o >= len) {
            return Err(CorpusError::OffsetOutOfRange { row: id, offset, len });
        }
        Ok(Comment { id, text, toxic_offsets })
    }

    /// Length in Unicode scalar values.
    pub fn char_len(&self) -> usize {
        self.text.chars().count()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpanListError {
    #[error("span list must be enclosed in brackets")]
    MissingBrackets,
    #[error("invalid offset {0:?}")]
    InvalidOffset(String),
    #[error("empty element in span list")]
    EmptyElement,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("missing column `{0}` in header")]
    MissingColumn(&'static str),
    #[error("row {row}: missing field `{column}`")]
    MissingField { row: usize, column: &'static str },
    #[error("row {row}: malformed spans list: {source}")]
    SpanList {
        row: usize,
        #[source]
        source: SpanListError,
    },
    #[error("row {row}: offset {offset} out of range for text of length {len}")]
    OffsetOutOfRange { row: usize, offset: usize, len: usize },
}

/// Parses a bracketed, comma-separated offset list such as `[1, 2,3]`.
pub fn parse_span_list(s: &str) -> Result<OffsetSet, SpanListError> {
    let inner = s
        .trim()
        .strip_prefix('[')
        .and_then(|rest| rest.strip_suffix(']'))
        .ok_or(SpanListError::MissingBrackets)?;
    if inner.trim().is_empty() {
        return Ok(OffsetSet::new());
    }
    inner
        .split(',')
        .map(|item| {
            let item = item.trim();
            if item.is_empty() {
                return Err(SpanListError::EmptyElement);
            }
            if !item.bytes().all(|b| b.is_ascii_digit()) {
                return Err(SpanListError::InvalidOffset(item.to_string()));
            }
            item.parse::<usize>()
                .map_err(|_| SpanListError::InvalidOffset(item.to_string()))
        })
        .collect()
}

pub fn parse_tsd_csv(path: impl AsRef<Path>) -> Result<Vec<Comment>, CorpusError> {
    parse_tsd_reader(File::open(path)?)
}

pub fn parse_tsd_str(data: &str) -> Result<Vec<Comment>, CorpusError> {
    parse_tsd_reader(data.as_bytes())
}

pub fn parse_tsd_reader<R: Read>(reader: R) -> Result<Vec<Comment>, CorpusError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let column = |name: &'static str| {
        headers
            .iter()
            .position(|h| h.trim_start_matches('\u{feff}').trim() == name)
            .ok_or(CorpusError::MissingColumn(name))
    };
    let spans_col = column("spans")?;
    let text_col = column("text")?;

    let mut comments = Vec::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        let spans = record
            .get(spans_col)
            .ok_or(CorpusError::MissingField { row, column: "spans" })?;
        let text = record
            .get(text_col)
            .ok_or(CorpusError::MissingField { row, column: "text" })?;
        let offsets = parse_span_list(spans).map_err(|source| CorpusError::SpanList { row, source })?;
        comments.push(Comment::new(row, text, offsets)?);
    }
    Ok(comments)
}

pub fn write_tsd_csv(path: impl AsRef<Path>, comments: &[Comment]) -> Result<(), CorpusError> {
    let file = File::create(path)?;
    write_tsd_writer(std::io::BufWriter::new(file), comments)
}

pub fn write_tsd_writer<W: Write>(writer: W, comments: &[Comment]) -> Result<(), CorpusError> {
    let mut wtr = csv::WriterBuilder::new()
        .quote_style(csv::QuoteStyle::Necessary)
        .from_writer(writer);
    wtr.write_record(["spans", "text"])?;
    for c in comments {
        wtr.write_record([c.toxic_offsets.to_string().as_str(), c.text.as_str()])?;
    }
    wtr.flush()?;
    Ok(())
}
