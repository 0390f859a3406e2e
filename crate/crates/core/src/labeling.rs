//! Character offsets to per-token binary labels and back.

use crate::chars::is_whitespace;
use crate::corpus::OffsetSet;
use crate::tokenizer::TokenAlignment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    NonToxic = 0,
    Toxic = 1,
}

impl Label {
    pub fn class_index(self) -> usize {
        self as usize
    }

    pub fn from_class_index(idx: usize) -> Self {
        if idx == 1 {
            Label::Toxic
        } else {
            Label::NonToxic
        }
    }

    pub fn is_toxic(self) -> bool {
        self == Label::Toxic
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledSequence {
    pub tokens: Vec<TokenAlignment>,
    pub labels: Vec<Label>,
}

impl LabeledSequence {
    /// Panics if the lengths differ.
    pub fn new(tokens: Vec<TokenAlignment>, labels: Vec<Label>) -> Self {
        assert_eq!(tokens.len(), labels.len(), "one label per token");
        LabeledSequence { tokens, labels }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// A token is toxic iff any character it covers is toxic.
pub fn offsets_to_labels(tokens: &[TokenAlignment], toxic: &OffsetSet) -> LabeledSequence {
    let labels = tokens
        .iter()
        .map(|t| {
            if (t.start..=t.end).any(|o| toxic.contains(o)) {
                Label::Toxic
            } else {
                Label::NonToxic
            }
        })
        .collect();
    LabeledSequence::new(tokens.to_vec(), labels)
}

/// Offsets of every toxic token, plus whitespace between consecutive toxic
/// tokens.
pub fn labels_to_offsets(text: &str, seq: &LabeledSequence) -> OffsetSet {
    let mut offsets = OffsetSet::new();
    for (t, l) in seq.tokens.iter().zip(&seq.labels) {
        if l.is_toxic() {
            offsets.extend(t.start..=t.end);
        }
    }
    whitespace_fill(text, seq, &offsets)
}

/// Adds the whitespace characters lying strictly between each pair of
/// adjacent tokens that are both labelled toxic.
pub fn whitespace_fill(text: &str, seq: &LabeledSequence, offsets: &OffsetSet) -> OffsetSet {
    let chars: Vec<char> = text.chars().collect();
    let mut out = offsets.clone();
    for (pair, labels) in seq.tokens.windows(2).zip(seq.labels.windows(2)) {
        if !(labels[0].is_toxic() && labels[1].is_toxic()) {
            continue;
        }
        let gap = pair[0].end + 1..pair[1].start;
        out.extend(gap.filter(|&i| chars.get(i).copied().is_some_and(is_whitespace)));
    }
    out
}
