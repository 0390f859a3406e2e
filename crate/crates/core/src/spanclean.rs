//! Annotation cleaning.
//!
//! Each maximal group of consecutive toxic offsets goes through three rules,
//! in order:
//!
//! 1. shrink the group while its first or last character is whitespace;
//! 2. drop the group if it covers a single character;
//! 3. grow the group while the neighbouring character on either side is
//!    alphanumeric, so partially marked words become fully marked.
//!
//! The surviving groups are unioned and the pipeline is run once more on the
//! union, which makes [`clean_offsets`] idempotent.

use std::ops::AddAssign;

use crate::chars::{is_whitespace, is_word_char};
use crate::corpus::{Comment, OffsetSet, Span};

/// How many groups each rule touched.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CleanReport {
    pub trimmed_whitespace: usize,
    pub dropped_singletons: usize,
    pub expanded_left: usize,
    pub expanded_right: usize,
    /// Only non-zero with [`CleanOptions::discard_partial_words`].
    pub discarded_partial_words: usize,
}

impl AddAssign for CleanReport {
    fn add_assign(&mut self, rhs: Self) {
        self.trimmed_whitespace += rhs.trimmed_whitespace;
        self.dropped_singletons += rhs.dropped_singletons;
        self.expanded_left += rhs.expanded_left;
        self.expanded_right += rhs.expanded_right;
        self.discarded_partial_words += rhs.discarded_partial_words;
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CleanOptions {
    /// Replace rule 3: instead of growing a group over a partially marked
    /// word, remove the partially marked word from the group.
    pub discard_partial_words: bool,
}

pub fn trim_whitespace_boundaries(text: &str, group: Span) -> Option<Span> {
    let chars: Vec<char> = text.chars().collect();
    trim_chars(&chars, group)
}

pub fn drop_singleton(_text: &str, group: Span) -> Option<Span> {
    (group.len() > 1).then_some(group)
}

pub fn expand_to_word_boundaries(text: &str, group: Span) -> Span {
    let chars: Vec<char> = text.chars().collect();
    expand_chars(&chars, group)
}

fn trim_chars(chars: &[char], group: Span) -> Option<Span> {
    let (mut start, mut end) = (group.start, group.end);
    while start <= end && is_whitespace(chars[start]) {
        start += 1;
    }
    while end > start && is_whitespace(chars[end]) {
        end -= 1;
    }
    (start <= end && !is_whitespace(chars[end])).then(|| Span::new(start, end))
}

fn expand_chars(chars: &[char], group: Span) -> Span {
    let (mut start, mut end) = (group.start, group.end);
    while start > 0 && is_word_char(chars[start - 1]) {
        start -= 1;
    }
    while end + 1 < chars.len() && is_word_char(chars[end + 1]) {
        end += 1;
    }
    Span::new(start, end)
}

/// Removes the partially covered word at each end of `group`.
fn discard_partial_chars(chars: &[char], group: Span) -> Option<Span> {
    let (mut start, mut end) = (group.start as isize, group.end as isize);
    let word = |i: isize| i >= 0 && (i as usize) < chars.len() && is_word_char(chars[i as usize]);
    if word(start - 1) {
        while start <= end && word(start) {
            start += 1;
        }
    }
    if word(end + 1) {
        while end >= start && word(end) {
            end -= 1;
        }
    }
    if start > end {
        return None;
    }
    trim_chars(chars, Span::new(start as usize, end as usize))
}

fn clean_group(chars: &[char], group: Span, opts: &CleanOptions, report: &mut CleanReport) -> Option<Span> {
    let trimmed = trim_chars(chars, group);
    if trimmed != Some(group) {
        report.trimmed_whitespace += 1;
    }
    let trimmed = trimmed?;
    if trimmed.len() == 1 {
        report.dropped_singletons += 1;
        return None;
    }
    if opts.discard_partial_words {
        let kept = discard_partial_chars(chars, trimmed);
        if kept != Some(trimmed) {
            report.discarded_partial_words += 1;
        }
        return kept;
    }
    let expanded = expand_chars(chars, trimmed);
    if expanded.start < trimmed.start {
        report.expanded_left += 1;
    }
    if expanded.end > trimmed.end {
        report.expanded_right += 1;
    }
    Some(expanded)
}

fn clean_pass(chars: &[char], raw: &OffsetSet, opts: &CleanOptions, report: &mut CleanReport) -> OffsetSet {
    let mut out = OffsetSet::new();
    for group in raw.to_spans() {
        if let Some(span) = clean_group(chars, group, opts, report) {
            out.extend_span(span);
        }
    }
    out
}

/// Cleans `raw` with the default rules.
///
/// Offsets at or beyond the end of `text` are ignored.
pub fn clean_offsets(text: &str, raw: &OffsetSet) -> (OffsetSet, CleanReport) {
    clean_offsets_with(text, raw, &CleanOptions::default())
}

pub fn clean_offsets_with(text: &str, raw: &OffsetSet, opts: &CleanOptions) -> (OffsetSet, CleanReport) {
    let chars: Vec<char> = text.chars().collect();
    let in_bounds: OffsetSet = raw.iter().take_while(|&o| o < chars.len()).collect();
    let mut report = CleanReport::default();
    let first = clean_pass(&chars, &in_bounds, opts, &mut report);
    let second = clean_pass(&chars, &first, opts, &mut report);
    (second, report)
}

/// Cleans every comment, returning the cleaned corpus and summed counts.
pub fn clean_corpus(comments: &[Comment], opts: &CleanOptions) -> (Vec<Comment>, CleanReport) {
    let mut total = CleanReport::default();
    let cleaned = comments
        .iter()
        .map(|c| {
            let (offsets, report) = clean_offsets_with(&c.text, &c.toxic_offsets, opts);
            total += report;
            Comment {
                id: c.id,
                text: c.text.clone(),
                toxic_offsets: offsets,
            }
        })
        .collect();
    (cleaned, total)
}
