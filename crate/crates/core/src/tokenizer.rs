//! Lowercasing WordPiece tokenizer that keeps every token's character range
//! in the original text.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::chars::{is_punctuation, is_whitespace};

pub const UNK: &str = "[UNK]";
pub const PAD: &str = "[PAD]";
pub const CONTINUATION_PREFIX: &str = "##";
/// Words longer than this many characters become a single `[UNK]`.
pub const MAX_WORD_CHARS: usize = 100;

#[derive(Debug, Error)]
pub enum VocabError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: duplicate piece {piece:?}")]
    Duplicate { piece: String, line: usize },
    #[error("line {line}: empty piece")]
    EmptyPiece { line: usize },
    #[error("line {line}: piece {piece:?} contains whitespace and could never match")]
    WhitespaceInPiece { piece: String, line: usize },
    #[error("vocabulary is missing the {0} piece")]
    MissingSpecial(&'static str),
}

/// An ordered list of pieces; a piece's id is its position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocab {
    pieces: Vec<String>,
    ids: HashMap<String, u32>,
    unk_id: u32,
    pad_id: u32,
    longest_piece: usize,
}

impl Vocab {
    pub fn from_pieces<I, S>(pieces: I) -> Result<Self, VocabError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut list = Vec::new();
        let mut ids = HashMap::new();
        let mut longest_piece = 0;
        for (line, piece) in pieces.into_iter().enumerate() {
            let piece: String = piece.into();
            if piece.is_empty() {
                return Err(VocabError::EmptyPiece { line: line + 1 });
            }
            if piece.chars().any(is_whitespace) {
                return Err(VocabError::WhitespaceInPiece { piece, line: line + 1 });
            }
            if ids.contains_key(&piece) {
                return Err(VocabError::Duplicate { piece, line: line + 1 });
            }
            longest_piece = longest_piece.max(piece.chars().count());
            ids.insert(piece.clone(), list.len() as u32);
            list.push(piece);
        }
        let unk_id = *ids.get(UNK).ok_or(VocabError::MissingSpecial(UNK))?;
        let pad_id = *ids.get(PAD).ok_or(VocabError::MissingSpecial(PAD))?;
        Ok(Vocab { pieces: list, ids, unk_id, pad_id, longest_piece })
    }

    /// Parses the vocab file format: one piece per line, `\n` or `\r\n`
    /// terminated.
    pub fn from_text(text: &str) -> Result<Self, VocabError> {
        Self::from_pieces(text.lines())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in &self.pieces {
            out.push_str(p);
            out.push('\n');
        }
        out
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn id(&self, piece: &str) -> Option<u32> {
        self.ids.get(piece).copied()
    }

    pub fn piece(&self, id: u32) -> Option<&str> {
        self.pieces.get(id as usize).map(String::as_str)
    }

    pub fn unk_id(&self) -> u32 {
        self.unk_id
    }

    pub fn pad_id(&self) -> u32 {
        self.pad_id
    }

    pub fn pieces(&self) -> &[String] {
        &self.pieces
    }

    /// SHA-256 over the serialized vocab, hex encoded.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub fn load_vocab(path: impl AsRef<Path>) -> Result<Vocab, VocabError> {
    Vocab::from_text(&fs::read_to_string(path)?)
}

/// A pre-tokenized word with its inclusive character range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word {
    pub text: String,
    pub start: usize,
    pub end: usize,
}

/// Splits on whitespace and isolates every punctuation character.
pub fn basic_split(text: &str) -> Vec<Word> {
    let mut words = Vec::new();
    let mut current: Option<Word> = None;
    for (i, c) in text.chars().enumerate() {
        if is_whitespace(c) || is_punctuation(c) {
            words.extend(current.take());
            if !is_whitespace(c) {
                words.push(Word { text: c.to_string(), start: i, end: i });
            }
            continue;
        }
        match current.as_mut() {
            Some(w) => {
                w.text.push(c);
                w.end = i;
            }
            None => current = Some(Word { text: c.to_string(), start: i, end: i }),
        }
    }
    words.extend(current);
    words
}

/// Lowercases one character, keeping it unchanged when its lowercase form
/// is not a single character.
pub fn lowercase_char(c: char) -> char {
    let mut lower = c.to_lowercase();
    match (lower.next(), lower.next()) {
        (Some(l), None) => l,
        _ => c,
    }
}

pub fn lowercase(text: &str) -> String {
    text.chars().map(lowercase_char).collect()
}

/// A piece with its inclusive character range inside the word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WordPiece {
    pub piece_id: u32,
    pub start: usize,
    pub end: usize,
    pub is_continuation: bool,
}

/// Greedy longest-match-first segmentation of a single word.
pub fn wordpiece_word(word: &str, vocab: &Vocab) -> Vec<WordPiece> {
    let chars: Vec<char> = word.chars().collect();
    if chars.is_empty() {
        return Vec::new();
    }
    let unk = vec![WordPiece {
        piece_id: vocab.unk_id(),
        start: 0,
        end: chars.len() - 1,
        is_continuation: false,
    }];
    if chars.len() > MAX_WORD_CHARS {
        return unk;
    }
    let mut pieces = Vec::new();
    let mut cursor = 0;
    let mut candidate = String::new();
    while cursor < chars.len() {
        let max_end = chars.len().min(cursor + vocab.longest_piece);
        let found = (cursor + 1..=max_end).rev().find_map(|end| {
            candidate.clear();
            if cursor > 0 {
                candidate.push_str(CONTINUATION_PREFIX);
            }
            candidate.extend(&chars[cursor..end]);
            vocab.id(&candidate).map(|id| (id, end))
        });
        match found {
            Some((piece_id, end)) => {
                pieces.push(WordPiece {
                    piece_id,
                    start: cursor,
                    end: end - 1,
                    is_continuation: cursor > 0,
                });
                cursor = end;
            }
            None => return unk,
        }
    }
    pieces
}

/// A token with its inclusive character range in the original text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TokenAlignment {
    pub piece_id: u32,
    pub start: usize,
    pub end: usize,
    pub is_continuation: bool,
}

pub fn tokenize(text: &str, vocab: &Vocab) -> Vec<TokenAlignment> {
    let lowered = lowercase(text);
    let mut tokens = Vec::new();
    for word in basic_split(&lowered) {
        for p in wordpiece_word(&word.text, vocab) {
            tokens.push(TokenAlignment {
                piece_id: p.piece_id,
                start: word.start + p.start,
                end: word.start + p.end,
                is_continuation: p.is_continuation,
            });
        }
    }
    tokens
}

/// Builds a vocabulary from raw texts: `[PAD]`, `[UNK]`, every lowercased
/// word seen at least `min_count` times (most frequent first), then every
/// single character and its `##` continuation form.
pub fn build_vocab<'a, I>(texts: I, min_count: usize) -> Vocab
where
    I: IntoIterator<Item = &'a str>,
{
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut chars: BTreeSet<char> = BTreeSet::new();
    for text in texts {
        for word in basic_split(&lowercase(text)) {
            chars.extend(word.text.chars());
            *counts.entry(word.text).or_default() += 1;
        }
    }
    let mut words: Vec<(String, usize)> = counts
        .into_iter()
        .filter(|(w, n)| *n >= min_count.max(1) && w.chars().count() > 1)
        .collect();
    words.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

    let mut pieces = vec![PAD.to_string(), UNK.to_string()];
    pieces.extend(words.into_iter().map(|(w, _)| w));
    pieces.extend(chars.iter().map(|c| c.to_string()));
    pieces.extend(chars.iter().map(|c| format!("{CONTINUATION_PREFIX}{c}")));
    pieces.retain({
        let mut seen = BTreeSet::new();
        move |p| seen.insert(p.clone())
    });
    Vocab::from_pieces(pieces).expect("builder always emits the special pieces")
}
