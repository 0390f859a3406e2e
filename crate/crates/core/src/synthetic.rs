//! Planted-lexicon corpora: toxicity is exactly membership of a word in a
//! fixed list, so a working model can learn it perfectly.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Comment, OffsetSet};

pub const TOXIC_LEXICON: [&str; 5] = ["idiot", "stupid", "moron", "loser", "pathetic"];

pub const NEUTRAL_WORDS: [&str; 32] = [
    "you", "are", "the", "a", "this", "that", "is", "my", "friend", "really", "very", "just", "what", "post",
    "article", "comment", "people", "think", "about", "again", "and", "so", "here", "city", "vote", "today",
    "never", "always", "nice", "good", "day", "news",
];

/// `count` sentences of 4 to 10 words. Each word is toxic with probability
/// one in four; gold offsets cover toxic words and the whitespace between
/// adjacent toxic words.
pub fn planted_lexicon_corpus(count: usize, seed: u64) -> Vec<Comment> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|id| {
            let n_words = rng.random_range(4..=10);
            let mut text = String::new();
            let mut offsets = OffsetSet::new();
            let mut pos = 0usize;
            let mut prev_toxic_end: Option<usize> = None;
            for i in 0..n_words {
                if i > 0 {
                    text.push(' ');
                    pos += 1;
                }
                let toxic = rng.random_bool(0.25);
                let word = if toxic {
                    *TOXIC_LEXICON.choose(&mut rng).expect("non-empty")
                } else {
                    *NEUTRAL_WORDS.choose(&mut rng).expect("non-empty")
                };
                let shown = if i == 0 || rng.random_bool(0.1) { capitalize(word) } else { word.to_string() };
                let len = shown.chars().count();
                if toxic {
                    if let Some(end) = prev_toxic_end {
                        offsets.extend(end + 1..pos);
                    }
                    offsets.extend(pos..pos + len);
                    prev_toxic_end = Some(pos + len - 1);
                } else {
                    prev_toxic_end = None;
                }
                text.push_str(&shown);
                pos += len;
            }
            text.push(*['.', '!', '?'].choose(&mut rng).expect("non-empty"));
            Comment::new(id, text, offsets).expect("offsets lie inside the generated text")
        })
        .collect()
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spanclean::clean_offsets;

    #[test]
    fn deterministic_and_already_clean() {
        let a = planted_lexicon_corpus(32, 1);
        assert_eq!(a, planted_lexicon_corpus(32, 1));
        assert_ne!(a, planted_lexicon_corpus(32, 2));
        for c in &a {
            assert_eq!(clean_offsets(&c.text, &c.toxic_offsets).0, c.toxic_offsets, "{}", c.text);
        }
        assert!(a.iter().filter(|c| !c.toxic_offsets.is_empty()).count() > 8);
    }

    #[test]
    fn gold_covers_exactly_the_lexicon_words() {
        for c in planted_lexicon_corpus(16, 5) {
            let chars: Vec<char> = c.text.chars().collect();
            for span in c.toxic_offsets.to_spans() {
                let s: String = chars[span.start..=span.end].iter().collect::<String>().to_lowercase();
                assert!(s.split(' ').all(|w| TOXIC_LEXICON.contains(&w)), "{s}");
            }
        }
    }
}
