use proptest::collection::{btree_set, vec};
use proptest::prelude::*;
use toxspan::chars::{is_whitespace, is_word_char};
use toxspan::corpus::{offsets_to_spans, parse_span_list, spans_to_offsets, OffsetSet};
use toxspan::ensemble::{majority_vote, VoteConfig};
use toxspan::labeling::{labels_to_offsets, offsets_to_labels, whitespace_fill, Label, LabeledSequence};
use toxspan::metrics::{brute_force_f1, comment_f1};
use toxspan::spanclean::clean_offsets;
use toxspan::tokenizer::{basic_split, build_vocab, tokenize, wordpiece_word, Vocab, CONTINUATION_PREFIX};

fn offset_set(max: usize) -> impl Strategy<Value = OffsetSet> {
    btree_set(0..max, 0..max.min(40)).prop_map(|s| s.into_iter().collect())
}

/// Text over an alphabet that exercises every character class the
/// cleaning and tokenization rules care about.
fn text() -> impl Strategy<Value = String> {
    let alphabet = vec![
        'a', 'b', 'c', 'x', 'Y', 'Z', 'é', 'ß', 'İ', '1', '7', ' ', ' ', '\t', '\u{a0}', '\n', '.', ',', '!', '\'',
        '-', '$', '½', '日',
    ];
    vec(proptest::sample::select(alphabet), 0..40).prop_map(|cs| cs.into_iter().collect())
}

fn text_and_offsets() -> impl Strategy<Value = (String, OffsetSet)> {
    text().prop_flat_map(|t| {
        let n = t.chars().count().max(1);
        (Just(t), offset_set(n))
    })
    .prop_map(|(t, o)| {
        let n = t.chars().count();
        let o = o.iter().filter(|&i| i < n).collect();
        (t, o)
    })
}

proptest! {
    #[test]
    fn spans_round_trip(o in offset_set(200)) {
        let spans = offsets_to_spans(&o);
        prop_assert_eq!(spans_to_offsets(&spans), o.clone());
        for w in spans.windows(2) {
            prop_assert!(w[0].end + 1 < w[1].start, "runs must be maximal and sorted");
        }
    }

    #[test]
    fn span_list_reserializes(o in offset_set(100_000), compact in any::<bool>()) {
        let mut s = o.to_string();
        if compact {
            s = s.replace(", ", ",");
        }
        prop_assert_eq!(parse_span_list(&s).unwrap().to_string(), o.to_string());
    }

    #[test]
    fn cleaning_invariants((t, raw) in text_and_offsets()) {
        let chars: Vec<char> = t.chars().collect();
        let (clean, _) = clean_offsets(&t, &raw);
        prop_assert!(clean.iter().all(|o| o < chars.len()));
        for span in clean.to_spans() {
            prop_assert!(span.len() >= 2);
            prop_assert!(!is_whitespace(chars[span.start]) && !is_whitespace(chars[span.end]));
            // no span boundary falls strictly inside a run of word characters
            prop_assert!(span.start == 0 || !is_word_char(chars[span.start - 1]) || !is_word_char(chars[span.start]));
            prop_assert!(span.end + 1 == chars.len() || !is_word_char(chars[span.end + 1]) || !is_word_char(chars[span.end]));
        }
        prop_assert_eq!(clean_offsets(&t, &clean).0, clean);
    }

    #[test]
    fn tokens_tile_words(t in text()) {
        let vocab = build_vocab([t.as_str(), "ab abc xy"], 1);
        let toks = tokenize(&t, &vocab);
        prop_assert_eq!(&toks, &tokenize(&t, &vocab));
        for w in toks.windows(2) {
            prop_assert!(w[0].end < w[1].start);
        }
        let mut covered = Vec::new();
        for tok in &toks {
            prop_assert!(tok.start <= tok.end);
            covered.extend(tok.start..=tok.end);
        }
        let words: Vec<usize> = basic_split(&t).iter().flat_map(|w| w.start..=w.end).collect();
        prop_assert_eq!(covered, words);
    }

    #[test]
    fn wordpiece_is_greedy(word in "[a-e]{1,12}") {
        let pieces = ["[PAD]", "[UNK]", "a", "ab", "abc", "b", "c", "d", "de", "##a", "##b", "##c", "##cd", "##d", "##e", "##de", "##bcd"];
        let vocab = Vocab::from_pieces(pieces).unwrap();
        let chars: Vec<char> = word.chars().collect();
        let out = wordpiece_word(&word, &vocab);
        if out.len() == 1 && out[0].piece_id == vocab.unk_id() {
            return Ok(());
        }
        for p in &out {
            for longer_end in p.end + 1..chars.len() {
                let mut cand: String = chars[p.start..=longer_end].iter().collect();
                if p.start > 0 {
                    cand.insert_str(0, CONTINUATION_PREFIX);
                }
                prop_assert!(vocab.id(&cand).is_none(), "{cand} was available at {}", p.start);
            }
        }
    }

    #[test]
    fn labels_are_monotone((t, small) in text_and_offsets(), extra in offset_set(40)) {
        let vocab = build_vocab([t.as_str()], 1);
        let toks = tokenize(&t, &vocab);
        let n = t.chars().count();
        let big = small.union(&extra.iter().filter(|&o| o < n).collect());
        let a = offsets_to_labels(&toks, &small);
        let b = offsets_to_labels(&toks, &big);
        for (x, y) in a.labels.iter().zip(&b.labels) {
            prop_assert!(!(x.is_toxic() && !y.is_toxic()));
        }
    }

    #[test]
    fn fill_adds_only_whitespace_between_toxic_pairs(t in text(), bits in vec(any::<bool>(), 40)) {
        let vocab = build_vocab([t.as_str()], 1);
        let toks = tokenize(&t, &vocab);
        let labels: Vec<Label> = toks.iter().zip(bits.iter().cycle())
            .map(|(_, &b)| if b { Label::Toxic } else { Label::NonToxic }).collect();
        let seq = LabeledSequence::new(toks, labels);
        let base: OffsetSet = seq.tokens.iter().zip(&seq.labels)
            .filter(|(_, l)| l.is_toxic()).flat_map(|(t, _)| t.start..=t.end).collect();
        let filled = whitespace_fill(&t, &seq, &base);
        let chars: Vec<char> = t.chars().collect();
        prop_assert!(base.is_subset(&filled));
        for o in filled.iter().filter(|&o| !base.contains(o)) {
            prop_assert!(is_whitespace(chars[o]));
            let gap = seq.tokens.windows(2).zip(seq.labels.windows(2))
                .any(|(p, l)| l[0].is_toxic() && l[1].is_toxic() && p[0].end < o && o < p[1].start);
            prop_assert!(gap);
        }
    }

    #[test]
    fn f1_laws(g in offset_set(60), p in offset_set(60)) {
        let f = comment_f1(&g, &p);
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert_eq!(f, comment_f1(&p, &g));
        prop_assert_eq!(f == 1.0, g == p);
        prop_assert!((f - brute_force_f1(&g, &p)).abs() <= 1e-12);
    }

    #[test]
    fn f1_improves_when_pred_grows_inside_gold(g in offset_set(60), keep in vec(any::<bool>(), 60)) {
        let pred: OffsetSet = g.iter().zip(keep.iter().cycle()).filter(|(_, &k)| k).map(|(o, _)| o).collect();
        for o in g.iter().filter(|&o| !pred.contains(o)) {
            let mut bigger = pred.clone();
            bigger.insert(o);
            prop_assert!(comment_f1(&g, &bigger) >= comment_f1(&g, &pred));
        }
    }

    #[test]
    fn ensemble_laws(members in vec(offset_set(30), 1..6), extra in 0usize..30, who in 0usize..6) {
        let cfg = VoteConfig::new(members.len()).unwrap();
        let out = majority_vote(&members, &cfg).unwrap();
        let union = members.iter().fold(OffsetSet::new(), |a, m| a.union(m));
        let inter: OffsetSet = union.iter().filter(|&o| members.iter().all(|m| m.contains(o))).collect();
        prop_assert!(inter.is_subset(&out));
        prop_assert!(out.is_subset(&union));

        let mut rev = members.clone();
        rev.reverse();
        prop_assert_eq!(&majority_vote(&rev, &cfg).unwrap(), &out);

        let mut more = members.clone();
        let i = who % more.len();
        more[i].insert(extra);
        prop_assert!(out.is_subset(&majority_vote(&more, &cfg).unwrap()));

        let single = VoteConfig::new(1).unwrap();
        prop_assert_eq!(&majority_vote(&members[..1], &single).unwrap(), &members[0]);
    }

    #[test]
    fn word_aligned_labels_round_trip(words in vec(("[a-z]{1,6}", any::<bool>()), 1..12)) {
        // Whole-word annotations over single-space text: recovering offsets
        // from token labels is exact once whitespace between adjacent toxic
        // words is part of the gold annotation.
        let mut text = String::new();
        let mut gold = OffsetSet::new();
        let mut prev_toxic: Option<usize> = None;
        for (i, (w, toxic)) in words.iter().enumerate() {
            if i > 0 {
                text.push(' ');
            }
            let start = text.chars().count();
            text.push_str(w);
            let end = start + w.len() - 1;
            if *toxic {
                if let Some(pe) = prev_toxic {
                    gold.extend(pe + 1..start);
                }
                gold.extend(start..=end);
                prev_toxic = Some(end);
            } else {
                prev_toxic = None;
            }
        }
        let vocab = build_vocab([text.as_str()], 2);
        let toks = tokenize(&text, &vocab);
        let seq = offsets_to_labels(&toks, &gold);
        prop_assert_eq!(labels_to_offsets(&text, &seq), gold);
    }
}
