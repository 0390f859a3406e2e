#![no_main]
use libfuzzer_sys::fuzz_target;
use toxspan::tokenizer::{basic_split, build_vocab, tokenize, Vocab};

fuzz_target!(|data: &str| {
    let fixed = Vocab::from_pieces(["[PAD]", "[UNK]", "you", "are", "an", "idiot", "id", "##iot", "##s", "!"]).unwrap();
    let learned = build_vocab([data], 1);
    let len = data.chars().count();
    let words: Vec<usize> = basic_split(data).iter().flat_map(|w| w.start..=w.end).collect();
    for vocab in [&fixed, &learned] {
        let toks = tokenize(data, vocab);
        let mut covered = Vec::new();
        for t in &toks {
            assert!(t.start <= t.end && t.end < len);
            covered.extend(t.start..=t.end);
        }
        assert_eq!(covered, words);
    }
});
