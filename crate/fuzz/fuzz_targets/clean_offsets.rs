#![no_main]
use libfuzzer_sys::fuzz_target;
use toxspan::corpus::OffsetSet;
use toxspan::spanclean::{clean_offsets_with, CleanOptions};

fuzz_target!(|input: (String, Vec<u16>, bool)| {
    let (text, raw, discard_partial_words) = input;
    let raw: OffsetSet = raw.into_iter().map(usize::from).collect();
    let opts = CleanOptions { discard_partial_words };
    let (clean, _) = clean_offsets_with(&text, &raw, &opts);
    let len = text.chars().count();
    assert!(clean.iter().all(|o| o < len));
    assert!(clean.to_spans().iter().all(|s| s.len() >= 2));
    assert_eq!(clean_offsets_with(&text, &clean, &opts).0, clean);
});
