#![no_main]
use libfuzzer_sys::fuzz_target;
use toxspan::tokenizer::{tokenize, Vocab};

fuzz_target!(|data: &str| {
    let Ok(vocab) = Vocab::from_text(data) else { return };
    assert_eq!(Vocab::from_text(&vocab.to_text()).unwrap().pieces(), vocab.pieces());
    // tokenizing with a hostile vocabulary must stay in bounds
    for t in tokenize(data, &vocab) {
        assert!((t.piece_id as usize) < vocab.len());
    }
});
