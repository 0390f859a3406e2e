#![no_main]
use libfuzzer_sys::fuzz_target;
use toxspan::corpus::{parse_tsd_reader, write_tsd_writer};

fuzz_target!(|data: &[u8]| {
    let Ok(comments) = parse_tsd_reader(data) else { return };
    for c in &comments {
        assert!(c.toxic_offsets.iter().all(|o| o < c.char_len()));
    }
    // whatever parses must survive a write/read cycle unchanged
    let mut out = Vec::new();
    write_tsd_writer(&mut out, &comments).unwrap();
    let again = parse_tsd_reader(out.as_slice()).unwrap();
    assert_eq!(again, comments);
});
