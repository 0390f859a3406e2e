#![no_main]
use libfuzzer_sys::fuzz_target;
use toxspan::corpus::{offsets_to_spans, parse_span_list, spans_to_offsets};

fuzz_target!(|data: &str| {
    if let Ok(set) = parse_span_list(data) {
        assert_eq!(parse_span_list(&set.to_string()).unwrap(), set);
        assert_eq!(spans_to_offsets(&offsets_to_spans(&set)), set);
    }
});
