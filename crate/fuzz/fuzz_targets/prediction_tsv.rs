#![no_main]
use libfuzzer_sys::fuzz_target;
use toxspan::predictions::{format_predictions, parse_offset_data, parse_predictions};

fuzz_target!(|data: &str| {
    let _ = parse_offset_data(data);
    if let Ok(records) = parse_predictions(data) {
        assert_eq!(parse_predictions(&format_predictions(&records)).unwrap(), records);
    }
});
