#![no_main]
use libfuzzer_sys::fuzz_target;
use toxspan::encoder::{read_checkpoint, write_checkpoint, Parameters};

fuzz_target!(|data: &[u8]| {
    let Ok((config, meta, params)) = read_checkpoint::<f64, _>(data) else { return };
    let mut out = Vec::new();
    write_checkpoint(&mut out, &config, &meta, &params).unwrap();
    let (c2, m2, p2): (_, _, Parameters<f64>) = read_checkpoint(out.as_slice()).unwrap();
    assert_eq!(c2, config);
    assert_eq!(m2, meta);
    // NaN payloads compare unequal, so compare bit patterns
    let bits = |p: &Parameters<f64>| -> Vec<u64> {
        p.tensors().iter().flat_map(|t| t.data.iter().map(|v| v.to_bits())).collect()
    };
    assert_eq!(bits(&p2), bits(&params));
});
