use ndarray::s;
use toxspan::encoder::{forward, init_parameters, Batch, DepthSpec, EncoderConfig, Mode, Parameters};

fn toy(depth: DepthSpec) -> EncoderConfig {
    EncoderConfig::new(40, 12, 4, 3, 16).with_depth(depth)
}

#[test]
fn head_width_is_depth_count_times_hidden() {
    let d = 12;
    for bits in 1u32..16 {
        let k: Vec<usize> = (1..=4).filter(|b| bits & (1 << (b - 1)) != 0).collect();
        let cfg = toy(DepthSpec::Blocks(k.clone()));
        cfg.validate().unwrap();
        assert_eq!(cfg.classifier_input_dim(), k.len() * d, "K = {k:?}");
        let p = Parameters::<f32>::zeros(&cfg);
        assert_eq!(p.classifier_w.dim(), (k.len() * d, 2));
        let batch = Batch::from_sequences(&[vec![3, 4, 5]], 0);
        let out = forward(&p, &cfg, &batch, Mode::Eval).unwrap();
        assert_eq!(out.logits.dim(), (1, 3, 2));
    }
}

#[test]
fn depth_order_is_irrelevant() {
    let a = toy(DepthSpec::Blocks(vec![3, 1]));
    let b = toy(DepthSpec::Blocks(vec![1, 3]));
    assert_eq!(a.depth_blocks(), vec![1, 3]);
    let p = init_parameters::<f64>(&a, 5);
    let batch = Batch::from_sequences(&[vec![1, 2, 3, 9]], 0);
    let la = forward(&p, &a, &batch, Mode::Eval).unwrap().logits;
    let lb = forward(&p, &b, &batch, Mode::Eval).unwrap().logits;
    assert_eq!(la, lb);
}

#[test]
fn padding_does_not_leak_into_real_positions() {
    let cfg = toy(DepthSpec::last(3));
    let p = init_parameters::<f64>(&cfg, 11);
    let seq: Vec<u32> = vec![5, 8, 13, 21, 34, 2];
    let alone = forward(&p, &cfg, &Batch::from_sequences(std::slice::from_ref(&seq), 0), Mode::Eval).unwrap();
    let long: Vec<u32> = (1..=14).collect();
    let padded = forward(&p, &cfg, &Batch::from_sequences(&[seq.clone(), long], 0), Mode::Eval).unwrap();
    let a = alone.logits.slice(s![0, .., ..]);
    let b = padded.logits.slice(s![0, ..seq.len(), ..]);
    let diff = (&a - &b).mapv(f64::abs).fold(0.0f64, |m, &v| m.max(v));
    assert!(diff < 1e-6, "max diff {diff}");
    for h in &padded.hidden.0 {
        assert!(h.iter().all(|v| v.is_finite()));
    }
}

#[test]
fn eval_is_deterministic_and_dropout_free() {
    let cfg = toy(DepthSpec::last(2)).with_dropout(0.3);
    let p = init_parameters::<f32>(&cfg, 2);
    let batch = Batch::from_sequences(&[vec![1, 2, 3], vec![4, 5]], 0);
    let a = forward(&p, &cfg, &batch, Mode::Eval).unwrap();
    let b = forward(&p, &cfg, &batch, Mode::Eval).unwrap();
    assert_eq!(a, b);

    let t1 = forward(&p, &cfg, &batch, Mode::Train { seed: 1 }).unwrap();
    let t1b = forward(&p, &cfg, &batch, Mode::Train { seed: 1 }).unwrap();
    let t2 = forward(&p, &cfg, &batch, Mode::Train { seed: 2 }).unwrap();
    assert_eq!(t1, t1b);
    assert_ne!(t1.logits, t2.logits);
    assert_ne!(t1.logits, a.logits);

    let no_drop = cfg.clone().with_dropout(0.0);
    let e = forward(&p, &no_drop, &batch, Mode::Eval).unwrap();
    let t = forward(&p, &no_drop, &batch, Mode::Train { seed: 9 }).unwrap();
    assert_eq!(e, t);
}

#[test]
fn precisions_agree() {
    let cfg = toy(DepthSpec::last(4));
    let p64 = init_parameters::<f64>(&cfg, 3);
    let p32 = p64.cast::<f32>(&cfg);
    let batch = Batch::from_sequences(&[vec![7, 1, 30, 2, 2]], 0);
    let a = forward(&p64, &cfg, &batch, Mode::Eval).unwrap().logits;
    let b = forward(&p32, &cfg, &batch, Mode::Eval).unwrap().logits.mapv(f64::from);
    let diff = (&a - &b).mapv(f64::abs).fold(0.0f64, |m, &v| m.max(v));
    assert!(diff < 1e-4, "f32 vs f64 diff {diff}");
}
