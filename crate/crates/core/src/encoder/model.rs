use ndarray::{s, Array1, Array2, Array3, ArrayView1, ArrayView2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::params::{BlockParams, Parameters};
use super::{EncoderConfig, EncoderError, Scalar};
use crate::labeling::Label;
use crate::training::loss::{smoothed_targets, LossConfig};

const LAYER_NORM_EPS: f64 = 1e-12;

/// Right-padded token ids with their attention mask (`true` = real token).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Batch {
    pub token_ids: Array2<u32>,
    pub mask: Array2<bool>,
}

impl Batch {
    /// Pads `sequences` on the right with `pad_id` to the longest length.
    pub fn from_sequences(sequences: &[Vec<u32>], pad_id: u32) -> Self {
        let width = sequences.iter().map(Vec::len).max().unwrap_or(0);
        let mut token_ids = Array2::from_elem((sequences.len(), width), pad_id);
        let mut mask = Array2::from_elem((sequences.len(), width), false);
        for (row, seq) in sequences.iter().enumerate() {
            for (col, &id) in seq.iter().enumerate() {
                token_ids[[row, col]] = id;
                mask[[row, col]] = true;
            }
        }
        Batch { token_ids, mask }
    }

    pub fn batch_size(&self) -> usize {
        self.token_ids.nrows()
    }

    pub fn seq_len(&self) -> usize {
        self.token_ids.ncols()
    }
}

/// Dropout is only applied in training mode; the seed fixes the mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Eval,
    Train { seed: u64 },
}

/// Hidden states of the embedding output (entry 0) and every block, each
/// `batch x seq_len x hidden_dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct HiddenStack<F>(pub Vec<Array3<F>>);

#[derive(Debug, Clone, PartialEq)]
pub struct ForwardOutput<F> {
    /// `batch x seq_len x num_classes`
    pub logits: Array3<F>,
    pub hidden: HiddenStack<F>,
}

fn c<F: Scalar>(v: f64) -> F {
    F::from_f64(v)
}

fn gelu<F: Scalar>(x: F) -> F {
    let x64 = x.as_f64();
    c(0.5 * x64 * (1.0 + libm::erf(x64 / std::f64::consts::SQRT_2)))
}

fn gelu_grad<F: Scalar>(x: F) -> F {
    let x64 = x.as_f64();
    let cdf = 0.5 * (1.0 + libm::erf(x64 / std::f64::consts::SQRT_2));
    let pdf = (-0.5 * x64 * x64).exp() / (2.0 * std::f64::consts::PI).sqrt();
    c(cdf + x64 * pdf)
}

struct LayerNormCache<F> {
    normalized: Array2<F>,
    inv_std: Array1<F>,
}

fn layer_norm<F: Scalar>(x: &Array2<F>, gain: &Array1<F>, bias: &Array1<F>) -> (Array2<F>, LayerNormCache<F>) {
    let width = c::<F>(x.ncols() as f64);
    let mut normalized = Array2::zeros(x.raw_dim());
    let mut inv_std = Array1::zeros(x.nrows());
    for (i, row) in x.rows().into_iter().enumerate() {
        let mean = row.sum() / width;
        let var = row.iter().map(|&v| (v - mean) * (v - mean)).sum::<F>() / width;
        let is = (var + c(LAYER_NORM_EPS)).sqrt().recip();
        inv_std[i] = is;
        normalized.row_mut(i).assign(&row.mapv(|v| (v - mean) * is));
    }
    let y = &normalized * gain + bias;
    (y, LayerNormCache { normalized, inv_std })
}

/// Returns `(d_input, d_gain, d_bias)`.
fn layer_norm_backward<F: Scalar>(
    dy: &Array2<F>,
    cache: &LayerNormCache<F>,
    gain: &Array1<F>,
) -> (Array2<F>, Array1<F>, Array1<F>) {
    let dgain = (dy * &cache.normalized).sum_axis(Axis(0));
    let dbias = dy.sum_axis(Axis(0));
    let dnorm = dy * gain;
    let width = c::<F>(dy.ncols() as f64);
    let mut dx = Array2::zeros(dy.raw_dim());
    for i in 0..dy.nrows() {
        let g = dnorm.row(i);
        let xh = cache.normalized.row(i);
        let m1 = g.sum() / width;
        let m2 = g.iter().zip(xh.iter()).map(|(&a, &b)| a * b).sum::<F>() / width;
        let is = cache.inv_std[i];
        for j in 0..dy.ncols() {
            dx[[i, j]] = is * (g[j] - m1 - xh[j] * m2);
        }
    }
    (dx, dgain, dbias)
}

fn affine<F: Scalar>(x: &Array2<F>, w: &Array2<F>, b: &Array1<F>) -> Array2<F> {
    x.dot(w) + b
}

/// Softmax over the unmasked keys of each row; a row with no unmasked key
/// is all zeros.
fn masked_softmax<F: Scalar>(scores: &mut Array2<F>, key_mask: ArrayView1<bool>) {
    for mut row in scores.rows_mut() {
        let max = row
            .iter()
            .zip(key_mask.iter())
            .filter(|(_, &m)| m)
            .map(|(&s, _)| s)
            .fold(F::neg_infinity(), F::max);
        if max == F::neg_infinity() {
            row.fill(F::zero());
            continue;
        }
        let mut total = F::zero();
        for (v, &m) in row.iter_mut().zip(key_mask.iter()) {
            *v = if m { (*v - max).exp() } else { F::zero() };
            total += *v;
        }
        row.mapv_inplace(|v| v / total);
    }
}

struct BlockCache<F> {
    input: Array2<F>,
    q: Array2<F>,
    k: Array2<F>,
    v: Array2<F>,
    /// One `seq x seq` probability matrix per head.
    attn: Vec<Array2<F>>,
    ctx: Array2<F>,
    ln1: LayerNormCache<F>,
    post_attn: Array2<F>,
    ff_pre: Array2<F>,
    ff_act: Array2<F>,
    ln2: LayerNormCache<F>,
}

fn block_forward<F: Scalar>(
    p: &BlockParams<F>,
    config: &EncoderConfig,
    x: &Array2<F>,
    mask: ArrayView1<bool>,
) -> (Array2<F>, BlockCache<F>) {
    let heads = config.num_heads;
    let dh = config.head_dim();
    let scale = c::<F>(1.0 / (dh as f64).sqrt());
    let q = affine(x, &p.query_w, &p.query_b);
    let k = affine(x, &p.key_w, &p.key_b);
    let v = affine(x, &p.value_w, &p.value_b);
    let mut ctx = Array2::zeros(x.raw_dim());
    let mut attn = Vec::with_capacity(heads);
    for h in 0..heads {
        let cols = s![.., h * dh..(h + 1) * dh];
        let mut scores = q.slice(cols).dot(&k.slice(cols).t()) * scale;
        masked_softmax(&mut scores, mask);
        ctx.slice_mut(cols).assign(&scores.dot(&v.slice(cols)));
        attn.push(scores);
    }
    let attn_out = affine(&ctx, &p.out_w, &p.out_b);
    let (post_attn, ln1) = layer_norm(&(x + &attn_out), &p.ln1_gain, &p.ln1_bias);
    let ff_pre = affine(&post_attn, &p.ff_in_w, &p.ff_in_b);
    let ff_act = ff_pre.mapv(gelu);
    let ff_out = affine(&ff_act, &p.ff_out_w, &p.ff_out_b);
    let (out, ln2) = layer_norm(&(&post_attn + &ff_out), &p.ln2_gain, &p.ln2_bias);
    let cache = BlockCache { input: x.clone(), q, k, v, attn, ctx, ln1, post_attn, ff_pre, ff_act, ln2 };
    (out, cache)
}

/// Accumulates parameter gradients into `g` and returns the gradient with
/// respect to the block input.
fn block_backward<F: Scalar>(
    p: &BlockParams<F>,
    g: &mut BlockParams<F>,
    config: &EncoderConfig,
    cache: &BlockCache<F>,
    dout: &Array2<F>,
) -> Array2<F> {
    let heads = config.num_heads;
    let dh = config.head_dim();
    let scale = c::<F>(1.0 / (dh as f64).sqrt());

    let (dres2, dgain2, dbias2) = layer_norm_backward(dout, &cache.ln2, &p.ln2_gain);
    g.ln2_gain += &dgain2;
    g.ln2_bias += &dbias2;

    g.ff_out_w += &cache.ff_act.t().dot(&dres2);
    g.ff_out_b += &dres2.sum_axis(Axis(0));
    let dact = dres2.dot(&p.ff_out_w.t());
    let dpre = dact * &cache.ff_pre.mapv(gelu_grad);
    g.ff_in_w += &cache.post_attn.t().dot(&dpre);
    g.ff_in_b += &dpre.sum_axis(Axis(0));
    let dpost_attn = &dres2 + &dpre.dot(&p.ff_in_w.t());

    let (dres1, dgain1, dbias1) = layer_norm_backward(&dpost_attn, &cache.ln1, &p.ln1_gain);
    g.ln1_gain += &dgain1;
    g.ln1_bias += &dbias1;

    g.out_w += &cache.ctx.t().dot(&dres1);
    g.out_b += &dres1.sum_axis(Axis(0));
    let dctx = dres1.dot(&p.out_w.t());

    let mut dq = Array2::zeros(cache.q.raw_dim());
    let mut dk = Array2::zeros(cache.k.raw_dim());
    let mut dv = Array2::zeros(cache.v.raw_dim());
    for h in 0..heads {
        let cols = s![.., h * dh..(h + 1) * dh];
        let probs = &cache.attn[h];
        let dctx_h = dctx.slice(cols);
        let dprobs = dctx_h.dot(&cache.v.slice(cols).t());
        dv.slice_mut(cols).assign(&probs.t().dot(&dctx_h));
        let mut dscores = Array2::zeros(probs.raw_dim());
        for i in 0..probs.nrows() {
            let dot = probs.row(i).dot(&dprobs.row(i));
            for j in 0..probs.ncols() {
                dscores[[i, j]] = probs[[i, j]] * (dprobs[[i, j]] - dot) * scale;
            }
        }
        dq.slice_mut(cols).assign(&dscores.dot(&cache.k.slice(cols)));
        dk.slice_mut(cols).assign(&dscores.t().dot(&cache.q.slice(cols)));
    }

    let x = &cache.input;
    g.query_w += &x.t().dot(&dq);
    g.query_b += &dq.sum_axis(Axis(0));
    g.key_w += &x.t().dot(&dk);
    g.key_b += &dk.sum_axis(Axis(0));
    g.value_w += &x.t().dot(&dv);
    g.value_b += &dv.sum_axis(Axis(0));

    dres1 + dq.dot(&p.query_w.t()) + dk.dot(&p.key_w.t()) + dv.dot(&p.value_w.t())
}

struct SequenceCache<F> {
    blocks: Vec<BlockCache<F>>,
    /// `seq x (|K| * hidden_dim)` after dropout.
    head_input: Array2<F>,
    /// Dropout multipliers, same shape as `head_input`; `None` in eval mode.
    dropout: Option<Array2<F>>,
}

fn check_batch(config: &EncoderConfig, batch: &Batch) -> Result<(), EncoderError> {
    config.validate()?;
    if batch.token_ids.dim() != batch.mask.dim() {
        return Err(EncoderError::Shape(format!(
            "token ids {:?} vs mask {:?}",
            batch.token_ids.dim(),
            batch.mask.dim()
        )));
    }
    if batch.seq_len() > config.max_len {
        return Err(EncoderError::SequenceTooLong { len: batch.seq_len(), max_len: config.max_len });
    }
    if let Some(&id) = batch.token_ids.iter().find(|&&id| id as usize >= config.vocab_size) {
        return Err(EncoderError::TokenOutOfRange { id, vocab_size: config.vocab_size });
    }
    Ok(())
}

fn check_params<F: Scalar>(params: &Parameters<F>, config: &EncoderConfig) -> Result<(), EncoderError> {
    let expected = (config.classifier_input_dim(), config.num_classes);
    if params.classifier_w.dim() != expected {
        return Err(EncoderError::Shape(format!(
            "classifier weight {:?}, config expects {:?}",
            params.classifier_w.dim(),
            expected
        )));
    }
    if params.blocks.len() != config.num_blocks
        || params.token_embedding.dim() != (config.vocab_size, config.hidden_dim)
        || params.position_embedding.dim() != (config.max_len, config.hidden_dim)
    {
        return Err(EncoderError::Shape("parameters do not match config".into()));
    }
    Ok(())
}

/// Forward pass over one batch row. Returns logits, per-layer hidden states
/// and the cache needed by the backward pass.
fn sequence_forward<F: Scalar>(
    params: &Parameters<F>,
    config: &EncoderConfig,
    ids: ArrayView1<u32>,
    mask: ArrayView1<bool>,
    dropout_rng: Option<&mut ChaCha8Rng>,
) -> (Array2<F>, Vec<Array2<F>>, SequenceCache<F>) {
    let len = ids.len();
    let d = config.hidden_dim;
    let mut x = Array2::zeros((len, d));
    for (t, &id) in ids.iter().enumerate() {
        let row = &params.token_embedding.row(id as usize) + &params.position_embedding.row(t);
        x.row_mut(t).assign(&row);
    }
    let mut hidden = vec![x];
    let mut caches = Vec::with_capacity(config.num_blocks);
    for block in &params.blocks {
        let (out, cache) = block_forward(block, config, hidden.last().expect("non-empty"), mask);
        hidden.push(out);
        caches.push(cache);
    }

    let depth = config.depth_blocks();
    let mut head_input = Array2::zeros((len, depth.len() * d));
    for (slot, &k) in depth.iter().enumerate() {
        head_input.slice_mut(s![.., slot * d..(slot + 1) * d]).assign(&hidden[k]);
    }
    let dropout = dropout_rng.map(|rng| {
        let p = config.dropout;
        let keep_scale = c::<F>(1.0 / (1.0 - p));
        Array2::from_shape_simple_fn(head_input.raw_dim(), || {
            if rng.random::<f64>() < p {
                F::zero()
            } else {
                keep_scale
            }
        })
    });
    if let Some(m) = &dropout {
        head_input *= m;
    }
    let logits = affine(&head_input, &params.classifier_w, &params.classifier_b);
    (logits, hidden, SequenceCache { blocks: caches, head_input, dropout })
}

fn dropout_rng(mode: Mode, p: f64) -> Option<ChaCha8Rng> {
    match mode {
        Mode::Train { seed } if p > 0.0 => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    }
}

/// Runs the encoder and the multi-depth head over a batch.
pub fn forward<F: Scalar>(
    params: &Parameters<F>,
    config: &EncoderConfig,
    batch: &Batch,
    mode: Mode,
) -> Result<ForwardOutput<F>, EncoderError> {
    check_batch(config, batch)?;
    check_params(params, config)?;
    let (b, t) = (batch.batch_size(), batch.seq_len());
    let mut logits = Array3::zeros((b, t, config.num_classes));
    let mut hidden = vec![Array3::zeros((b, t, config.hidden_dim)); config.num_blocks + 1];
    let mut rng = dropout_rng(mode, config.dropout);
    for row in 0..b {
        let (l, h, _) = sequence_forward(params, config, batch.token_ids.row(row), batch.mask.row(row), rng.as_mut());
        logits.index_axis_mut(Axis(0), row).assign(&l);
        for (dst, src) in hidden.iter_mut().zip(h) {
            dst.index_axis_mut(Axis(0), row).assign(&src);
        }
    }
    Ok(ForwardOutput { logits, hidden: HiddenStack(hidden) })
}

/// Loss and exact gradients for one batch.
///
/// The loss is the label-smoothed cross-entropy averaged over the unmasked
/// positions of the whole batch; masked positions contribute nothing. A
/// batch with no unmasked position has zero loss and zero gradients.
pub fn backward<F: Scalar>(
    params: &Parameters<F>,
    config: &EncoderConfig,
    batch: &Batch,
    labels: &Array2<usize>,
    loss: &LossConfig,
    mode: Mode,
) -> Result<(F, Parameters<F>), EncoderError> {
    check_batch(config, batch)?;
    check_params(params, config)?;
    if labels.dim() != batch.token_ids.dim() {
        return Err(EncoderError::Shape(format!("labels {:?} vs batch {:?}", labels.dim(), batch.token_ids.dim())));
    }
    if let Some((&l, _)) = labels.iter().zip(batch.mask.iter()).find(|(&l, &m)| m && l >= config.num_classes) {
        return Err(EncoderError::Shape(format!("label {l} outside 0..{}", config.num_classes)));
    }
    let mut grads = params.zeros_like();
    let active = batch.mask.iter().filter(|&&m| m).count();
    if active == 0 {
        return Ok((F::zero(), grads));
    }
    let norm = c::<F>(1.0 / active as f64);
    let classes = config.num_classes;
    let d = config.hidden_dim;
    let depth = config.depth_blocks();
    let mut total_loss = F::zero();
    let mut rng = dropout_rng(mode, config.dropout);

    for row in 0..batch.batch_size() {
        let ids = batch.token_ids.row(row);
        let mask = batch.mask.row(row);
        let (logits, _, cache) = sequence_forward(params, config, ids, mask, rng.as_mut());

        let mut dlogits = Array2::<F>::zeros(logits.raw_dim());
        for t in 0..logits.nrows() {
            if !mask[t] {
                continue;
            }
            let target = smoothed_targets::<F>(labels[[row, t]], classes, loss.epsilon);
            let (log_probs, probs) = log_softmax(logits.row(t));
            for k in 0..classes {
                total_loss -= target[k] * log_probs[k];
                dlogits[[t, k]] = (probs[k] - target[k]) * norm;
            }
        }

        grads.classifier_w += &cache.head_input.t().dot(&dlogits);
        grads.classifier_b += &dlogits.sum_axis(Axis(0));
        let mut dhead = dlogits.dot(&params.classifier_w.t());
        if let Some(m) = &cache.dropout {
            dhead *= m;
        }

        let mut dhidden: Vec<Option<Array2<F>>> = vec![None; config.num_blocks + 1];
        for (slot, &k) in depth.iter().enumerate() {
            dhidden[k] = Some(dhead.slice(s![.., slot * d..(slot + 1) * d]).to_owned());
        }
        for layer in (1..=config.num_blocks).rev() {
            let Some(dout) = dhidden[layer].take() else { continue };
            let dinput = block_backward(
                &params.blocks[layer - 1],
                &mut grads.blocks[layer - 1],
                config,
                &cache.blocks[layer - 1],
                &dout,
            );
            dhidden[layer - 1] = Some(match dhidden[layer - 1].take() {
                Some(acc) => acc + dinput,
                None => dinput,
            });
        }
        if let Some(demb) = &dhidden[0] {
            for (t, &id) in ids.iter().enumerate() {
                let g = demb.row(t);
                let mut tok = grads.token_embedding.row_mut(id as usize);
                tok += &g;
                let mut pos = grads.position_embedding.row_mut(t);
                pos += &g;
            }
        }
    }
    Ok((total_loss * norm, grads))
}

/// Returns `(log_softmax, softmax)` of one logit row.
pub(crate) fn log_softmax<F: Scalar>(row: ArrayView1<F>) -> (Vec<F>, Vec<F>) {
    let max = row.iter().copied().fold(F::neg_infinity(), F::max);
    let sum: F = row.iter().map(|&v| (v - max).exp()).sum();
    let log_z = max + sum.ln();
    let log_probs: Vec<F> = row.iter().map(|&v| v - log_z).collect();
    let probs = log_probs.iter().map(|v| v.exp()).collect();
    (log_probs, probs)
}

/// Argmax class per unmasked token, ties broken toward the lower class
/// index (non-toxic). Masked positions are left out, so row `i` of the
/// result has one label per unmasked position of batch row `i`.
pub fn predict_labels<F: Scalar>(
    params: &Parameters<F>,
    config: &EncoderConfig,
    batch: &Batch,
) -> Result<Vec<Vec<Label>>, EncoderError> {
    let out = forward(params, config, batch, Mode::Eval)?;
    Ok((0..batch.batch_size())
        .map(|row| {
            let logits: ArrayView2<F> = out.logits.index_axis(Axis(0), row);
            logits
                .rows()
                .into_iter()
                .zip(batch.mask.row(row))
                .filter(|(_, &m)| m)
                .map(|(l, _)| Label::from_class_index(argmax(l)))
                .collect()
        })
        .collect())
}

pub(crate) fn argmax<F: Scalar>(row: ArrayView1<F>) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::{init_parameters, DepthSpec};
    use ndarray::array;

    fn tiny() -> EncoderConfig {
        EncoderConfig::new(20, 8, 2, 2, 6).with_depth(DepthSpec::last(2))
    }

    fn batch() -> Batch {
        Batch::from_sequences(&[vec![3, 4, 5, 6, 7], vec![8, 9]], 0)
    }

    #[test]
    fn logits_shape() {
        let cfg = tiny();
        let p = init_parameters::<f32>(&cfg, 0);
        let out = forward(&p, &cfg, &batch(), Mode::Eval).unwrap();
        assert_eq!(out.logits.dim(), (2, 5, 2));
        assert_eq!(out.hidden.0.len(), 3);
        assert!(out.hidden.0.iter().all(|h| h.dim() == (2, 5, 8)));
    }

    #[test]
    fn rejects_bad_input() {
        let cfg = tiny();
        let p = init_parameters::<f32>(&cfg, 0);
        let b = Batch::from_sequences(&[vec![20]], 0);
        assert_eq!(
            forward(&p, &cfg, &b, Mode::Eval).unwrap_err(),
            EncoderError::TokenOutOfRange { id: 20, vocab_size: 20 }
        );
        let b = Batch::from_sequences(&[vec![1; 7]], 0);
        assert_eq!(
            forward(&p, &cfg, &b, Mode::Eval).unwrap_err(),
            EncoderError::SequenceTooLong { len: 7, max_len: 6 }
        );
    }

    #[test]
    fn fully_masked_row_stays_finite() {
        let cfg = tiny();
        let p = init_parameters::<f32>(&cfg, 0);
        let mut b = batch();
        b.mask.row_mut(1).fill(false);
        let out = forward(&p, &cfg, &b, Mode::Eval).unwrap();
        assert!(out.logits.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn masked_softmax_rows() {
        let mut s = array![[1.0f64, 2.0, 3.0], [0.0, 0.0, 0.0]];
        masked_softmax(&mut s, array![true, true, false].view());
        let e = 1.0f64.exp();
        assert!((s[[0, 0]] - 1.0 / (1.0 + e)).abs() < 1e-12);
        assert_eq!(s[[0, 2]], 0.0);
        let mut s = array![[1.0f64, 2.0]];
        masked_softmax(&mut s, array![false, false].view());
        assert_eq!(s, array![[0.0, 0.0]]);
    }

    #[test]
    fn tie_breaks_toward_non_toxic() {
        assert_eq!(argmax(array![0.3f32, 0.3].view()), 0);
        assert_eq!(argmax(array![-1.0f32, 2.0].view()), 1);
    }

    #[test]
    fn predict_skips_masked_positions() {
        let cfg = tiny();
        let p = init_parameters::<f32>(&cfg, 0);
        let labels = predict_labels(&p, &cfg, &batch()).unwrap();
        assert_eq!(labels[0].len(), 5);
        assert_eq!(labels[1].len(), 2);
    }

    #[test]
    fn zero_classifier_gives_ln2_loss() {
        let cfg = tiny();
        let mut p = init_parameters::<f64>(&cfg, 0);
        p.classifier_w.fill(0.0);
        let b = batch();
        let labels = Array2::from_shape_fn(b.token_ids.dim(), |(i, j)| (i + j) % 2);
        let (loss, _) = backward(&p, &cfg, &b, &labels, &LossConfig { epsilon: 0.0 }, Mode::Eval).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn all_padding_has_zero_loss_and_gradients() {
        let cfg = tiny();
        let p = init_parameters::<f64>(&cfg, 0);
        let mut b = batch();
        b.mask.fill(false);
        let labels = Array2::zeros(b.token_ids.dim());
        let (loss, g) = backward(&p, &cfg, &b, &labels, &LossConfig { epsilon: 0.1 }, Mode::Eval).unwrap();
        assert_eq!(loss, 0.0);
        assert!(g.tensors().iter().all(|t| t.data.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn layer_norm_output_is_standardized() {
        let x = array![[1.0f64, 2.0, 3.0, 4.0]];
        let (y, _) = layer_norm(&x, &Array1::ones(4), &Array1::zeros(4));
        assert!(y.sum().abs() < 1e-12);
        assert!((y.mapv(|v| v * v).sum() / 4.0 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn gelu_derivative_matches_differences() {
        for &x in &[-3.0f64, -0.5, 0.0, 0.7, 2.5] {
            let h = 1e-6;
            let fd = (gelu(x + h) - gelu(x - h)) / (2.0 * h);
            assert!((fd - gelu_grad(x)).abs() < 1e-8);
        }
    }
}
