//! Glue between comments and model inputs: tokenization, labelling,
//! windowing into `max_len` chunks and turning predictions back into
//! character offsets.

use ndarray::Array2;
use rayon::prelude::*;

use crate::corpus::{Comment, OffsetSet};
use crate::encoder::{predict_labels, Batch, EncoderConfig, EncoderError, Parameters, Scalar};
use crate::labeling::{labels_to_offsets, offsets_to_labels, Label, LabeledSequence};
use crate::tokenizer::{tokenize, TokenAlignment, Vocab};

/// A tokenized comment with gold labels.
#[derive(Debug, Clone)]
pub struct EncodedComment {
    pub tokens: Vec<TokenAlignment>,
    pub labels: Vec<Label>,
}

impl EncodedComment {
    pub fn new(comment: &Comment, vocab: &Vocab) -> Self {
        let tokens = tokenize(&comment.text, vocab);
        let LabeledSequence { tokens, labels } = offsets_to_labels(&tokens, &comment.toxic_offsets);
        EncodedComment { tokens, labels }
    }

    pub fn piece_ids(&self) -> Vec<u32> {
        self.tokens.iter().map(|t| t.piece_id).collect()
    }
}

/// One model input row: a window of at most `max_len` tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chunk {
    pub ids: Vec<u32>,
    pub labels: Vec<usize>,
}

/// Splits each comment's token stream into consecutive windows of at most
/// `max_len` tokens. Comments without tokens contribute no chunk.
pub fn chunk_comments(encoded: &[EncodedComment], max_len: usize) -> Vec<Chunk> {
    let mut chunks = Vec::new();
    for e in encoded {
        for (ids, labels) in e.tokens.chunks(max_len).zip(e.labels.chunks(max_len)) {
            chunks.push(Chunk {
                ids: ids.iter().map(|t| t.piece_id).collect(),
                labels: labels.iter().map(|l| l.class_index()).collect(),
            });
        }
    }
    chunks
}

/// Right-padded batch plus aligned labels (padding labelled 0).
pub fn collate(chunks: &[&Chunk], pad_id: u32) -> (Batch, Array2<usize>) {
    let ids: Vec<Vec<u32>> = chunks.iter().map(|c| c.ids.clone()).collect();
    let batch = Batch::from_sequences(&ids, pad_id);
    let mut labels = Array2::zeros(batch.token_ids.dim());
    for (row, c) in chunks.iter().enumerate() {
        for (col, &l) in c.labels.iter().enumerate() {
            labels[[row, col]] = l;
        }
    }
    (batch, labels)
}

/// Predicted token labels for every token of `text`.
pub fn predict_token_labels<F: Scalar>(
    params: &Parameters<F>,
    config: &EncoderConfig,
    vocab: &Vocab,
    tokens: &[TokenAlignment],
) -> Result<Vec<Label>, EncoderError> {
    let windows: Vec<Vec<u32>> = tokens
        .chunks(config.max_len)
        .map(|w| w.iter().map(|t| t.piece_id).collect())
        .collect();
    if windows.is_empty() {
        return Ok(Vec::new());
    }
    let batch = Batch::from_sequences(&windows, vocab.pad_id());
    Ok(predict_labels(params, config, &batch)?.into_iter().flatten().collect())
}

/// Tokenize, classify, map toxic tokens back to offsets and fill
/// whitespace between consecutive toxic tokens.
pub fn predict_offsets<F: Scalar>(
    params: &Parameters<F>,
    config: &EncoderConfig,
    vocab: &Vocab,
    text: &str,
) -> Result<OffsetSet, EncoderError> {
    let tokens = tokenize(text, vocab);
    let labels = predict_token_labels(params, config, vocab, &tokens)?;
    Ok(labels_to_offsets(text, &LabeledSequence::new(tokens, labels)))
}

pub fn predict_corpus<F: Scalar>(
    params: &Parameters<F>,
    config: &EncoderConfig,
    vocab: &Vocab,
    comments: &[Comment],
) -> Result<Vec<OffsetSet>, EncoderError> {
    comments.par_iter().map(|c| predict_offsets(params, config, vocab, &c.text)).collect()
}
