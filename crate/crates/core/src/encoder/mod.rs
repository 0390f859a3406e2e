//! A small post-layer-norm transformer encoder with a multi-depth token
//! classification head.
//!
//! The head concatenates, per token, the hidden outputs of a chosen set of
//! blocks (the *depth set*), applies dropout and a linear layer. Block 0 is
//! the embedding output; blocks `1..=num_blocks` are transformer blocks.

mod checkpoint;
mod model;
mod params;

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use ndarray::{LinalgScalar, ScalarOperand};
use num_traits::Float;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use checkpoint::{read_checkpoint, write_checkpoint, CheckpointError, CheckpointMeta, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use model::{backward, forward, predict_labels, Batch, ForwardOutput, HiddenStack, Mode};
pub(crate) use model::log_softmax as log_softmax_row;
pub use params::{init_parameters, BlockParams, Parameters, TensorMut, TensorRef};

/// Floating point types the encoder runs in.
pub trait Scalar:
    Float
    + LinalgScalar
    + ScalarOperand
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + 'static
{
    /// Tag written into checkpoints.
    const DTYPE: u8;

    fn from_f64(v: f64) -> Self;

    fn as_f64(self) -> f64;
}

impl Scalar for f32 {
    const DTYPE: u8 = 0;

    fn from_f64(v: f64) -> Self {
        v as f32
    }

    fn as_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    const DTYPE: u8 = 1;

    fn from_f64(v: f64) -> Self {
        v
    }

    fn as_f64(self) -> f64 {
        self
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EncoderError {
    #[error("invalid encoder config: {0}")]
    InvalidConfig(String),
    #[error("token id {id} out of range for vocabulary of size {vocab_size}")]
    TokenOutOfRange { id: u32, vocab_size: usize },
    #[error("sequence length {len} exceeds max_len {max_len}")]
    SequenceTooLong { len: usize, max_len: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// Which blocks feed the classifier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DepthSpec {
    /// The top `last` transformer blocks.
    Last { last: usize },
    /// Explicit block indices; order and duplicates do not matter.
    Blocks(Vec<usize>),
}

impl DepthSpec {
    pub fn last(n: usize) -> Self {
        DepthSpec::Last { last: n }
    }

    /// Resolves to sorted, deduplicated block indices.
    pub fn resolve(&self, num_blocks: usize) -> Vec<usize> {
        let mut blocks: Vec<usize> = match self {
            DepthSpec::Last { last } => (num_blocks.saturating_sub(*last) + 1..=num_blocks).collect(),
            DepthSpec::Blocks(b) => b.clone(),
        };
        blocks.sort_unstable();
        blocks.dedup();
        blocks
    }
}

fn default_classes() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EncoderConfig {
    pub vocab_size: usize,
    pub hidden_dim: usize,
    pub num_blocks: usize,
    pub num_heads: usize,
    /// Defaults to `4 * hidden_dim` when absent.
    #[serde(default)]
    pub ff_dim: Option<usize>,
    pub max_len: usize,
    pub depth_set: DepthSpec,
    pub dropout: f64,
    #[serde(default = "default_classes")]
    pub num_classes: usize,
    /// Lets the depth set include block 0, the embedding output.
    #[serde(default)]
    pub allow_embedding_output: bool,
}

impl EncoderConfig {
    pub fn new(vocab_size: usize, hidden_dim: usize, num_blocks: usize, num_heads: usize, max_len: usize) -> Self {
        EncoderConfig {
            vocab_size,
            hidden_dim,
            num_blocks,
            num_heads,
            ff_dim: None,
            max_len,
            depth_set: DepthSpec::last(1),
            dropout: 0.0,
            num_classes: 2,
            allow_embedding_output: false,
        }
    }

    pub fn with_depth(mut self, depth: DepthSpec) -> Self {
        self.depth_set = depth;
        self
    }

    pub fn with_dropout(mut self, p: f64) -> Self {
        self.dropout = p;
        self
    }

    pub fn ff_dim(&self) -> usize {
        self.ff_dim.unwrap_or(4 * self.hidden_dim)
    }

    pub fn head_dim(&self) -> usize {
        self.hidden_dim / self.num_heads
    }

    pub fn depth_blocks(&self) -> Vec<usize> {
        self.depth_set.resolve(self.num_blocks)
    }

    /// `|K| * hidden_dim`.
    pub fn classifier_input_dim(&self) -> usize {
        self.depth_blocks().len() * self.hidden_dim
    }

    pub fn validate(&self) -> Result<(), EncoderError> {
        let bad = |msg: String| Err(EncoderError::InvalidConfig(msg));
        if self.vocab_size == 0 || self.hidden_dim == 0 || self.max_len == 0 || self.ff_dim() == 0 {
            return bad("vocab_size, hidden_dim, ff_dim and max_len must be positive".into());
        }
        if self.num_blocks == 0 {
            return bad("num_blocks must be at least 1".into());
        }
        if self.num_heads == 0 || !self.hidden_dim.is_multiple_of(self.num_heads) {
            return bad(format!("num_heads {} must divide hidden_dim {}", self.num_heads, self.hidden_dim));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return bad(format!("dropout {} outside [0, 1)", self.dropout));
        }
        if self.num_classes < 2 {
            return bad("num_classes must be at least 2".into());
        }
        if let DepthSpec::Last { last } = self.depth_set {
            if last == 0 || last > self.num_blocks {
                return bad(format!("last {last} must be in 1..={}", self.num_blocks));
            }
        }
        let blocks = self.depth_blocks();
        if blocks.is_empty() {
            return bad("depth set is empty".into());
        }
        let lowest = if self.allow_embedding_output { 0 } else { 1 };
        if let Some(k) = blocks.iter().find(|&&k| k < lowest || k > self.num_blocks) {
            return bad(format!("depth set entry {k} outside {lowest}..={}", self.num_blocks));
        }
        Ok(())
    }
}
