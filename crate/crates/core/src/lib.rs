//! Toxic span detection.
//!
//! The pipeline runs: parse a span-annotated corpus ([`corpus`]), clean the
//! annotations so they follow word boundaries ([`spanclean`]), tokenize with
//! an offset-tracking WordPiece ([`tokenizer`]), derive per-token labels
//! ([`labeling`]), train a multi-depth transformer token classifier
//! ([`encoder`], [`training`]), map predictions back to character offsets
//! with whitespace filling, optionally combine several models by majority
//! vote ([`ensemble`]) and score with per-comment character F1
//! ([`metrics`]).

pub mod chars;
pub mod corpus;
pub mod encoder;
pub mod ensemble;
pub mod labeling;
pub mod metrics;
pub mod pipeline;
pub mod predictions;
pub mod spanclean;
pub mod synthetic;
pub mod tokenizer;
pub mod training;

pub use corpus::{Comment, OffsetSet, Span};
pub use labeling::Label;
pub use tokenizer::{TokenAlignment, Vocab};
