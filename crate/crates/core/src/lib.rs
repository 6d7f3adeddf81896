//! Data, labeling and metric layer for grammatical error detection (GED).
//!
//! The crate turns parallel correction data into token-level `c`/`i` labels,
//! synthesizes rule-based errors into clean text, and scores and analyzes
//! GED corpora and system predictions.

pub mod alignment;
pub mod analysis;
pub mod corpus_io;
pub mod corruption;
pub mod evaluation;
pub mod pipeline;
pub mod tokenization;

pub use alignment::{align, extract_edits, label_from_alignment, label_pair, EditKind, EditOp, EditScript, SpanEdit};
pub use corpus_io::{Label, LabeledSentence, M2Record, ParallelPair, PredictionFile, Provenance, TokenSequence};
pub use corruption::{ConfusionIndex, CorruptionConfig, Dictionary};
pub use evaluation::{EvalReport, PrCurve};
pub use tokenization::{TokenizerKind, TokenizerScheme};

/// Version of the on-disk formats written by this crate.
pub const FORMAT_VERSION: &str = "1";
