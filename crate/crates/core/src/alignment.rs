//! Minimal Levenshtein alignment of token sequences and the token labeling
//! rule derived from it.
//!
//! Costs are unit: match 0, substitute/delete/insert 1. `Delete` removes an
//! original token (the corrupted side lacks it); `Insert` adds a corrupted
//! token. Among minimum-cost scripts the backtrace, walking from the end of
//! both sequences, takes the first applicable of match, substitute, delete,
//! insert. Equivalently, the chosen script is the lexicographically smallest
//! one when read back to front with that op order.

use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus_io::{Label, LabeledSentence, ParallelPair, TokenSequence};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlignmentError {
    #[error("edit script does not cover {side} side of length {expected}")]
    Mismatch { side: &'static str, expected: usize },
}

/// Ordered so that `Match < Substitute < Delete < Insert` is the tie-break preference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EditKind {
    Match,
    Substitute,
    Delete,
    Insert,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EditOp {
    pub kind: EditKind,
    pub original_index: Option<usize>,
    pub corrupted_index: Option<usize>,
}

impl EditOp {
    pub fn matched(i: usize, j: usize) -> Self {
        EditOp { kind: EditKind::Match, original_index: Some(i), corrupted_index: Some(j) }
    }

    pub fn substitute(i: usize, j: usize) -> Self {
        EditOp { kind: EditKind::Substitute, original_index: Some(i), corrupted_index: Some(j) }
    }

    pub fn delete(i: usize) -> Self {
        EditOp { kind: EditKind::Delete, original_index: Some(i), corrupted_index: None }
    }

    pub fn insert(j: usize) -> Self {
        EditOp { kind: EditKind::Insert, original_index: None, corrupted_index: Some(j) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EditScript {
    pub ops: Vec<EditOp>,
    pub cost: usize,
}

impl EditScript {
    pub fn from_ops(ops: Vec<EditOp>) -> Self {
        let cost = ops.iter().filter(|op| op.kind != EditKind::Match).count();
        EditScript { ops, cost }
    }

    pub fn kinds(&self) -> Vec<EditKind> {
        self.ops.iter().map(|op| op.kind).collect()
    }

    /// Checks that each side's indices are exactly `0..len` in order.
    pub fn check_coverage(&self, original_len: usize, corrupted_len: usize) -> Result<(), AlignmentError> {
        let orig = self.ops.iter().filter_map(|op| op.original_index);
        if !orig.eq(0..original_len) {
            return Err(AlignmentError::Mismatch { side: "original", expected: original_len });
        }
        let corr = self.ops.iter().filter_map(|op| op.corrupted_index);
        if !corr.eq(0..corrupted_len) {
            return Err(AlignmentError::Mismatch { side: "corrupted", expected: corrupted_len });
        }
        Ok(())
    }
}

/// Aligns two token sequences. See the module docs for the tie-break.
pub fn align(original: &TokenSequence, corrupted: &TokenSequence) -> EditScript {
    align_slices(&original.tokens, &corrupted.tokens)
}

pub fn align_slices<T: PartialEq>(original: &[T], corrupted: &[T]) -> EditScript {
    let (m, n) = (original.len(), corrupted.len());
    let width = n + 1;
    let mut dist = vec![0u32; (m + 1) * width];
    for j in 0..=n {
        dist[j] = j as u32;
    }
    for i in 1..=m {
        dist[i * width] = i as u32;
        for j in 1..=n {
            let diag = dist[(i - 1) * width + j - 1] + u32::from(original[i - 1] != corrupted[j - 1]);
            let up = dist[(i - 1) * width + j] + 1;
            let left = dist[i * width + j - 1] + 1;
            dist[i * width + j] = diag.min(up).min(left);
        }
    }

    let mut ops = Vec::with_capacity(m.max(n));
    let (mut i, mut j) = (m, n);
    while i > 0 || j > 0 {
        let here = dist[i * width + j];
        if i > 0 && j > 0 {
            let diag = dist[(i - 1) * width + j - 1];
            let same = original[i - 1] == corrupted[j - 1];
            if same && here == diag {
                ops.push(EditOp::matched(i - 1, j - 1));
                i -= 1;
                j -= 1;
                continue;
            }
            if !same && here == diag + 1 {
                ops.push(EditOp::substitute(i - 1, j - 1));
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && here == dist[(i - 1) * width + j] + 1 {
            ops.push(EditOp::delete(i - 1));
            i -= 1;
        } else {
            ops.push(EditOp::insert(j - 1));
            j -= 1;
        }
    }
    ops.reverse();
    EditScript { ops, cost: dist[m * width + n] as usize }
}

/// Labels the corrupted side of an alignment.
///
/// A corrupted token is incorrect when it is substituted or inserted, or
/// when the op right before its match is a delete (it follows a gap). Only
/// that single following token is marked. A trailing delete with no
/// following corrupted token marks the last corrupted token instead.
pub fn label_from_alignment(script: &EditScript, corrupted: &TokenSequence) -> Result<LabeledSentence, AlignmentError> {
    let labels = labels_for(script, corrupted.len())?;
    Ok(LabeledSentence::new(corrupted.tokens.clone(), labels)
        .expect("label count equals token count"))
}

/// The label vector alone, for callers that hold tokens elsewhere.
pub fn labels_for(script: &EditScript, corrupted_len: usize) -> Result<Vec<Label>, AlignmentError> {
    let corr = script.ops.iter().filter_map(|op| op.corrupted_index);
    if !corr.eq(0..corrupted_len) {
        return Err(AlignmentError::Mismatch { side: "corrupted", expected: corrupted_len });
    }
    let mut labels = vec![Label::Correct; corrupted_len];
    let mut after_gap = false;
    for op in &script.ops {
        match (op.kind, op.corrupted_index) {
            (EditKind::Delete, _) => {
                after_gap = true;
                continue;
            }
            (EditKind::Match, Some(j)) if after_gap => labels[j] = Label::Incorrect,
            (EditKind::Substitute | EditKind::Insert, Some(j)) => labels[j] = Label::Incorrect,
            _ => {}
        }
        after_gap = false;
    }
    if after_gap && corrupted_len > 0 {
        labels[corrupted_len - 1] = Label::Incorrect;
    }
    Ok(labels)
}

/// Aligns and labels one pair. Degenerate pairs yield an empty sentence.
pub fn label_pair(pair: &ParallelPair) -> LabeledSentence {
    if pair.degenerate {
        return LabeledSentence::empty();
    }
    let script = align(&pair.original, &pair.corrupted);
    label_from_alignment(&script, &pair.corrupted).expect("script produced for this sentence")
}

/// A merged run of adjacent non-match ops.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanEdit {
    /// `Delete` or `Insert` for pure runs, `Substitute` otherwise.
    pub kind: EditKind,
    pub original: Range<usize>,
    pub corrupted: Range<usize>,
}

pub fn extract_edits(script: &EditScript, original: &TokenSequence, corrupted: &TokenSequence) -> Vec<SpanEdit> {
    debug_assert!(script.check_coverage(original.len(), corrupted.len()).is_ok());
    let mut edits = Vec::new();
    let (mut oi, mut ci) = (0usize, 0usize);
    let mut open: Option<SpanEdit> = None;
    for op in &script.ops {
        if op.kind == EditKind::Match {
            edits.extend(open.take());
        } else {
            let run = open.get_or_insert(SpanEdit { kind: op.kind, original: oi..oi, corrupted: ci..ci });
            if run.kind != op.kind {
                run.kind = EditKind::Substitute;
            }
        }
        if op.original_index.is_some() {
            oi += 1;
        }
        if op.corrupted_index.is_some() {
            ci += 1;
        }
        if let Some(run) = open.as_mut() {
            run.original.end = oi;
            run.corrupted.end = ci;
        }
    }
    edits.extend(open);
    edits
}

/// Why a pair produced no labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkipReason {
    Degenerate,
    LengthRatio,
}

/// Pairs whose longer side exceeds this multiple of the shorter are skipped.
pub const MAX_LENGTH_RATIO: usize = 4;

pub fn skip_reason(pair: &ParallelPair) -> Option<SkipReason> {
    if pair.degenerate {
        return Some(SkipReason::Degenerate);
    }
    let (a, b) = (pair.original.len(), pair.corrupted.len());
    let (short, long) = (a.min(b), a.max(b));
    (short > 0 && long > MAX_LENGTH_RATIO * short).then_some(SkipReason::LengthRatio)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct LabelingStats {
    pub pairs_labeled: usize,
    pub pairs_skipped_degenerate: usize,
    pub pairs_skipped_length_ratio: usize,
    pub tokens_labeled: usize,
    pub tokens_incorrect: usize,
}

#[derive(Debug, Clone, Default)]
pub struct LabeledCorpus {
    /// One entry per labeled pair, in input order.
    pub sentences: Vec<LabeledSentence>,
    /// Input index of each labeled pair with its merged edits (filled when requested).
    pub edits: Vec<(usize, Vec<SpanEdit>)>,
    pub stats: LabelingStats,
}

/// Labels a corpus sentence-parallel on the current rayon pool; output order
/// follows input order.
pub fn label_corpus(pairs: &[ParallelPair], with_edits: bool) -> LabeledCorpus {
    let results: Vec<Result<(LabeledSentence, Option<Vec<SpanEdit>>), SkipReason>> = pairs
        .par_iter()
        .map(|pair| {
            if let Some(reason) = skip_reason(pair) {
                return Err(reason);
            }
            let script = align(&pair.original, &pair.corrupted);
            let labeled = label_from_alignment(&script, &pair.corrupted).expect("script produced for this sentence");
            let edits = with_edits.then(|| extract_edits(&script, &pair.original, &pair.corrupted));
            Ok((labeled, edits))
        })
        .collect();

    let mut out = LabeledCorpus::default();
    for (index, result) in results.into_iter().enumerate() {
        match result {
            Ok((labeled, edits)) => {
                out.stats.pairs_labeled += 1;
                out.stats.tokens_labeled += labeled.len();
                out.stats.tokens_incorrect += labeled.labels().iter().filter(|l| l.is_incorrect()).count();
                if let Some(edits) = edits {
                    out.edits.push((index, edits));
                }
                out.sentences.push(labeled);
            }
            Err(SkipReason::Degenerate) => out.stats.pairs_skipped_degenerate += 1,
            Err(SkipReason::LengthRatio) => out.stats.pairs_skipped_length_ratio += 1,
        }
    }
    out
}
