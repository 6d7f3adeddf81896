//! Token-level GED scoring: micro-averaged precision, recall and F0.5 with
//! `i` as the positive class, and the full precision-recall sweep.
//!
//! Zero-denominator conventions: with no predicted positives precision is 1
//! if there are also no gold positives, else 0; with no gold positives
//! recall is 1; F0.5 is 0 when `0.25·P + R` is 0.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::corpus_io::{LabeledSentence, PredictionFile};

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("gold has {gold} sentences, predictions have {pred}")]
    SentenceCount { gold: usize, pred: usize },
    #[error("sentence {sentence}: gold has {gold} tokens, predictions have {pred}")]
    TokenCount { sentence: usize, gold: usize, pred: usize },
    #[error("sentence {sentence}, token {position}: gold {gold:?} vs predicted {pred:?}")]
    TokenMismatch { sentence: usize, position: usize, gold: String, pred: String },
    #[error("threshold {0} outside [0, 1]")]
    Threshold(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Counts {
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub true_negatives: u64,
}

impl Counts {
    pub fn merge(self, o: Counts) -> Counts {
        Counts {
            true_positives: self.true_positives + o.true_positives,
            false_positives: self.false_positives + o.false_positives,
            false_negatives: self.false_negatives + o.false_negatives,
            true_negatives: self.true_negatives + o.true_negatives,
        }
    }

    pub fn precision(&self) -> f64 {
        let predicted = self.true_positives + self.false_positives;
        if predicted == 0 {
            if self.true_positives + self.false_negatives == 0 { 1.0 } else { 0.0 }
        } else {
            self.true_positives as f64 / predicted as f64
        }
    }

    pub fn recall(&self) -> f64 {
        let actual = self.true_positives + self.false_negatives;
        if actual == 0 {
            1.0
        } else {
            self.true_positives as f64 / actual as f64
        }
    }
}

/// F-beta from precision and recall; 0 when the denominator vanishes.
pub fn f_beta(precision: f64, recall: f64, beta: f64) -> f64 {
    let b2 = beta * beta;
    let denom = b2 * precision + recall;
    if denom == 0.0 {
        0.0
    } else {
        (1.0 + b2) * precision * recall / denom
    }
}

pub fn f_half(precision: f64, recall: f64) -> f64 {
    f_beta(precision, recall, 0.5)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalReport {
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub true_negatives: u64,
    pub precision: f64,
    pub recall: f64,
    pub f_half: f64,
    pub threshold: f64,
}

impl EvalReport {
    pub fn from_counts(counts: Counts, threshold: f64) -> Self {
        let (precision, recall) = (counts.precision(), counts.recall());
        EvalReport {
            true_positives: counts.true_positives,
            false_positives: counts.false_positives,
            false_negatives: counts.false_negatives,
            true_negatives: counts.true_negatives,
            precision,
            recall,
            f_half: f_half(precision, recall),
            threshold,
        }
    }
}

/// Verifies that gold and predictions describe the same tokens.
pub fn check_shape(gold: &[LabeledSentence], pred: &PredictionFile) -> Result<(), EvalError> {
    if gold.len() != pred.sentences.len() {
        return Err(EvalError::SentenceCount { gold: gold.len(), pred: pred.sentences.len() });
    }
    for (s, (g, p)) in gold.iter().zip(&pred.sentences).enumerate() {
        if g.len() != p.tokens.len() || p.tokens.len() != p.probabilities.len() {
            return Err(EvalError::TokenCount { sentence: s, gold: g.len(), pred: p.tokens.len() });
        }
        if let Some((position, (gt, pt))) = g.tokens().iter().zip(&p.tokens).enumerate().find(|(_, (a, b))| a != b) {
            return Err(EvalError::TokenMismatch {
                sentence: s,
                position,
                gold: gt.clone(),
                pred: pt.clone(),
            });
        }
    }
    Ok(())
}

fn count_at(gold: &[LabeledSentence], pred: &PredictionFile, threshold: f64) -> Counts {
    gold.par_iter()
        .zip(pred.sentences.par_iter())
        .map(|(g, p)| {
            let mut c = Counts::default();
            for (label, &prob) in g.labels().iter().zip(&p.probabilities) {
                match (label.is_incorrect(), prob >= threshold) {
                    (true, true) => c.true_positives += 1,
                    (false, true) => c.false_positives += 1,
                    (true, false) => c.false_negatives += 1,
                    (false, false) => c.true_negatives += 1,
                }
            }
            c
        })
        .reduce(Counts::default, Counts::merge)
}

/// Scores predictions at `threshold`; a token is predicted `i` iff its probability is ≥ threshold.
pub fn score(gold: &[LabeledSentence], pred: &PredictionFile, threshold: f64) -> Result<EvalReport, EvalError> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(EvalError::Threshold(threshold));
    }
    check_shape(gold, pred)?;
    Ok(EvalReport::from_counts(count_at(gold, pred, threshold), threshold))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrPoint {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
}

impl PrPoint {
    pub fn f_half(&self) -> f64 {
        f_half(self.precision, self.recall)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct PrCurve {
    /// Strictly increasing thresholds.
    pub points: Vec<PrPoint>,
}

impl PrCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("threshold,precision,recall\n");
        for p in &self.points {
            let _ = writeln!(out, "{},{},{}", p.threshold, p.precision, p.recall);
        }
        out
    }

    /// A minimal standalone SVG plot, recall on x and precision on y.
    pub fn to_svg(&self) -> String {
        const SIZE: f64 = 400.0;
        const PAD: f64 = 40.0;
        let x = |r: f64| PAD + r * SIZE;
        let y = |p: f64| PAD + (1.0 - p) * SIZE;
        let mut pts: Vec<&PrPoint> = self.points.iter().collect();
        pts.sort_by(|a, b| a.recall.total_cmp(&b.recall).then(b.precision.total_cmp(&a.precision)));
        let path: Vec<String> = pts.iter().map(|p| format!("{:.2},{:.2}", x(p.recall), y(p.precision))).collect();
        let total = SIZE + 2.0 * PAD;
        let mut svg = String::new();
        let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total}" height="{total}" viewBox="0 0 {total} {total}">"#);
        let _ = writeln!(svg, r#"<rect x="{PAD}" y="{PAD}" width="{SIZE}" height="{SIZE}" fill="none" stroke="black"/>"#);
        let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">recall</text>"#, PAD + SIZE / 2.0, total - 10.0);
        let _ = writeln!(svg, r#"<text x="12" y="{}" text-anchor="middle" font-size="14" transform="rotate(-90 12 {})">precision</text>"#, PAD + SIZE / 2.0, PAD + SIZE / 2.0);
        let _ = writeln!(svg, r#"<polyline fill="none" stroke="steelblue" stroke-width="2" points="{}"/>"#, path.join(" "));
        svg.push_str("</svg>\n");
        svg
    }
}

/// Precision and recall at every distinct predicted probability plus the
/// sentinels 0 and 1, sorted by threshold.
pub fn pr_curve(gold: &[LabeledSentence], pred: &PredictionFile) -> Result<PrCurve, EvalError> {
    check_shape(gold, pred)?;
    let mut scored: Vec<(f64, bool)> = gold
        .iter()
        .zip(&pred.sentences)
        .flat_map(|(g, p)| p.probabilities.iter().copied().zip(g.labels().iter().map(|l| l.is_incorrect())))
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let gold_positive = scored.iter().filter(|(_, g)| *g).count() as u64;
    let total = scored.len() as u64;

    let mut thresholds: Vec<f64> = scored.iter().map(|(p, _)| *p).chain([0.0, 1.0]).collect();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();

    let mut points = Vec::with_capacity(thresholds.len());
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut next = 0;
    for t in thresholds {
        while next < scored.len() && scored[next].0 >= t {
            if scored[next].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            next += 1;
        }
        let counts = Counts {
            true_positives: tp,
            false_positives: fp,
            false_negatives: gold_positive - tp,
            true_negatives: total - gold_positive - fp,
        };
        points.push(PrPoint { threshold: t, precision: counts.precision(), recall: counts.recall() });
    }
    points.reverse();
    Ok(PrCurve { points })
}

/// The point with the highest F0.5; ties go to the lower threshold.
pub fn best_f_half(curve: &PrCurve) -> Option<(f64, f64)> {
    curve.points.iter().fold(None, |best: Option<(f64, f64)>, p| {
        let f = p.f_half();
        match best {
            Some((_, bf)) if bf >= f => best,
            _ => Some((p.threshold, f)),
        }
    })
}
