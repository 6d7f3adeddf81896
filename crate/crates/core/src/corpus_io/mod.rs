//! Readers and writers for every corpus format the toolkit touches.
//!
//! All readers are total over their error channel: malformed input yields a
//! [`FormatError`] carrying the 1-based line number, never a panic. Output
//! order always equals file order.

mod m2;
mod multiged;
mod parallel;
mod predictions;

use std::fmt;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use m2::{m2_to_labels, parse_m2, read_m2, render_m2, write_m2, M2Edit, M2Record};
pub use multiged::{parse_multiged_tsv, read_multiged_tsv, render_multiged_tsv, write_multiged_tsv};
pub use parallel::{
    parse_synthetic_jsonl, read_parallel, read_parallel_tsv, read_synthetic_jsonl,
    render_synthetic_jsonl, write_synthetic_jsonl, SyntheticRecord,
};
pub use predictions::{parse_predictions, read_predictions, PredictedSentence, PredictionFile};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line count mismatch: original has {original} lines, corrupted has {corrupted}")]
    LineCountMismatch { original: usize, corrupted: usize },
    #[error("annotator {requested} not present; available annotators: {available:?}")]
    AnnotatorMissing { requested: u32, available: Vec<u32> },
    #[error("invalid sentence: {0}")]
    Invalid(String),
}

impl FormatError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        FormatError::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        FormatError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub(crate) fn read_to_string(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|e| FormatError::io(path, e))
}

pub(crate) fn write_string(path: &Path, content: &str) -> Result<(), FormatError> {
    std::fs::write(path, content).map_err(|e| FormatError::io(path, e))
}

/// Splits file content into lines, tolerating CRLF endings.
pub(crate) fn lines(content: &str) -> impl Iterator<Item = (usize, &str)> {
    content
        .split('\n')
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
}

/// Binary GED label. `c` marks a correct token, `i` an incorrect one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "c")]
    Correct,
    #[serde(rename = "i")]
    Incorrect,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Correct => "c",
            Label::Incorrect => "i",
        }
    }

    pub fn is_incorrect(self) -> bool {
        self == Label::Incorrect
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "c" => Ok(Label::Correct),
            "i" => Ok(Label::Incorrect),
            other => Err(format!("unknown label {other:?} (expected c or i)")),
        }
    }
}

/// True when `token` can be written to a token-per-line format.
pub fn is_valid_token(token: &str) -> bool {
    !token.is_empty() && !token.contains(['\t', '\n', '\r'])
}

/// An ordered list of tokens with the raw text they came from.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TokenSequence {
    pub tokens: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language: Option<String>,
}

impl TokenSequence {
    pub fn new<S: Into<String>>(tokens: impl IntoIterator<Item = S>) -> Self {
        TokenSequence {
            tokens: tokens.into_iter().map(Into::into).collect(),
            source_text: None,
            language: None,
        }
    }

    /// Splits pre-tokenized text on whitespace and keeps the text as source.
    pub fn from_pretokenized(text: &str) -> Self {
        TokenSequence {
            tokens: text.split_whitespace().map(str::to_owned).collect(),
            source_text: Some(text.to_owned()),
            language: None,
        }
    }

    pub fn with_language(mut self, language: Option<String>) -> Self {
        self.language = language;
        self
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn as_slice(&self) -> &[String] {
        &self.tokens
    }

    /// Space-joined tokens, the pre-tokenized text form.
    pub fn joined(&self) -> String {
        self.tokens.join(" ")
    }

    /// Checks the token and source-text invariants.
    pub fn validate(&self) -> Result<(), FormatError> {
        if let Some(bad) = self.tokens.iter().find(|t| !is_valid_token(t)) {
            return Err(FormatError::Invalid(format!("bad token {bad:?}")));
        }
        if let Some(text) = &self.source_text {
            let from_text = text.chars().filter(|c| !c.is_whitespace());
            let from_tokens = self.tokens.iter().flat_map(|t| t.chars()).filter(|c| !c.is_whitespace());
            if !from_text.eq(from_tokens) {
                return Err(FormatError::Invalid(
                    "tokens do not cover the non-whitespace content of the source text".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Tokens paired with binary GED labels.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LabeledSentence {
    tokens: Vec<String>,
    labels: Vec<Label>,
}

impl LabeledSentence {
    pub fn new(tokens: Vec<String>, labels: Vec<Label>) -> Result<Self, FormatError> {
        if tokens.len() != labels.len() {
            return Err(FormatError::Invalid(format!(
                "{} tokens but {} labels",
                tokens.len(),
                labels.len()
            )));
        }
        if let Some(bad) = tokens.iter().find(|t| !is_valid_token(t)) {
            return Err(FormatError::Invalid(format!("bad token {bad:?}")));
        }
        Ok(LabeledSentence { tokens, labels })
    }

    /// All tokens labeled correct.
    pub fn all_correct(tokens: Vec<String>) -> Self {
        let labels = vec![Label::Correct; tokens.len()];
        LabeledSentence { tokens, labels }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Label)> {
        self.tokens.iter().map(String::as_str).zip(self.labels.iter().copied())
    }

    /// Positions labeled incorrect.
    pub fn incorrect_positions(&self) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, l)| l.is_incorrect())
            .map(|(i, _)| i)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Authentic,
    SyntheticRules,
    SyntheticExternal,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Authentic => "authentic",
            Provenance::SyntheticRules => "synthetic-rules",
            Provenance::SyntheticExternal => "synthetic-external",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Provenance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "authentic" => Ok(Provenance::Authentic),
            "synthetic-rules" => Ok(Provenance::SyntheticRules),
            "synthetic-external" => Ok(Provenance::SyntheticExternal),
            other => Err(format!("unknown provenance {other:?}")),
        }
    }
}

/// A grammatical sentence and its ungrammatical counterpart.
///
/// `degenerate` is set when either side was blank in the source data; such
/// pairs are carried through so they can be counted, but labeling skips them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelPair {
    pub original: TokenSequence,
    pub corrupted: TokenSequence,
    pub provenance: Provenance,
    pub degenerate: bool,
    /// Per-sentence seed for generated pairs.
    pub seed: Option<u64>,
}

impl ParallelPair {
    pub fn new(original: TokenSequence, corrupted: TokenSequence, provenance: Provenance) -> Self {
        ParallelPair {
            original,
            corrupted,
            provenance,
            degenerate: false,
            seed: None,
        }
    }

    /// Like [`ParallelPair::new`], flagging the pair degenerate when either side is empty.
    pub fn flagged(original: TokenSequence, corrupted: TokenSequence, provenance: Provenance) -> Self {
        let degenerate = original.is_empty() || corrupted.is_empty();
        ParallelPair {
            degenerate,
            ..Self::new(original, corrupted, provenance)
        }
    }

    /// Re-tokenizes both sides from their source text with `tokenizer`.
    pub fn retokenize(&mut self, tokenizer: &crate::tokenization::TokenizerScheme) {
        for side in [&mut self.original, &mut self.corrupted] {
            if let Some(text) = side.source_text.take() {
                let language = side.language.take();
                *side = tokenizer.tokenize(&text).with_language(language);
            }
        }
    }
}
