//! Parallel corpora: two aligned line files, a two-column TSV, or the
//! JSON-lines format written by the corruption stage.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{read_to_string, write_string, FormatError, ParallelPair, Provenance, TokenSequence};

/// Lines of a one-sentence-per-line file; a final newline does not open an extra line.
fn text_lines(content: &str) -> Vec<&str> {
    if content.is_empty() {
        return Vec::new();
    }
    let body = content.strip_suffix('\n').unwrap_or(content);
    body.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l)).collect()
}

fn side(text: &str) -> TokenSequence {
    TokenSequence::from_pretokenized(text)
}

/// Reads two aligned files. Sides are split on whitespace; callers that need
/// a different tokenizer call [`ParallelPair::retokenize`].
pub fn read_parallel(
    path_original: impl AsRef<Path>,
    path_corrupted: impl AsRef<Path>,
) -> Result<Vec<ParallelPair>, FormatError> {
    let original = read_to_string(path_original.as_ref())?;
    let corrupted = read_to_string(path_corrupted.as_ref())?;
    pair_lines(&original, &corrupted, Provenance::Authentic)
}

pub(crate) fn pair_lines(
    original: &str,
    corrupted: &str,
    provenance: Provenance,
) -> Result<Vec<ParallelPair>, FormatError> {
    let (o, c) = (text_lines(original), text_lines(corrupted));
    if o.len() != c.len() {
        return Err(FormatError::LineCountMismatch {
            original: o.len(),
            corrupted: c.len(),
        });
    }
    Ok(o
        .into_iter()
        .zip(c)
        .map(|(a, b)| ParallelPair::flagged(side(a), side(b), provenance))
        .collect())
}

/// Reads a single `original<TAB>corrupted` file.
pub fn read_parallel_tsv(path: impl AsRef<Path>) -> Result<Vec<ParallelPair>, FormatError> {
    let content = read_to_string(path.as_ref())?;
    text_lines(&content)
        .into_iter()
        .enumerate()
        .map(|(i, line)| {
            let mut fields = line.split('\t');
            match (fields.next(), fields.next(), fields.next()) {
                (Some(a), Some(b), None) => Ok(ParallelPair::flagged(side(a), side(b), Provenance::Authentic)),
                _ => Err(FormatError::parse(i + 1, "expected `original<TAB>corrupted`")),
            }
        })
        .collect()
}

/// One line of the synthetic-pair JSON-lines format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntheticRecord {
    pub original: String,
    pub corrupted: String,
    pub language: Option<String>,
    pub provenance: Provenance,
    pub seed: Option<u64>,
}

impl SyntheticRecord {
    /// Sides are written as space-joined tokens so that reading them back
    /// with the pre-tokenized scheme recovers the exact token sequences.
    pub fn from_pair(pair: &ParallelPair) -> Self {
        SyntheticRecord {
            original: pair.original.joined(),
            corrupted: pair.corrupted.joined(),
            language: pair.original.language.clone(),
            provenance: pair.provenance,
            seed: pair.seed,
        }
    }

    pub fn into_pair(self) -> ParallelPair {
        let language = self.language;
        let mut pair = ParallelPair::flagged(
            side(&self.original).with_language(language.clone()),
            side(&self.corrupted).with_language(language),
            self.provenance,
        );
        pair.seed = self.seed;
        pair
    }
}

pub fn render_synthetic_jsonl(pairs: &[ParallelPair]) -> String {
    let mut out = String::new();
    for pair in pairs {
        let line = serde_json::to_string(&SyntheticRecord::from_pair(pair)).expect("record serializes");
        out.push_str(&line);
        out.push('\n');
    }
    out
}

pub fn write_synthetic_jsonl(pairs: &[ParallelPair], path: impl AsRef<Path>) -> Result<(), FormatError> {
    write_string(path.as_ref(), &render_synthetic_jsonl(pairs))
}

pub fn parse_synthetic_jsonl(content: &str) -> Result<Vec<ParallelPair>, FormatError> {
    let mut pairs = Vec::new();
    for (i, line) in text_lines(content).into_iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: SyntheticRecord =
            serde_json::from_str(line).map_err(|e| FormatError::parse(i + 1, e.to_string()))?;
        pairs.push(record.into_pair());
    }
    Ok(pairs)
}

pub fn read_synthetic_jsonl(path: impl AsRef<Path>) -> Result<Vec<ParallelPair>, FormatError> {
    parse_synthetic_jsonl(&read_to_string(path.as_ref())?)
}
