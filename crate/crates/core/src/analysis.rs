//! Error-type distributions, their normalized entropy, and the balanced
//! authentic-vs-synthetic pair set used to train a discriminator.
//!
//! The built-in taxonomy is a coarse, language-agnostic approximation with
//! eight classes. Users with their own classifier or clustering can feed
//! `edit<TAB>cluster_id` files into the same entropy machinery.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::alignment::{EditKind, SpanEdit};
use crate::corpus_io::{ParallelPair, TokenSequence};
use crate::corruption::damerau_levenshtein;
use crate::tokenization::is_punctuation_token;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("distribution is empty (total 0)")]
    EmptyDistribution,
    #[error("category count k must be at least 2, got {0}")]
    TooFewCategories(usize),
    #[error("distribution has {nonzero} non-empty categories but k = {k}")]
    CategoryOverflow { nonzero: usize, k: usize },
    #[error("no distributions to average")]
    NothingToAverage,
    #[error("{0} side of the discriminator set is empty")]
    EmptySide(&'static str),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub const TAXONOMY: &str = "coarse-8 (language-agnostic approximation of ERRANT-style types)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ErrorType {
    Missing,
    Extra,
    Order,
    Case,
    Diacr,
    Punct,
    Spell,
    Other,
}

impl ErrorType {
    pub const ALL: [ErrorType; 8] = [
        ErrorType::Missing,
        ErrorType::Extra,
        ErrorType::Order,
        ErrorType::Case,
        ErrorType::Diacr,
        ErrorType::Punct,
        ErrorType::Spell,
        ErrorType::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorType::Missing => "MISSING",
            ErrorType::Extra => "EXTRA",
            ErrorType::Order => "ORDER",
            ErrorType::Case => "CASE",
            ErrorType::Diacr => "DIACR",
            ErrorType::Punct => "PUNCT",
            ErrorType::Spell => "SPELL",
            ErrorType::Other => "OTHER",
        }
    }
}

impl fmt::Display for ErrorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn strip_diacritics(s: &str) -> String {
    s.nfd().filter(|c| !is_combining_mark(*c)).collect()
}

/// Assigns one error type to an edit, from the grammatical tokens to the
/// ungrammatical ones. The first matching rule wins:
/// deletion, insertion, adjacent transposition, case change, diacritic
/// change, punctuation, small single-token spelling change, other.
pub fn classify_edit<S: AsRef<str>>(original: &[S], corrupted: &[S]) -> ErrorType {
    let o: Vec<&str> = original.iter().map(AsRef::as_ref).collect();
    let c: Vec<&str> = corrupted.iter().map(AsRef::as_ref).collect();
    if c.is_empty() {
        return ErrorType::Missing;
    }
    if o.is_empty() {
        return ErrorType::Extra;
    }
    if o.len() == 2 && c.len() == 2 && o[0] != o[1] && o[0] == c[1] && o[1] == c[0] {
        return ErrorType::Order;
    }
    let pairwise = |f: &dyn Fn(&str) -> String| o.len() == c.len() && o.iter().zip(&c).all(|(a, b)| f(a) == f(b));
    if pairwise(&|s| s.to_lowercase()) {
        return ErrorType::Case;
    }
    if pairwise(&strip_diacritics) {
        return ErrorType::Diacr;
    }
    let all_punct = |side: &[&str]| side.iter().all(|t| is_punctuation_token(t));
    if all_punct(&o) || all_punct(&c) {
        return ErrorType::Punct;
    }
    if o.len() == 1 && c.len() == 1 && damerau_levenshtein(o[0], c[0]) <= 2 {
        return ErrorType::Spell;
    }
    ErrorType::Other
}

/// One line of the JSON-lines edit log written by `label --emit-edits`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditRecord {
    pub sentence: usize,
    pub kind: EditKind,
    pub original_span: [usize; 2],
    pub corrupted_span: [usize; 2],
    pub original: Vec<String>,
    pub corrupted: Vec<String>,
}

impl EditRecord {
    pub fn new(sentence: usize, edit: &SpanEdit, original: &TokenSequence, corrupted: &TokenSequence) -> Self {
        EditRecord {
            sentence,
            kind: edit.kind,
            original_span: [edit.original.start, edit.original.end],
            corrupted_span: [edit.corrupted.start, edit.corrupted.end],
            original: original.tokens[edit.original.clone()].to_vec(),
            corrupted: corrupted.tokens[edit.corrupted.clone()].to_vec(),
        }
    }

    pub fn error_type(&self) -> ErrorType {
        classify_edit(&self.original, &self.corrupted)
    }
}

pub fn parse_edit_log(content: &str) -> Result<Vec<EditRecord>, AnalysisError> {
    content
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| AnalysisError::Parse { line: i + 1, message: e.to_string() })
        })
        .collect()
}

pub fn render_edit_log(edits: &[EditRecord]) -> String {
    edits
        .iter()
        .map(|e| serde_json::to_string(e).expect("record serializes") + "\n")
        .collect()
}

/// Counts per category. Keys are error-type names or external cluster ids.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TypeDistribution {
    #[serde(default)]
    pub taxonomy: String,
    pub counts: BTreeMap<String, u64>,
    pub total: u64,
}

impl TypeDistribution {
    /// All eight built-in types present with zero counts.
    pub fn empty_builtin() -> Self {
        TypeDistribution {
            taxonomy: TAXONOMY.to_owned(),
            counts: ErrorType::ALL.iter().map(|t| (t.as_str().to_owned(), 0)).collect(),
            total: 0,
        }
    }

    pub fn add(&mut self, category: &str, n: u64) {
        *self.counts.entry(category.to_owned()).or_default() += n;
        self.total += n;
    }

    pub fn count(&self, category: &str) -> u64 {
        self.counts.get(category).copied().unwrap_or(0)
    }

    /// Component-wise sum.
    pub fn merge(&self, other: &TypeDistribution) -> TypeDistribution {
        let mut out = self.clone();
        for (k, v) in &other.counts {
            out.add(k, *v);
        }
        out
    }

    pub fn nonzero(&self) -> usize {
        self.counts.values().filter(|&&v| v > 0).count()
    }

    /// Counts of the `n` most frequent categories, ties by name.
    pub fn top(&self, n: usize) -> Vec<(&str, u64)> {
        let mut v: Vec<(&str, u64)> = self.counts.iter().map(|(k, c)| (k.as_str(), *c)).collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        v.truncate(n);
        v
    }
}

pub fn type_distribution(edits: &[EditRecord]) -> TypeDistribution {
    let mut dist = TypeDistribution::empty_builtin();
    for e in edits {
        dist.add(e.error_type().as_str(), 1);
    }
    dist
}

/// Builds a distribution from `edit<TAB>cluster_id` lines.
pub fn parse_cluster_assignments(content: &str) -> Result<TypeDistribution, AnalysisError> {
    let mut dist = TypeDistribution { taxonomy: "external clusters".to_owned(), ..Default::default() };
    for (i, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cluster = line
            .rsplit_once('\t')
            .map(|(_, c)| c.trim())
            .filter(|c| !c.is_empty())
            .ok_or_else(|| AnalysisError::Parse { line: i + 1, message: "expected `edit<TAB>cluster_id`".into() })?;
        dist.add(cluster, 1);
    }
    Ok(dist)
}

pub fn read_cluster_assignments(path: impl AsRef<Path>) -> Result<TypeDistribution, AnalysisError> {
    let path = path.as_ref();
    let content = std::fs::read_to_string(path).map_err(|source| AnalysisError::Io { path: path.to_path_buf(), source })?;
    parse_cluster_assignments(&content)
}

/// Shannon entropy (natural log) of the distribution divided by `ln k`.
pub fn normalized_entropy(dist: &TypeDistribution, k: usize) -> Result<f64, AnalysisError> {
    if dist.total == 0 {
        return Err(AnalysisError::EmptyDistribution);
    }
    if k < 2 {
        return Err(AnalysisError::TooFewCategories(k));
    }
    let nonzero = dist.nonzero();
    if nonzero > k {
        return Err(AnalysisError::CategoryOverflow { nonzero, k });
    }
    let total = dist.total as f64;
    let h: f64 = dist
        .counts
        .values()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            p * (1.0 / p).ln()
        })
        .sum();
    Ok((h / (k as f64).ln()).clamp(0.0, 1.0))
}

pub fn mean_normalized_entropy(dists: &[(TypeDistribution, usize)]) -> Result<f64, AnalysisError> {
    if dists.is_empty() {
        return Err(AnalysisError::NothingToAverage);
    }
    let sum = dists
        .iter()
        .map(|(d, k)| normalized_entropy(d, *k))
        .sum::<Result<f64, _>>()?;
    Ok(sum / dists.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Authentic,
    Synthetic,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::Authentic => "authentic",
            Origin::Synthetic => "synthetic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscriminatorExample {
    pub grammatical: String,
    pub ungrammatical: String,
    pub origin: Origin,
}

fn examples(pairs: &[ParallelPair], origin: Origin) -> Vec<DiscriminatorExample> {
    pairs
        .iter()
        .filter(|p| !p.degenerate && !p.original.is_empty() && !p.corrupted.is_empty())
        .map(|p| DiscriminatorExample { grammatical: p.original.joined(), ungrammatical: p.corrupted.joined(), origin })
        .collect()
}

/// Balances authentic and synthetic pairs by seeded downsampling of the
/// larger side, then shuffles. Degenerate pairs are dropped first.
pub fn build_discriminator_set(
    authentic: &[ParallelPair],
    synthetic: &[ParallelPair],
    seed: u64,
) -> Result<Vec<DiscriminatorExample>, AnalysisError> {
    let auth = examples(authentic, Origin::Authentic);
    let synth = examples(synthetic, Origin::Synthetic);
    if auth.is_empty() {
        return Err(AnalysisError::EmptySide("authentic"));
    }
    if synth.is_empty() {
        return Err(AnalysisError::EmptySide("synthetic"));
    }
    let n = auth.len().min(synth.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let downsample = |side: Vec<DiscriminatorExample>, rng: &mut ChaCha8Rng| {
        let mut keep = sample(rng, side.len(), n).into_vec();
        keep.sort_unstable();
        keep.into_iter().map(|i| side[i].clone()).collect::<Vec<_>>()
    };
    let mut out = downsample(auth, &mut rng);
    out.extend(downsample(synth, &mut rng));
    out.shuffle(&mut rng);
    Ok(out)
}

pub fn render_discriminator_tsv(examples: &[DiscriminatorExample]) -> String {
    let mut out = String::new();
    for e in examples {
        out.push_str(&e.grammatical);
        out.push('\t');
        out.push_str(&e.ungrammatical);
        out.push('\t');
        out.push_str(e.origin.as_str());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus_io::Provenance;
    use proptest::prelude::*;

    fn dist(counts: &[u64]) -> TypeDistribution {
        let mut d = TypeDistribution::default();
        for (i, c) in counts.iter().enumerate() {
            d.add(&format!("k{i}"), *c);
        }
        d
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_edit(&["very"], &[] as &[&str]), ErrorType::Missing);
        assert_eq!(classify_edit(&[] as &[&str], &["really"]), ErrorType::Extra);
        assert_eq!(classify_edit(&["The"], &["the"]), ErrorType::Case);
        assert_eq!(classify_edit(&["krása"], &["krasa"]), ErrorType::Diacr);
        assert_eq!(classify_edit(&["krasa"], &["krása"]), ErrorType::Diacr);
        assert_eq!(classify_edit(&["is", "he"], &["he", "is"]), ErrorType::Order);
        assert_eq!(classify_edit(&["."], &["!"]), ErrorType::Punct);
        assert_eq!(classify_edit(&["house"], &["hous"]), ErrorType::Spell);
        assert_eq!(classify_edit(&["house"], &["building"]), ErrorType::Other);
        assert_eq!(classify_edit(&["a", "b"], &["c"]), ErrorType::Other);
    }

    #[test]
    fn precedence_case_before_diacritics() {
        // Case-only difference wins even though diacritics agree.
        assert_eq!(classify_edit(&["Éva"], &["éva"]), ErrorType::Case);
        // Both case and diacritics differ: falls through to SPELL.
        assert_eq!(classify_edit(&["Éva"], &["eva"]), ErrorType::Spell);
    }

    #[test]
    fn distribution_tallies() {
        let rec = |o: &[&str], c: &[&str]| EditRecord {
            sentence: 0,
            kind: EditKind::Substitute,
            original_span: [0, 0],
            corrupted_span: [0, 0],
            original: o.iter().map(|s| s.to_string()).collect(),
            corrupted: c.iter().map(|s| s.to_string()).collect(),
        };
        let empty = type_distribution(&[]);
        assert_eq!(empty.total, 0);
        assert_eq!(empty.counts.len(), 8);
        assert!(normalized_entropy(&empty, 8).is_err());

        let three = type_distribution(&[rec(&["a"], &[]), rec(&["b"], &[]), rec(&["c"], &[])]);
        assert_eq!((three.count("MISSING"), three.total), (3, 3));

        let mixed = type_distribution(&[
            rec(&["a"], &[]),
            rec(&[], &["x"]),
            rec(&["The"], &["the"]),
            rec(&["house"], &["hous"]),
            rec(&["The"], &["THE"]),
        ]);
        assert_eq!(mixed.count("MISSING"), 1);
        assert_eq!(mixed.count("EXTRA"), 1);
        assert_eq!(mixed.count("CASE"), 2);
        assert_eq!(mixed.count("SPELL"), 1);
        assert_eq!(mixed.total, 5);
    }

    #[test]
    fn entropy_examples() {
        assert!((normalized_entropy(&dist(&[5, 5, 5, 5]), 4).unwrap() - 1.0).abs() < 1e-12);
        let single = normalized_entropy(&dist(&[10, 0, 0, 0]), 4).unwrap();
        assert!(single == 0.0 && single.is_sign_positive());
        assert!((normalized_entropy(&dist(&[2, 1, 1]), 4).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn entropy_errors() {
        assert!(matches!(normalized_entropy(&dist(&[1, 1]), 1), Err(AnalysisError::TooFewCategories(1))));
        assert!(matches!(
            normalized_entropy(&dist(&[1, 1, 1]), 2),
            Err(AnalysisError::CategoryOverflow { nonzero: 3, k: 2 })
        ));
        assert!(matches!(mean_normalized_entropy(&[]), Err(AnalysisError::NothingToAverage)));
    }

    #[test]
    fn mean_entropy() {
        let uniform = dist(&[5, 5, 5, 5]);
        let point = dist(&[7]);
        assert!((mean_normalized_entropy(&[(uniform.clone(), 4)]).unwrap() - 1.0).abs() < 1e-12);
        assert!((mean_normalized_entropy(&[(uniform.clone(), 4), (point.clone(), 4)]).unwrap() - 0.5).abs() < 1e-12);
        // 1.0, 0.0, 0.75 and [1,1] over k=4 gives ln2/ln4 = 0.5: mean 2.25 / 4.
        let four = [(uniform, 4), (point, 4), (dist(&[2, 1, 1]), 4), (dist(&[1, 1]), 4)];
        assert!((mean_normalized_entropy(&four).unwrap() - 0.5625).abs() < 1e-12);
    }

    #[test]
    fn cluster_file() {
        let d = parse_cluster_assignments("wrong verb form\t3\nmissing article\t1\nother\t3\n").unwrap();
        assert_eq!((d.count("3"), d.count("1"), d.total), (2, 1, 3));
        assert!(parse_cluster_assignments("no tab\n").is_err());
    }

    fn pairs(n: usize, prov: Provenance) -> Vec<ParallelPair> {
        (0..n)
            .map(|i| {
                ParallelPair::new(
                    TokenSequence::new([format!("s{i}"), "ok".into()]),
                    TokenSequence::new([format!("s{i}"), "bad".into()]),
                    prov,
                )
            })
            .collect()
    }

    #[test]
    fn discriminator_balancing() {
        let out = build_discriminator_set(&pairs(10, Provenance::Authentic), &pairs(10, Provenance::SyntheticRules), 1).unwrap();
        assert_eq!(out.len(), 20);
        assert_eq!(out.iter().filter(|e| e.origin == Origin::Authentic).count(), 10);

        let out = build_discriminator_set(&pairs(100, Provenance::Authentic), &pairs(10, Provenance::SyntheticRules), 1).unwrap();
        assert_eq!(out.len(), 20);
        assert_eq!(out.iter().filter(|e| e.origin == Origin::Synthetic).count(), 10);

        let a = render_discriminator_tsv(&build_discriminator_set(&pairs(50, Provenance::Authentic), &pairs(30, Provenance::SyntheticRules), 9).unwrap());
        let b = render_discriminator_tsv(&build_discriminator_set(&pairs(50, Provenance::Authentic), &pairs(30, Provenance::SyntheticRules), 9).unwrap());
        assert_eq!(a, b);
        assert!(a.lines().all(|l| l.split('\t').count() == 3));
    }

    #[test]
    fn discriminator_empty_side() {
        assert!(matches!(
            build_discriminator_set(&[], &pairs(3, Provenance::SyntheticRules), 0),
            Err(AnalysisError::EmptySide("authentic"))
        ));
    }

    proptest! {
        #[test]
        fn entropy_in_unit_interval(counts in proptest::collection::vec(0u64..50, 1..10), extra in 0usize..5) {
            let d = dist(&counts);
            prop_assume!(d.total > 0);
            let k = counts.len().max(2) + extra;
            let h = normalized_entropy(&d, k).unwrap();
            prop_assert!((0.0..=1.0).contains(&h));
            if d.nonzero() == 1 {
                prop_assert_eq!(h, 0.0);
            }
        }

        #[test]
        fn merge_adds_componentwise(a in proptest::collection::vec(0u64..20, 8), b in proptest::collection::vec(0u64..20, 8)) {
            let (da, db) = (dist(&a), dist(&b));
            let m = da.merge(&db);
            prop_assert_eq!(m.total, da.total + db.total);
            for i in 0..8 {
                let key = format!("k{i}");
                prop_assert_eq!(m.count(&key), a[i] + b[i]);
            }
        }

        #[test]
        fn classify_is_deterministic(o in proptest::collection::vec("[a-cA-C.,]{1,3}", 0..3), c in proptest::collection::vec("[a-cA-C.,]{1,3}", 0..3)) {
            prop_assert_eq!(classify_edit(&o, &c), classify_edit(&o, &c));
        }

        #[test]
        fn balanced_classes(na in 1usize..40, ns in 1usize..40, seed in any::<u64>()) {
            let out = build_discriminator_set(&pairs(na, Provenance::Authentic), &pairs(ns, Provenance::SyntheticRules), seed).unwrap();
            let a = out.iter().filter(|e| e.origin == Origin::Authentic).count();
            prop_assert!(a.abs_diff(out.len() - a) <= 1);
        }
    }
}
