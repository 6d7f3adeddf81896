//! Rule-based artificial error generation: seeded word- and character-level
//! deletion, insertion, swapping and replacement, with word replacements
//! drawn from dictionary confusion sets.

mod confusion;

use std::collections::HashSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use confusion::{build_confusion_index, damerau_levenshtein, ConfusionIndex, Dictionary, Neighbor};

use crate::corpus_io::{ParallelPair, Provenance, TokenSequence};
use crate::tokenization::is_punctuation_token;

#[derive(Debug, Error)]
pub enum CorruptionError {
    #[error("dictionary is empty")]
    EmptyDictionary,
    #[error("max distance must be 1 or 2, got {0}")]
    MaxDistance(usize),
    #[error("dictionary line {line}: {message}")]
    Dictionary { line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid corruption config: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseOp {
    Replace,
    Delete,
    Insert,
    Swap,
}

const OPS: [NoiseOp; 4] = [NoiseOp::Replace, NoiseOp::Delete, NoiseOp::Insert, NoiseOp::Swap];

/// Relative weights over the four noise operations; normalized when sampled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OpWeights {
    pub replace: f64,
    pub delete: f64,
    pub insert: f64,
    pub swap: f64,
}

impl OpWeights {
    pub const UNIFORM: OpWeights = OpWeights { replace: 1.0, delete: 1.0, insert: 1.0, swap: 1.0 };

    pub fn only(op: NoiseOp) -> Self {
        let mut w = OpWeights { replace: 0.0, delete: 0.0, insert: 0.0, swap: 0.0 };
        *w.get_mut(op) = 1.0;
        w
    }

    pub fn get(&self, op: NoiseOp) -> f64 {
        match op {
            NoiseOp::Replace => self.replace,
            NoiseOp::Delete => self.delete,
            NoiseOp::Insert => self.insert,
            NoiseOp::Swap => self.swap,
        }
    }

    fn get_mut(&mut self, op: NoiseOp) -> &mut f64 {
        match op {
            NoiseOp::Replace => &mut self.replace,
            NoiseOp::Delete => &mut self.delete,
            NoiseOp::Insert => &mut self.insert,
            NoiseOp::Swap => &mut self.swap,
        }
    }

    pub fn validate(&self) -> Result<(), CorruptionError> {
        let ws = OPS.map(|op| self.get(op));
        if ws.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(CorruptionError::Config(format!("weights must be non-negative: {self}")));
        }
        if ws.iter().sum::<f64>() <= 0.0 {
            return Err(CorruptionError::Config("weights must sum to a positive value".into()));
        }
        Ok(())
    }

    fn sampler(&self) -> WeightedIndex<f64> {
        WeightedIndex::new(OPS.map(|op| self.get(op))).expect("validated weights")
    }
}

impl fmt::Display for OpWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "replace={},delete={},insert={},swap={}",
            self.replace, self.delete, self.insert, self.swap
        )
    }
}

/// Parses `replace=0.7,delete=0.1,...`; unnamed operations get weight 0.
impl FromStr for OpWeights {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut w = OpWeights { replace: 0.0, delete: 0.0, insert: 0.0, swap: 0.0 };
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, value) = part.split_once('=').ok_or_else(|| format!("expected op=weight, got {part:?}"))?;
            let op = match name.trim() {
                "replace" => NoiseOp::Replace,
                "delete" => NoiseOp::Delete,
                "insert" => NoiseOp::Insert,
                "swap" => NoiseOp::Swap,
                other => return Err(format!("unknown operation {other:?}")),
            };
            *w.get_mut(op) = value.trim().parse().map_err(|_| format!("bad weight {value:?}"))?;
        }
        w.validate().map_err(|e| e.to_string())?;
        Ok(w)
    }
}

/// How word-level errors are placed in a sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateMode {
    /// Each token independently with probability `p_word`.
    #[default]
    PerToken,
    /// Error count drawn from N(p_word * len, 0.2), rounded and clamped,
    /// placed at distinct uniformly chosen positions.
    PerSentence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorruptionConfig {
    pub seed: u64,
    pub p_word: f64,
    pub word_op_weights: OpWeights,
    pub p_char: f64,
    pub char_op_weights: OpWeights,
    pub max_distance: usize,
    pub rate_mode: RateMode,
    /// Skip confusion candidates that already occur in the sentence.
    pub avoid_in_sentence_replacements: bool,
}

impl Default for CorruptionConfig {
    fn default() -> Self {
        CorruptionConfig {
            seed: 0,
            p_word: 0.15,
            word_op_weights: OpWeights { replace: 0.7, delete: 0.1, insert: 0.1, swap: 0.1 },
            p_char: 0.1,
            char_op_weights: OpWeights::UNIFORM,
            max_distance: 2,
            rate_mode: RateMode::PerToken,
            avoid_in_sentence_replacements: false,
        }
    }
}

impl CorruptionConfig {
    pub fn validate(&self) -> Result<(), CorruptionError> {
        for (name, p) in [("p_word", self.p_word), ("p_char", self.p_char)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(CorruptionError::Config(format!("{name} = {p} outside [0, 1]")));
            }
        }
        self.word_op_weights.validate()?;
        self.char_op_weights.validate()?;
        if !(1..=2).contains(&self.max_distance) {
            return Err(CorruptionError::MaxDistance(self.max_distance));
        }
        Ok(())
    }
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for sentence `ordinal`: `mix64(global ^ mix64(ordinal + φ))` where
/// φ is the 64-bit golden-ratio increment.
pub fn sentence_seed(global: u64, ordinal: u64) -> u64 {
    mix64(global ^ mix64(ordinal.wrapping_add(0x9E37_79B9_7F4A_7C15)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct CorruptionStats {
    pub sentences: usize,
    pub sentences_changed: usize,
    pub tokens_in: usize,
    pub word_ops: usize,
    pub char_ops: usize,
}

impl CorruptionStats {
    fn merge(mut self, other: CorruptionStats) -> Self {
        self.sentences += other.sentences;
        self.sentences_changed += other.sentences_changed;
        self.tokens_in += other.tokens_in;
        self.word_ops += other.word_ops;
        self.char_ops += other.char_ops;
        self
    }
}

struct Noiser<'a> {
    config: &'a CorruptionConfig,
    index: &'a ConfusionIndex,
    word_ops: WeightedIndex<f64>,
    char_ops: WeightedIndex<f64>,
    rng: ChaCha8Rng,
    in_sentence: HashSet<&'a str>,
    stats: CorruptionStats,
}

impl<'a> Noiser<'a> {
    fn new(config: &'a CorruptionConfig, index: &'a ConfusionIndex, tokens: &'a [String], seed: u64) -> Self {
        Noiser {
            config,
            index,
            word_ops: config.word_op_weights.sampler(),
            char_ops: config.char_op_weights.sampler(),
            rng: ChaCha8Rng::seed_from_u64(seed),
            in_sentence: tokens.iter().map(String::as_str).collect(),
            stats: CorruptionStats::default(),
        }
    }

    fn selected_positions(&mut self, n: usize) -> Vec<bool> {
        match self.config.rate_mode {
            RateMode::PerToken => (0..n).map(|_| self.rng.gen_bool(self.config.p_word)).collect(),
            RateMode::PerSentence => {
                let mut chosen = vec![false; n];
                if n == 0 {
                    return chosen;
                }
                let normal = Normal::new(self.config.p_word * n as f64, 0.2).expect("finite parameters");
                let count = normal.sample(&mut self.rng).round().clamp(0.0, n as f64) as usize;
                for k in sample(&mut self.rng, n, count) {
                    chosen[k] = true;
                }
                chosen
            }
        }
    }

    fn run(&mut self, tokens: &[String]) -> Vec<String> {
        let n = tokens.len();
        let selected = self.selected_positions(n);
        let mut out = Vec::with_capacity(n + 2);
        let mut k = 0;
        while k < n {
            let token = tokens[k].as_str();
            if !selected[k] {
                out.push(self.maybe_char_noise(token));
                k += 1;
                continue;
            }
            match OPS[self.word_ops.sample(&mut self.rng)] {
                NoiseOp::Replace => {
                    let replaced = self.replace_word(token);
                    out.push(self.maybe_char_noise(&replaced));
                }
                NoiseOp::Delete => {
                    self.stats.word_ops += 1;
                }
                NoiseOp::Insert => {
                    self.stats.word_ops += 1;
                    out.push(self.maybe_char_noise(token));
                    out.push(self.index.sample_word(&mut self.rng).to_owned());
                }
                NoiseOp::Swap if k + 1 < n => {
                    self.stats.word_ops += 1;
                    let next = self.maybe_char_noise(&tokens[k + 1]);
                    let this = self.maybe_char_noise(token);
                    out.push(next);
                    out.push(this);
                    k += 1;
                }
                NoiseOp::Swap => out.push(self.maybe_char_noise(token)),
            }
            k += 1;
        }
        out
    }

    /// A confusion-set neighbor, or character noise when the set is empty.
    /// Punctuation-only tokens are left unchanged.
    fn replace_word(&mut self, token: &str) -> String {
        if is_punctuation_token(token) {
            return token.to_owned();
        }
        self.stats.word_ops += 1;
        let candidates: Vec<&str> = self
            .index
            .lookup(token)
            .into_iter()
            .map(|nb| nb.word)
            .filter(|w| !self.config.avoid_in_sentence_replacements || !self.in_sentence.contains(w))
            .collect();
        if candidates.is_empty() {
            let op = OPS[self.char_ops.sample(&mut self.rng)];
            let mut noised = self.char_noise(token, op);
            if self.config.avoid_in_sentence_replacements {
                for _ in 0..8 {
                    if !self.in_sentence.contains(noised.as_str()) {
                        break;
                    }
                    noised = self.char_noise(token, op);
                }
            }
            return noised;
        }
        candidates[self.rng.gen_range(0..candidates.len())].to_owned()
    }

    fn maybe_char_noise(&mut self, token: &str) -> String {
        if self.config.p_char > 0.0 && self.rng.gen_bool(self.config.p_char) {
            self.stats.char_ops += 1;
            let op = OPS[self.char_ops.sample(&mut self.rng)];
            self.char_noise(token, op)
        } else {
            token.to_owned()
        }
    }

    /// Applies one character operation; the result differs from `token`
    /// whenever the alphabet allows it.
    fn char_noise(&mut self, token: &str, op: NoiseOp) -> String {
        let mut chars: Vec<char> = token.chars().collect();
        match op {
            NoiseOp::Delete if chars.len() >= 2 => {
                chars.remove(self.rng.gen_range(0..chars.len()));
            }
            NoiseOp::Insert => {
                let pos = self.rng.gen_range(0..=chars.len());
                chars.insert(pos, self.index.sample_char(&mut self.rng));
            }
            NoiseOp::Swap if chars.windows(2).any(|w| w[0] != w[1]) => {
                let swappable: Vec<usize> = (0..chars.len() - 1).filter(|&p| chars[p] != chars[p + 1]).collect();
                let p = swappable[self.rng.gen_range(0..swappable.len())];
                chars.swap(p, p + 1);
            }
            _ => {
                if chars.is_empty() {
                    return self.char_noise(token, NoiseOp::Insert);
                }
                let pos = self.rng.gen_range(0..chars.len());
                match self.different_char(chars[pos]) {
                    Some(c) => chars[pos] = c,
                    None => return self.char_noise(token, NoiseOp::Insert),
                }
            }
        }
        chars.into_iter().collect()
    }

    fn different_char(&mut self, current: char) -> Option<char> {
        for _ in 0..16 {
            let c = self.index.sample_char(&mut self.rng);
            if c != current {
                return Some(c);
            }
        }
        self.index.alphabet().iter().map(|(c, _)| *c).find(|&c| c != current)
    }
}

/// Corrupts one sentence. The result depends only on the arguments.
pub fn corrupt_sentence(
    tokens: &TokenSequence,
    config: &CorruptionConfig,
    index: &ConfusionIndex,
    sentence_seed: u64,
) -> TokenSequence {
    corrupt_sentence_with_stats(tokens, config, index, sentence_seed).0
}

pub fn corrupt_sentence_with_stats(
    tokens: &TokenSequence,
    config: &CorruptionConfig,
    index: &ConfusionIndex,
    sentence_seed: u64,
) -> (TokenSequence, CorruptionStats) {
    let mut noiser = Noiser::new(config, index, &tokens.tokens, sentence_seed);
    let out = noiser.run(&tokens.tokens);
    let mut stats = noiser.stats;
    stats.sentences = 1;
    stats.tokens_in = tokens.len();
    stats.sentences_changed = usize::from(out != tokens.tokens);
    let corrupted = TokenSequence {
        tokens: out,
        source_text: None,
        language: tokens.language.clone(),
    };
    (corrupted, stats)
}

/// Corrupts every sentence on the current rayon pool. Sentence `i` uses
/// `sentence_seed(config.seed, i)`, so output is independent of thread count.
pub fn corrupt_corpus(
    sentences: &[TokenSequence],
    config: &CorruptionConfig,
    index: &ConfusionIndex,
) -> Result<Vec<ParallelPair>, CorruptionError> {
    Ok(corrupt_corpus_with_stats(sentences, config, index)?.0)
}

pub fn corrupt_corpus_with_stats(
    sentences: &[TokenSequence],
    config: &CorruptionConfig,
    index: &ConfusionIndex,
) -> Result<(Vec<ParallelPair>, CorruptionStats), CorruptionError> {
    config.validate()?;
    let results: Vec<(ParallelPair, CorruptionStats)> = sentences
        .par_iter()
        .enumerate()
        .map(|(i, sentence)| {
            let seed = sentence_seed(config.seed, i as u64);
            let (corrupted, stats) = corrupt_sentence_with_stats(sentence, config, index, seed);
            let original = TokenSequence {
                tokens: sentence.tokens.clone(),
                source_text: None,
                language: sentence.language.clone(),
            };
            let mut pair = ParallelPair::flagged(original, corrupted, Provenance::SyntheticRules);
            pair.seed = Some(seed);
            (pair, stats)
        })
        .collect();
    let stats = results.iter().fold(CorruptionStats::default(), |acc, (_, s)| acc.merge(*s));
    Ok((results.into_iter().map(|(p, _)| p).collect(), stats))
}
