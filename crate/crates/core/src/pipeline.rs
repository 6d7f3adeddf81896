//! Orchestration glue shared by the CLI: the JSON pipeline config, run
//! manifests, clean-corpus sampling and the ordered worker pool.

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus_io::PredictionFile;
use crate::corruption::CorruptionConfig;
use crate::tokenization::{TokenizerKind, TokenizerScheme};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("sample size must be at least 1")]
    EmptySample,
    #[error("prediction file has {predictions} sentences but the corpus has {sentences} non-blank lines")]
    PredictionCount { predictions: usize, sentences: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LanguageRole {
    /// Has human GED annotations.
    Source,
    /// Monolingual text only.
    Target,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageSpec {
    pub code: String,
    pub role: LanguageRole,
    #[serde(default)]
    pub tokenizer: TokenizerKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SampleSettings {
    pub n: usize,
    pub min_tokens: usize,
    pub max_tokens: usize,
}

impl Default for SampleSettings {
    fn default() -> Self {
        SampleSettings { n: 200_000, min_tokens: 3, max_tokens: 128 }
    }
}

/// Top-level JSON configuration. Every field has a default, and command-line
/// flags override whatever the file sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct PipelineConfig {
    pub seed: u64,
    pub languages: Vec<LanguageSpec>,
    pub corruption: Option<CorruptionConfig>,
    pub sample: SampleSettings,
    pub paths: BTreeMap<String, PathBuf>,
}

impl PipelineConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, PipelineError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| PipelineError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    /// Parses and validates a JSON config. A `corruption` section without
    /// its own `seed` inherits the top-level one.
    pub fn parse(text: &str) -> Result<Self, PipelineError> {
        let mut value: serde_json::Value = serde_json::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))?;
        if let Some(root) = value.as_object_mut() {
            let seed = root.get("seed").cloned();
            if let (Some(seed), Some(serde_json::Value::Object(c))) = (seed, root.get_mut("corruption")) {
                c.entry("seed").or_insert(seed);
            }
        }
        let config: PipelineConfig = serde_json::from_value(value).map_err(|e| PipelineError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let mut seen = HashSet::new();
        for lang in &self.languages {
            if !seen.insert(lang.code.as_str()) {
                return Err(PipelineError::Config(format!("language {:?} listed twice", lang.code)));
            }
        }
        if self.sample.min_tokens > self.sample.max_tokens {
            return Err(PipelineError::Config("sample.min_tokens exceeds sample.max_tokens".into()));
        }
        if let Some(c) = &self.corruption {
            c.validate().map_err(|e| PipelineError::Config(e.to_string()))?;
        }
        Ok(())
    }

    pub fn languages_with_role(&self, role: LanguageRole) -> impl Iterator<Item = &LanguageSpec> {
        self.languages.iter().filter(move |l| l.role == role)
    }

    /// Tokenizer configured for `code`, if the language is declared.
    pub fn tokenizer_for(&self, code: &str) -> Option<TokenizerScheme> {
        self.languages
            .iter()
            .find(|l| l.code == code)
            .map(|l| TokenizerScheme::new(l.tokenizer).with_language(code))
    }

    pub fn path(&self, name: &str) -> Option<&Path> {
        self.paths.get(name).map(PathBuf::as_path)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of a canonical JSON rendering; object keys are sorted.
pub fn config_hash(config: &serde_json::Value) -> String {
    sha256_hex(serde_json::to_string(config).expect("json value serializes").as_bytes())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

impl FileDigest {
    pub fn of(path: &Path) -> Result<Self, PipelineError> {
        let data = std::fs::read(path).map_err(|source| PipelineError::Io { path: path.to_path_buf(), source })?;
        Ok(FileDigest { path: path.display().to_string(), sha256: sha256_hex(&data), bytes: data.len() as u64 })
    }
}

/// Record of one subcommand run, written next to its primary output.
/// Contains no timestamps, so identical runs write identical manifests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub format_version: String,
    pub subcommand: String,
    pub config_hash: String,
    pub config: serde_json::Value,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub counters: BTreeMap<String, u64>,
    pub warnings: Vec<String>,
}

impl RunManifest {
    pub fn new(subcommand: &str, config: serde_json::Value) -> Self {
        RunManifest {
            tool: "gedkit".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            format_version: crate::FORMAT_VERSION.into(),
            subcommand: subcommand.into(),
            config_hash: config_hash(&config),
            config,
            inputs: Vec::new(),
            outputs: Vec::new(),
            counters: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    pub fn input(&mut self, path: &Path) -> Result<&mut Self, PipelineError> {
        self.inputs.push(FileDigest::of(path)?);
        Ok(self)
    }

    pub fn output(&mut self, path: &Path) -> Result<&mut Self, PipelineError> {
        self.outputs.push(FileDigest::of(path)?);
        Ok(self)
    }

    pub fn counter(&mut self, name: &str, value: u64) -> &mut Self {
        self.counters.insert(name.to_owned(), value);
        self
    }

    pub fn path_for(output: &Path) -> PathBuf {
        let mut name = output.file_name().map(|n| n.to_os_string()).unwrap_or_default();
        name.push(".manifest.json");
        output.with_file_name(name)
    }

    /// Writes `<output>.manifest.json` and returns its path.
    pub fn write_beside(&self, output: &Path) -> Result<PathBuf, PipelineError> {
        let path = Self::path_for(output);
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        std::fs::write(&path, text).map_err(|source| PipelineError::Io { path: path.clone(), source })?;
        Ok(path)
    }
}

/// Runs `f` on a dedicated pool of `threads` workers (0 means all cores).
/// Corpus-level operations use order-preserving parallel iterators, so the
/// thread count never changes results.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");
    pool.install(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct SampleStats {
    pub input_lines: usize,
    pub dropped_length: usize,
    pub dropped_duplicate: usize,
    pub dropped_predicted_error: usize,
    pub survivors: usize,
    pub emitted: usize,
    /// Set when fewer than `n` sentences survived filtering.
    pub shortfall: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleOutcome {
    pub sentences: Vec<String>,
    pub stats: SampleStats,
}

/// Probability at or above which a token counts as a predicted error.
pub const ERROR_FILTER_THRESHOLD: f64 = 0.5;

/// Samples up to `settings.n` clean sentences.
///
/// Lines outside the token bounds, exact duplicates (first kept) and, when
/// predictions are supplied, lines with any token at P(i) ≥ 0.5 are dropped.
/// The rest is reservoir-sampled under `seed` and emitted in corpus order.
/// Prediction sentences pair with non-blank corpus lines in order.
pub fn sample_clean(
    lines: &[String],
    settings: SampleSettings,
    filter: Option<&PredictionFile>,
    tokenizer: &TokenizerScheme,
    seed: u64,
) -> Result<SampleOutcome, PipelineError> {
    if settings.n == 0 {
        return Err(PipelineError::EmptySample);
    }
    if let Some(pred) = filter {
        let sentences = lines.iter().filter(|l| !l.trim().is_empty()).count();
        if pred.sentences.len() != sentences {
            return Err(PipelineError::PredictionCount { predictions: pred.sentences.len(), sentences });
        }
    }

    let mut stats = SampleStats { input_lines: lines.len(), ..Default::default() };
    let mut seen: HashSet<&str> = HashSet::new();
    let mut survivors: Vec<usize> = Vec::new();
    let mut pred_idx = 0;
    for (i, line) in lines.iter().enumerate() {
        let flagged = if line.trim().is_empty() {
            false
        } else {
            let p = filter.map(|f| &f.sentences[pred_idx]);
            pred_idx += 1;
            p.is_some_and(|s| s.probabilities.iter().any(|&x| x >= ERROR_FILTER_THRESHOLD))
        };
        let len = tokenizer.tokenize(line).len();
        if len < settings.min_tokens || len > settings.max_tokens {
            stats.dropped_length += 1;
        } else if !seen.insert(line.as_str()) {
            stats.dropped_duplicate += 1;
        } else if flagged {
            stats.dropped_predicted_error += 1;
        } else {
            survivors.push(i);
        }
    }
    stats.survivors = survivors.len();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reservoir: Vec<usize> = Vec::with_capacity(settings.n.min(survivors.len()));
    for (seen_count, &idx) in survivors.iter().enumerate() {
        if reservoir.len() < settings.n {
            reservoir.push(idx);
        } else {
            let j = rng.gen_range(0..=seen_count);
            if j < settings.n {
                reservoir[j] = idx;
            }
        }
    }
    reservoir.sort_unstable();
    stats.emitted = reservoir.len();
    stats.shortfall = stats.emitted < settings.n;
    Ok(SampleOutcome { sentences: reservoir.into_iter().map(|i| lines[i].clone()).collect(), stats })
}
