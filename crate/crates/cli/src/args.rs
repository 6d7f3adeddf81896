use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use gedkit_core::corruption::OpWeights;
use gedkit_core::TokenizerKind;

#[derive(Debug, Parser)]
#[command(name = "gedkit", about = "Corpus tooling for grammatical error detection")]
pub struct Cli {
    /// Worker threads; 0 uses every available core.
    #[arg(long, global = true, env = "GEDKIT_THREADS", default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert an M2 file to Multi-GED TSV.
    Convert(ConvertArgs),
    /// Align parallel sentences and write token labels.
    Label(LabelArgs),
    /// Inject rule-based errors into clean sentences.
    Corrupt(CorruptArgs),
    /// Inspect the confusion-set index.
    #[command(subcommand)]
    Confusion(ConfusionCommand),
    /// Sample clean sentences from a monolingual corpus.
    Sample(SampleArgs),
    /// Score predictions against gold labels.
    Evaluate(EvaluateArgs),
    /// Precision and recall at every distinct predicted probability.
    PrCurve(PrCurveArgs),
    /// Error-type distributions and entropy.
    #[command(subcommand)]
    Analyze(AnalyzeCommand),
    /// Balanced authentic/synthetic pairs for a discriminator.
    DiscriminatorData(DiscriminatorArgs),
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long = "in", value_name = "M2")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub annotator: u32,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct LabelArgs {
    /// Grammatical side, one sentence per line.
    #[arg(long, requires = "corrupted", conflicts_with_all = ["tsv", "jsonl"])]
    pub original: Option<PathBuf>,
    /// Ungrammatical side, line-aligned with --original.
    #[arg(long, requires = "original")]
    pub corrupted: Option<PathBuf>,
    /// Single `original<TAB>corrupted` file.
    #[arg(long, conflicts_with = "jsonl")]
    pub tsv: Option<PathBuf>,
    /// Synthetic pairs as written by `corrupt`.
    #[arg(long)]
    pub jsonl: Option<PathBuf>,
    #[arg(long, default_value_t = TokenizerKind::Whitespace)]
    pub tokenizer: TokenizerKind,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the merged edits as JSON lines.
    #[arg(long, value_name = "PATH")]
    pub emit_edits: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CorruptArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub dict: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// JSON pipeline config; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub p_word: Option<f64>,
    #[arg(long)]
    pub p_char: Option<f64>,
    /// Word operation weights, e.g. replace=0.7,delete=0.1,insert=0.1,swap=0.1
    #[arg(long)]
    pub weights: Option<OpWeights>,
    #[arg(long)]
    pub char_weights: Option<OpWeights>,
    #[arg(long)]
    pub max_distance: Option<usize>,
    /// Draw an error count per sentence instead of flipping a coin per token.
    #[arg(long)]
    pub per_sentence_rate: bool,
    /// Never replace a word with one already in the sentence.
    #[arg(long)]
    pub avoid_in_sentence: bool,
    #[arg(long)]
    pub lang: Option<String>,
    #[arg(long)]
    pub tokenizer: Option<TokenizerKind>,
}

#[derive(Debug, Subcommand)]
pub enum ConfusionCommand {
    /// Build the index and write its statistics.
    Build(ConfusionBuildArgs),
    /// Print ranked neighbors of each word as JSON lines.
    Query(ConfusionQueryArgs),
}

#[derive(Debug, Args)]
pub struct ConfusionBuildArgs {
    #[arg(long)]
    pub dict: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub max_distance: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ConfusionQueryArgs {
    #[arg(long)]
    pub dict: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub max_distance: usize,
    #[arg(long = "word", required = true)]
    pub words: Vec<String>,
    /// Keep at most this many neighbors per word.
    #[arg(long)]
    pub limit: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Drop sentences with any token predicted at P(i) >= 0.5.
    #[arg(long)]
    pub predictions: Option<PathBuf>,
    #[arg(long)]
    pub min_tokens: Option<usize>,
    #[arg(long)]
    pub max_tokens: Option<usize>,
    #[arg(long)]
    pub tokenizer: Option<TokenizerKind>,
    #[arg(long)]
    pub lang: Option<String>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    /// Also write the report to a file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PrCurveArgs {
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum AnalyzeCommand {
    /// Tally error types from edit logs or cluster assignments.
    Edits(AnalyzeEditsArgs),
    /// Normalized entropy of one or more distributions.
    Entropy(AnalyzeEntropyArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeEditsArgs {
    /// Edit logs written by `label --emit-edits`; merged.
    #[arg(long = "in", required_unless_present = "clusters", conflicts_with = "clusters")]
    pub inputs: Vec<PathBuf>,
    /// `edit<TAB>cluster_id` file from an external clusterer.
    #[arg(long)]
    pub clusters: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalyzeEntropyArgs {
    /// Distribution files written by `analyze edits`.
    #[arg(long = "in", required = true)]
    pub inputs: Vec<PathBuf>,
    /// Category counts, paired with --in in order; a single value applies to every input.
    #[arg(long = "k", required = true)]
    pub ks: Vec<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiscriminatorArgs {
    #[arg(long)]
    pub authentic: PathBuf,
    #[arg(long)]
    pub synthetic: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}
