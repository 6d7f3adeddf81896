use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use gedkit_core::alignment::label_corpus;
use gedkit_core::analysis::{
    build_discriminator_set, mean_normalized_entropy, normalized_entropy, parse_edit_log, read_cluster_assignments,
    render_discriminator_tsv, render_edit_log, type_distribution, EditRecord, TypeDistribution,
};
use gedkit_core::corpus_io::{
    m2_to_labels, read_m2, read_multiged_tsv, read_parallel, read_parallel_tsv, read_predictions,
    read_synthetic_jsonl, render_multiged_tsv, render_synthetic_jsonl,
};
use gedkit_core::corruption::{build_confusion_index, corrupt_corpus_with_stats, RateMode};
use gedkit_core::evaluation::{best_f_half, pr_curve, score};
use gedkit_core::pipeline::{sample_clean, PipelineConfig};
use gedkit_core::{CorruptionConfig, Dictionary, TokenSequence, TokenizerKind, TokenizerScheme};
use serde::Serialize;
use serde_json::json;

use crate::args::*;
use crate::output::Outputs;

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn text_lines(content: &str) -> Vec<String> {
    content.lines().map(|l| l.trim_end_matches('\r').to_owned()).collect()
}

fn load_config(path: Option<&PathBuf>) -> Result<Option<PipelineConfig>> {
    path.map(|p| PipelineConfig::load(p).with_context(|| format!("loading config {}", p.display())))
        .transpose()
}

/// `--tokenizer`, else the config's tokenizer for `--lang`, else whitespace.
fn pick_tokenizer(flag: Option<TokenizerKind>, config: Option<&PipelineConfig>, lang: Option<&str>) -> TokenizerScheme {
    let from_config = lang.and_then(|l| config.and_then(|c| c.tokenizer_for(l)));
    let mut scheme = match (flag, from_config) {
        (Some(kind), _) => TokenizerScheme::new(kind),
        (None, Some(scheme)) => scheme,
        (None, None) => TokenizerScheme::new(TokenizerKind::Whitespace),
    };
    if let Some(l) = lang {
        scheme = scheme.with_language(l);
    }
    scheme
}

fn print_json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn convert(a: &ConvertArgs) -> Result<()> {
    let records = read_m2(&a.input)?;
    let sentences = records.iter().map(|r| m2_to_labels(r, a.annotator)).collect::<Result<Vec<_>, _>>()?;
    let mut out = Outputs::new("convert", &json!({ "annotator": a.annotator }));
    out.input(&a.input)
        .file(&a.out, render_multiged_tsv(&sentences))
        .counter("records", records.len())
        .counter("tokens_incorrect", sentences.iter().map(|s| s.incorrect_positions().len()).sum());
    out.commit()
}

pub fn label(a: &LabelArgs) -> Result<()> {
    let mut out = Outputs::new(
        "label",
        &json!({ "tokenizer": a.tokenizer.as_str(), "emit_edits": a.emit_edits.is_some() }),
    );
    let mut pairs = match (&a.original, &a.corrupted, &a.tsv, &a.jsonl) {
        (Some(o), Some(c), None, None) => {
            out.input(o).input(c);
            read_parallel(o, c)?
        }
        (None, None, Some(t), None) => {
            out.input(t);
            read_parallel_tsv(t)?
        }
        (None, None, None, Some(j)) => {
            out.input(j);
            read_synthetic_jsonl(j)?
        }
        _ => bail!("give exactly one of --original/--corrupted, --tsv or --jsonl"),
    };
    if !matches!(a.tokenizer, TokenizerKind::Whitespace | TokenizerKind::Pretokenized) {
        let scheme = TokenizerScheme::new(a.tokenizer);
        pairs.iter_mut().for_each(|p| p.retokenize(&scheme));
    }

    let corpus = label_corpus(&pairs, a.emit_edits.is_some());
    out.file(&a.out, render_multiged_tsv(&corpus.sentences));
    if let Some(path) = &a.emit_edits {
        let records: Vec<EditRecord> = corpus
            .edits
            .iter()
            .flat_map(|(i, edits)| edits.iter().map(|e| EditRecord::new(*i, e, &pairs[*i].original, &pairs[*i].corrupted)))
            .collect();
        out.file(path, render_edit_log(&records)).counter("edits", records.len());
    }
    let s = &corpus.stats;
    out.counter("pairs_read", pairs.len())
        .counter("pairs_labeled", s.pairs_labeled)
        .counter("pairs_skipped_degenerate", s.pairs_skipped_degenerate)
        .counter("pairs_skipped_length_ratio", s.pairs_skipped_length_ratio)
        .counter("tokens_labeled", s.tokens_labeled)
        .counter("tokens_incorrect", s.tokens_incorrect);
    let skipped = s.pairs_skipped_degenerate + s.pairs_skipped_length_ratio;
    if skipped > 0 {
        out.warn(format!("{skipped} pairs skipped (blank side or length ratio above 4)"));
    }
    out.commit()
}

#[derive(Serialize)]
struct CorruptSettings<'a> {
    corruption: &'a CorruptionConfig,
    tokenizer: &'a str,
    language: Option<&'a str>,
}

pub fn corrupt(a: &CorruptArgs) -> Result<()> {
    let config = load_config(a.config.as_ref())?;
    let mut cc = match &config {
        Some(c) => c.corruption.clone().unwrap_or_else(|| CorruptionConfig { seed: c.seed, ..Default::default() }),
        None => CorruptionConfig::default(),
    };
    if let Some(v) = a.seed {
        cc.seed = v;
    }
    if let Some(v) = a.p_word {
        cc.p_word = v;
    }
    if let Some(v) = a.p_char {
        cc.p_char = v;
    }
    if let Some(v) = a.weights {
        cc.word_op_weights = v;
    }
    if let Some(v) = a.char_weights {
        cc.char_op_weights = v;
    }
    if let Some(v) = a.max_distance {
        cc.max_distance = v;
    }
    if a.per_sentence_rate {
        cc.rate_mode = RateMode::PerSentence;
    }
    if a.avoid_in_sentence {
        cc.avoid_in_sentence_replacements = true;
    }
    cc.validate()?;
    let tokenizer = pick_tokenizer(a.tokenizer, config.as_ref(), a.lang.as_deref());

    let lines = text_lines(&read_text(&a.input)?);
    let blank = lines.iter().filter(|l| l.trim().is_empty()).count();
    let sentences: Vec<TokenSequence> = lines
        .iter()
        .filter(|l| !l.trim().is_empty())
        .map(|l| tokenizer.tokenize(l).with_language(a.lang.clone()))
        .collect();
    let dictionary = Dictionary::load(&a.dict)?;
    let index = build_confusion_index(&dictionary, cc.max_distance)?;
    let (pairs, stats) = corrupt_corpus_with_stats(&sentences, &cc, &index)?;

    let settings = CorruptSettings { corruption: &cc, tokenizer: tokenizer.kind.as_str(), language: a.lang.as_deref() };
    let mut out = Outputs::new("corrupt", &settings);
    if let Some(p) = &a.config {
        out.input(p);
    }
    out.input(&a.input)
        .input(&a.dict)
        .file(&a.out, render_synthetic_jsonl(&pairs))
        .counter("blank_lines_skipped", blank)
        .counter("sentences", stats.sentences)
        .counter("sentences_changed", stats.sentences_changed)
        .counter("tokens_in", stats.tokens_in)
        .counter("word_ops", stats.word_ops)
        .counter("char_ops", stats.char_ops);
    out.commit()
}

pub fn confusion(c: &ConfusionCommand) -> Result<()> {
    match c {
        ConfusionCommand::Build(a) => {
            let dictionary = Dictionary::load(&a.dict)?;
            let index = build_confusion_index(&dictionary, a.max_distance)?;
            let stats = json!({
                "words": index.len(),
                "max_distance": index.max_distance(),
                "delete_variants": index.variant_count(),
                "alphabet_size": index.alphabet().len(),
            });
            let mut out = Outputs::new("confusion build", &json!({ "max_distance": a.max_distance }));
            out.input(&a.dict).file(&a.out, print_json(&stats)).counter("words", index.len());
            out.commit()
        }
        ConfusionCommand::Query(a) => {
            let dictionary = Dictionary::load(&a.dict)?;
            let index = build_confusion_index(&dictionary, a.max_distance)?;
            for word in &a.words {
                let neighbors: Vec<_> = index
                    .lookup(word)
                    .into_iter()
                    .take(a.limit.unwrap_or(usize::MAX))
                    .map(|n| json!({ "word": n.word, "distance": n.distance, "count": n.count }))
                    .collect();
                println!("{}", json!({ "word": word, "in_dictionary": index.contains(word), "neighbors": neighbors }));
            }
            Ok(())
        }
    }
}

pub fn sample(a: &SampleArgs) -> Result<()> {
    let config = load_config(a.config.as_ref())?;
    let mut settings = config.as_ref().map(|c| c.sample).unwrap_or_default();
    if let Some(v) = a.n {
        settings.n = v;
    }
    if let Some(v) = a.min_tokens {
        settings.min_tokens = v;
    }
    if let Some(v) = a.max_tokens {
        settings.max_tokens = v;
    }
    if settings.min_tokens > settings.max_tokens {
        bail!("--min-tokens {} exceeds --max-tokens {}", settings.min_tokens, settings.max_tokens);
    }
    let seed = a.seed.or(config.as_ref().map(|c| c.seed)).unwrap_or(0);
    let tokenizer = pick_tokenizer(a.tokenizer, config.as_ref(), a.lang.as_deref());

    let lines = text_lines(&read_text(&a.input)?);
    let predictions = a.predictions.as_ref().map(read_predictions).transpose()?;
    let outcome = sample_clean(&lines, settings, predictions.as_ref(), &tokenizer, seed)?;

    let mut text = outcome.sentences.join("\n");
    if !text.is_empty() {
        text.push('\n');
    }
    let manifest_settings = json!({
        "sample": settings,
        "seed": seed,
        "tokenizer": tokenizer.kind.as_str(),
        "error_filter": predictions.is_some(),
    });
    let mut out = Outputs::new("sample", &manifest_settings);
    if let Some(p) = &a.config {
        out.input(p);
    }
    out.input(&a.input);
    if let Some(p) = &a.predictions {
        out.input(p);
    }
    let s = outcome.stats;
    out.file(&a.out, text)
        .counter("input_lines", s.input_lines)
        .counter("dropped_length", s.dropped_length)
        .counter("dropped_duplicate", s.dropped_duplicate)
        .counter("dropped_predicted_error", s.dropped_predicted_error)
        .counter("survivors", s.survivors)
        .counter("emitted", s.emitted);
    if s.shortfall {
        out.warn(format!("only {} sentences survived filtering, fewer than the {} requested", s.emitted, settings.n));
    }
    out.commit()
}

pub fn evaluate(a: &EvaluateArgs) -> Result<()> {
    let gold = read_multiged_tsv(&a.gold)?;
    let pred = read_predictions(&a.pred)?;
    let report = score(&gold, &pred, a.threshold)?;
    let doc = json!({
        "report": report,
        "metadata": {
            "positive_class": "i",
            "averaging": "micro",
            "beta": 0.5,
            "punctuation": "included",
            "comparison": "probability >= threshold",
        },
    });
    let text = print_json(&doc);
    if let Some(path) = &a.out {
        let mut out = Outputs::new("evaluate", &json!({ "threshold": a.threshold }));
        out.input(&a.gold).input(&a.pred).file(path, text.clone());
        out.commit()?;
    }
    print!("{text}");
    Ok(())
}

pub fn pr_curve_cmd(a: &PrCurveArgs) -> Result<()> {
    let gold = read_multiged_tsv(&a.gold)?;
    let pred = read_predictions(&a.pred)?;
    let curve = pr_curve(&gold, &pred)?;
    let mut out = Outputs::new("pr-curve", &json!({ "svg": a.svg.is_some() }));
    out.input(&a.gold).input(&a.pred).file(&a.out, curve.to_csv()).counter("points", curve.points.len());
    if let Some(svg) = &a.svg {
        out.file(svg, curve.to_svg());
    }
    out.commit()?;
    let (threshold, f) = best_f_half(&curve).expect("curve always has sentinel points");
    println!("{}", json!({ "points": curve.points.len(), "best_threshold": threshold, "best_f_half": f }));
    Ok(())
}

pub fn analyze(c: &AnalyzeCommand) -> Result<()> {
    match c {
        AnalyzeCommand::Edits(a) => {
            let mut out = Outputs::new("analyze edits", &json!({ "source": if a.clusters.is_some() { "clusters" } else { "edits" } }));
            let dist = if let Some(path) = &a.clusters {
                out.input(path);
                read_cluster_assignments(path)?
            } else {
                let mut dist = TypeDistribution::empty_builtin();
                for path in &a.inputs {
                    let edits = parse_edit_log(&read_text(path)?).with_context(|| format!("in {}", path.display()))?;
                    dist = dist.merge(&type_distribution(&edits));
                    out.input(path);
                }
                dist
            };
            out.counter("edits", dist.total as usize).file(&a.out, print_json(&dist));
            out.commit()
        }
        AnalyzeCommand::Entropy(a) => {
            let n = a.inputs.len().max(a.ks.len());
            let pairs_ok = a.inputs.len() == a.ks.len() || a.inputs.len() == 1 || a.ks.len() == 1;
            if !pairs_ok {
                bail!("{} --in values cannot be paired with {} --k values", a.inputs.len(), a.ks.len());
            }
            let mut dists = Vec::with_capacity(n);
            for i in 0..n {
                let path = &a.inputs[i.min(a.inputs.len() - 1)];
                let k = a.ks[i.min(a.ks.len() - 1)];
                let dist: TypeDistribution = serde_json::from_str(&read_text(path)?)
                    .with_context(|| format!("{} is not a distribution file", path.display()))?;
                dists.push((path, dist, k));
            }
            let mut entries = Vec::new();
            for (path, dist, k) in &dists {
                let h = normalized_entropy(dist, *k).with_context(|| format!("{} with k = {k}", path.display()))?;
                entries.push(json!({ "input": path, "k": k, "normalized_entropy": h }));
            }
            let owned: Vec<(TypeDistribution, usize)> = dists.iter().map(|(_, d, k)| (d.clone(), *k)).collect();
            let doc = json!({ "entries": entries, "mean_normalized_entropy": mean_normalized_entropy(&owned)? });
            let text = print_json(&doc);
            if let Some(path) = &a.out {
                let mut out = Outputs::new("analyze entropy", &json!({ "k": a.ks }));
                for p in &a.inputs {
                    out.input(p);
                }
                out.file(path, text.clone());
                out.commit()?;
            }
            print!("{text}");
            Ok(())
        }
    }
}

pub fn discriminator(a: &DiscriminatorArgs) -> Result<()> {
    let authentic = read_synthetic_jsonl(&a.authentic)?;
    let synthetic = read_synthetic_jsonl(&a.synthetic)?;
    let examples = build_discriminator_set(&authentic, &synthetic, a.seed)?;
    let mut out = Outputs::new("discriminator-data", &json!({ "seed": a.seed }));
    out.input(&a.authentic)
        .input(&a.synthetic)
        .file(&a.out, render_discriminator_tsv(&examples))
        .counter("authentic_pairs", authentic.len())
        .counter("synthetic_pairs", synthetic.len())
        .counter("examples", examples.len());
    out.commit()
}
