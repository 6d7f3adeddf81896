//! Multi-GED shared-task TSV: `token<TAB>label`, one blank line after every sentence.

use std::path::Path;

use super::{lines, read_to_string, write_string, FormatError, Label, LabeledSentence};

pub fn read_multiged_tsv(path: impl AsRef<Path>) -> Result<Vec<LabeledSentence>, FormatError> {
    parse_multiged_tsv(&read_to_string(path.as_ref())?)
}

pub fn parse_multiged_tsv(content: &str) -> Result<Vec<LabeledSentence>, FormatError> {
    let mut sentences = Vec::new();
    let mut tokens = Vec::new();
    let mut labels = Vec::new();
    for (line_no, line) in lines(content) {
        if line.is_empty() {
            if !tokens.is_empty() {
                sentences.push(LabeledSentence::new(
                    std::mem::take(&mut tokens),
                    std::mem::take(&mut labels),
                )?);
            }
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 {
            return Err(FormatError::parse(
                line_no,
                format!("expected 2 tab-separated fields, found {}", fields.len()),
            ));
        }
        if fields[0].is_empty() {
            return Err(FormatError::parse(line_no, "empty token"));
        }
        let label: Label = fields[1]
            .parse()
            .map_err(|e: String| FormatError::parse(line_no, e))?;
        tokens.push(fields[0].to_owned());
        labels.push(label);
    }
    if !tokens.is_empty() {
        sentences.push(LabeledSentence::new(tokens, labels)?);
    }
    Ok(sentences)
}

pub fn render_multiged_tsv(sentences: &[LabeledSentence]) -> String {
    let mut out = String::new();
    for sentence in sentences.iter().filter(|s| !s.is_empty()) {
        for (token, label) in sentence.iter() {
            out.push_str(token);
            out.push('\t');
            out.push_str(label.as_str());
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

pub fn write_multiged_tsv(sentences: &[LabeledSentence], path: impl AsRef<Path>) -> Result<(), FormatError> {
    write_string(path.as_ref(), &render_multiged_tsv(sentences))
}
