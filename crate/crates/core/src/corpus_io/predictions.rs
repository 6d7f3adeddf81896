//! Per-token system outputs: `token<TAB>probability`, blank-line separated.
//! Hard `c`/`i` labels in the second column are read as 0.0/1.0.

use std::path::Path;

use super::{lines, read_to_string, write_string, FormatError, Label, LabeledSentence};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PredictedSentence {
    pub tokens: Vec<String>,
    /// P(label = i) for each token.
    pub probabilities: Vec<f64>,
}

impl PredictedSentence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PredictionFile {
    pub sentences: Vec<PredictedSentence>,
}

impl PredictionFile {
    /// Treats gold-style labels as certain predictions.
    pub fn from_labels(sentences: &[LabeledSentence]) -> Self {
        PredictionFile {
            sentences: sentences
                .iter()
                .map(|s| PredictedSentence {
                    tokens: s.tokens().to_vec(),
                    probabilities: s.labels().iter().map(|l| if l.is_incorrect() { 1.0 } else { 0.0 }).collect(),
                })
                .collect(),
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for sentence in self.sentences.iter().filter(|s| !s.is_empty()) {
            for (t, p) in sentence.tokens.iter().zip(&sentence.probabilities) {
                out.push_str(t);
                out.push('\t');
                out.push_str(&p.to_string());
                out.push('\n');
            }
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<(), FormatError> {
        write_string(path.as_ref(), &self.render())
    }
}

pub fn read_predictions(path: impl AsRef<Path>) -> Result<PredictionFile, FormatError> {
    parse_predictions(&read_to_string(path.as_ref())?)
}

pub fn parse_predictions(content: &str) -> Result<PredictionFile, FormatError> {
    let mut sentences = Vec::new();
    let mut current = PredictedSentence::default();
    for (line_no, line) in lines(content) {
        if line.is_empty() {
            if !current.is_empty() {
                sentences.push(std::mem::take(&mut current));
            }
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 || fields[0].is_empty() {
            return Err(FormatError::parse(line_no, "expected `token<TAB>probability`"));
        }
        let p = parse_probability(fields[1]).map_err(|m| FormatError::parse(line_no, m))?;
        current.tokens.push(fields[0].to_owned());
        current.probabilities.push(p);
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    Ok(PredictionFile { sentences })
}

fn parse_probability(field: &str) -> Result<f64, String> {
    if let Ok(label) = field.parse::<Label>() {
        return Ok(if label.is_incorrect() { 1.0 } else { 0.0 });
    }
    let p: f64 = field
        .trim()
        .parse()
        .map_err(|_| format!("{field:?} is not a probability"))?;
    if !(0.0..=1.0).contains(&p) {
        return Err(format!("probability {p} outside [0, 1]"));
    }
    Ok(p)
}
