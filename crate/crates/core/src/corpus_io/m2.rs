//! M² annotation files (`S` source lines followed by `A` edit lines).
//!
//! Edits of type `noop` carry no span; the reader drops them but remembers
//! which annotators declared one, so that an annotator with no corrections
//! still counts as present. The writer emits ERRANT's canonical layout:
//! annotators in ascending order, each annotator's edits sorted by span, and
//! noop lines as `A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||<id>`.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{lines, read_to_string, write_string, FormatError, Label, LabeledSentence};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct M2Edit {
    pub start: usize,
    pub end: usize,
    pub error_type: String,
    /// Parsed but unused by labeling.
    pub correction: String,
    pub required: String,
    pub comment: String,
    pub annotator: u32,
}

impl M2Edit {
    pub fn new(start: usize, end: usize, error_type: &str, correction: &str, annotator: u32) -> Self {
        M2Edit {
            start,
            end,
            error_type: error_type.to_owned(),
            correction: correction.to_owned(),
            required: "REQUIRED".to_owned(),
            comment: "-NONE-".to_owned(),
            annotator,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct M2Record {
    pub source_tokens: Vec<String>,
    /// Sorted by `(start, end)`; ties keep file order.
    pub edits: Vec<M2Edit>,
    /// Annotators that contributed a `noop` line for this sentence.
    pub noop_annotators: Vec<u32>,
}

impl M2Record {
    /// Every annotator that touched this sentence, ascending.
    pub fn annotators(&self) -> Vec<u32> {
        self.edits
            .iter()
            .map(|e| e.annotator)
            .chain(self.noop_annotators.iter().copied())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }
}

pub fn read_m2(path: impl AsRef<Path>) -> Result<Vec<M2Record>, FormatError> {
    parse_m2(&read_to_string(path.as_ref())?)
}

pub fn parse_m2(content: &str) -> Result<Vec<M2Record>, FormatError> {
    let mut records: Vec<M2Record> = Vec::new();
    for (line_no, line) in lines(content) {
        if line.trim().is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('S') {
            if !(rest.is_empty() || rest.starts_with(' ')) {
                return Err(FormatError::parse(line_no, "expected `S <tokens>`"));
            }
            records.push(M2Record {
                source_tokens: rest.split_whitespace().map(str::to_owned).collect(),
                ..Default::default()
            });
        } else if let Some(rest) = line.strip_prefix("A ") {
            let record = records
                .last_mut()
                .ok_or_else(|| FormatError::parse(line_no, "A-line before any S-line"))?;
            parse_edit_line(rest, line_no, record)?;
        } else {
            return Err(FormatError::parse(line_no, "line must start with `S` or `A`"));
        }
    }
    for record in &mut records {
        record.edits.sort_by_key(|e| (e.start, e.end));
    }
    Ok(records)
}

fn parse_edit_line(rest: &str, line_no: usize, record: &mut M2Record) -> Result<(), FormatError> {
    let fields: Vec<&str> = rest.split("|||").collect();
    if fields.len() != 6 {
        return Err(FormatError::parse(
            line_no,
            format!("expected 6 `|||`-separated fields, found {}", fields.len()),
        ));
    }
    let annotator: u32 = fields[5]
        .trim()
        .parse()
        .map_err(|_| FormatError::parse(line_no, format!("bad annotator id {:?}", fields[5])))?;
    let mut offsets = fields[0].split_whitespace();
    let (Some(start), Some(end), None) = (offsets.next(), offsets.next(), offsets.next()) else {
        return Err(FormatError::parse(line_no, "expected `A <start> <end>`"));
    };
    if fields[1] == "noop" {
        if !record.noop_annotators.contains(&annotator) {
            record.noop_annotators.push(annotator);
        }
        return Ok(());
    }
    let parse_offset = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| FormatError::parse(line_no, format!("offset {s:?} is not a non-negative integer")))
    };
    let (start, end) = (parse_offset(start)?, parse_offset(end)?);
    if start > end {
        return Err(FormatError::parse(line_no, format!("start {start} > end {end}")));
    }
    if end > record.source_tokens.len() {
        return Err(FormatError::parse(
            line_no,
            format!("end {end} exceeds token count {}", record.source_tokens.len()),
        ));
    }
    record.edits.push(M2Edit {
        start,
        end,
        error_type: fields[1].to_owned(),
        correction: fields[2].to_owned(),
        required: fields[3].to_owned(),
        comment: fields[4].to_owned(),
        annotator,
    });
    Ok(())
}

pub fn render_m2(records: &[M2Record]) -> String {
    let mut out = String::new();
    for record in records {
        out.push('S');
        for token in &record.source_tokens {
            out.push(' ');
            out.push_str(token);
        }
        out.push('\n');
        for annotator in record.annotators() {
            if record.noop_annotators.contains(&annotator) {
                let _ = writeln!(out, "A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||{annotator}");
            }
            for e in record.edits.iter().filter(|e| e.annotator == annotator) {
                let _ = writeln!(
                    out,
                    "A {} {}|||{}|||{}|||{}|||{}|||{}",
                    e.start, e.end, e.error_type, e.correction, e.required, e.comment, e.annotator
                );
            }
        }
        out.push('\n');
    }
    out
}

pub fn write_m2(records: &[M2Record], path: impl AsRef<Path>) -> Result<(), FormatError> {
    write_string(path.as_ref(), &render_m2(records))
}

/// Projects one annotator's edits onto token labels.
///
/// Tokens inside `[start, end)` become `i`. An insertion (`start == end`)
/// marks the token at `start`, or the last token when it sits at the end of
/// the sentence.
pub fn m2_to_labels(record: &M2Record, annotator: u32) -> Result<LabeledSentence, FormatError> {
    let available = record.annotators();
    if !available.is_empty() && !available.contains(&annotator) {
        return Err(FormatError::AnnotatorMissing {
            requested: annotator,
            available,
        });
    }
    let n = record.source_tokens.len();
    let mut labels = vec![Label::Correct; n];
    for edit in record.edits.iter().filter(|e| e.annotator == annotator) {
        if edit.start < edit.end {
            labels[edit.start..edit.end].fill(Label::Incorrect);
        } else if edit.start < n {
            labels[edit.start] = Label::Incorrect;
        } else if n > 0 {
            labels[n - 1] = Label::Incorrect;
        }
    }
    LabeledSentence::new(record.source_tokens.clone(), labels)
}
