//! Built-in tokenizers. Language-specific external tokenizers are used by
//! feeding their space-separated output through the pre-tokenized scheme.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use unicode_segmentation::UnicodeSegmentation;

use crate::corpus_io::TokenSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TokenizerKind {
    /// Split on runs of Unicode whitespace.
    #[default]
    Whitespace,
    /// Unicode word boundaries (UAX #29); punctuation marks become standalone tokens.
    UnicodeWords,
    /// One token per non-whitespace character.
    PerCharacter,
    /// Text already tokenized by an external tool, tokens separated by spaces.
    Pretokenized,
}

impl TokenizerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TokenizerKind::Whitespace => "whitespace",
            TokenizerKind::UnicodeWords => "unicode-words",
            TokenizerKind::PerCharacter => "per-character",
            TokenizerKind::Pretokenized => "pretokenized",
        }
    }
}

impl fmt::Display for TokenizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TokenizerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "whitespace" => Ok(TokenizerKind::Whitespace),
            "unicode-words" => Ok(TokenizerKind::UnicodeWords),
            "per-character" => Ok(TokenizerKind::PerCharacter),
            "pretokenized" => Ok(TokenizerKind::Pretokenized),
            other => Err(format!(
                "unknown tokenizer {other:?} (expected whitespace, unicode-words, per-character or pretokenized)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TokenizerScheme {
    pub kind: TokenizerKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language: Option<String>,
}

impl TokenizerScheme {
    pub fn new(kind: TokenizerKind) -> Self {
        TokenizerScheme { kind, language: None }
    }

    pub fn with_language(mut self, language: impl Into<String>) -> Self {
        self.language = Some(language.into());
        self
    }

    pub fn tokenize(&self, text: &str) -> TokenSequence {
        let tokens = match self.kind {
            TokenizerKind::Whitespace | TokenizerKind::Pretokenized => {
                text.split_whitespace().map(str::to_owned).collect()
            }
            TokenizerKind::UnicodeWords => text
                .split_word_bounds()
                .flat_map(str::split_whitespace)
                .map(str::to_owned)
                .collect(),
            TokenizerKind::PerCharacter => text
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(String::from)
                .collect(),
        };
        TokenSequence {
            tokens,
            source_text: Some(text.to_owned()),
            language: self.language.clone(),
        }
    }
}

pub fn tokenize(text: &str, scheme: &TokenizerScheme) -> TokenSequence {
    scheme.tokenize(text)
}

/// True for a non-empty token made only of punctuation or symbol characters.
pub fn is_punctuation_token(token: &str) -> bool {
    !token.is_empty() && token.chars().all(|c| !c.is_alphanumeric() && !c.is_whitespace())
}

const ATTACH_LEFT: &[char] = &['.', ',', '!', '?', ';', ':', ')', ']', '}', '»'];
const ATTACH_RIGHT: &[char] = &['(', '[', '{', '«'];

fn all_in(token: &str, set: &[char]) -> bool {
    !token.is_empty() && token.chars().all(|c| set.contains(&c))
}

/// Joins tokens with single spaces, attaching closing punctuation to the
/// previous token and opening brackets to the next one.
pub fn detokenize(tokens: &TokenSequence) -> String {
    detokenize_tokens(&tokens.tokens)
}

pub fn detokenize_tokens<S: AsRef<str>>(tokens: &[S]) -> String {
    let mut out = String::new();
    let mut glue_next = true;
    for token in tokens.iter().map(AsRef::as_ref) {
        if !glue_next && !all_in(token, ATTACH_LEFT) {
            out.push(' ');
        }
        out.push_str(token);
        glue_next = all_in(token, ATTACH_RIGHT);
    }
    out
}
