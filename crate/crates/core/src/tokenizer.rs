//! Whitespace and root+suffix tokenization.
//!
//! Suffix tokens are written with a leading `-` (`velus` becomes `vel -us`)
//! and carry a flag; [`detokenize`] glues flagged tokens back onto their root.
//! Damaged words that start with `-` stay plain words.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Shortest root left behind by suffix stripping.
pub const MIN_ROOT_LEN: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Token {
    text: String,
    suffix: bool,
}

impl Token {
    pub fn word(text: impl Into<String>) -> Self {
        Token {
            text: text.into(),
            suffix: false,
        }
    }

    /// A suffix token; `suffix` is given without its `-` marker.
    pub fn suffix(suffix: &str) -> Self {
        Token {
            text: format!("-{suffix}"),
            suffix: true,
        }
    }

    /// The string models see: the word, or `-` followed by the suffix.
    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn is_suffix(&self) -> bool {
        self.suffix
    }
}

/// An ordered list of non-empty, space-free tokens.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TokenSequence {
    tokens: Vec<Token>,
}

impl TokenSequence {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parse already split strings; a string of the form `-xyz` is read as a
    /// suffix token.
    pub fn from_strs<S: AsRef<str>>(tokens: &[S]) -> Self {
        tokens
            .iter()
            .map(|t| t.as_ref())
            .filter(|t| !t.is_empty())
            .map(|t| match t.strip_prefix('-') {
                Some(rest) if !rest.is_empty() && rest.chars().all(|c| c != '-') => Token::suffix(rest),
                _ => Token::word(t),
            })
            .collect()
    }

    /// Word tokens only, no suffix interpretation.
    pub fn from_words<S: AsRef<str>>(words: &[S]) -> Self {
        words
            .iter()
            .map(|w| w.as_ref())
            .filter(|w| !w.is_empty())
            .map(Token::word)
            .collect()
    }

    pub fn push(&mut self, token: Token) {
        debug_assert!(!token.text.is_empty() && !token.text.contains(' '));
        self.tokens.push(token);
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn tokens_mut(&mut self) -> &mut [Token] {
        &mut self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn iter_str(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(Token::as_str)
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.iter_str().map(str::to_string).collect()
    }

    /// Tokens joined by single spaces, suffix markers kept.
    pub fn joined(&self) -> String {
        self.to_strings().join(" ")
    }
}

impl FromIterator<Token> for TokenSequence {
    fn from_iter<I: IntoIterator<Item = Token>>(iter: I) -> Self {
        TokenSequence {
            tokens: iter.into_iter().filter(|t| !t.text.is_empty()).collect(),
        }
    }
}

impl fmt::Display for TokenSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.joined())
    }
}

/// Which tokenizer to apply to Etruscan text.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum Tokenizer {
    #[default]
    Whitespace,
    Suffix { suffixes: Vec<String> },
}

impl Tokenizer {
    pub fn tokenize(&self, text: &str) -> TokenSequence {
        match self {
            Tokenizer::Whitespace => tokenize_whitespace(text),
            Tokenizer::Suffix { suffixes } => tokenize_suffix(text, suffixes),
        }
    }
}

pub fn tokenize_whitespace(text: &str) -> TokenSequence {
    text.split_whitespace().map(Token::word).collect()
}

/// Split off the longest listed suffix from each word, keeping a root of at
/// least [`MIN_ROOT_LEN`] characters. Stripping is applied once per word.
pub fn tokenize_suffix<S: AsRef<str>>(text: &str, suffixes: &[S]) -> TokenSequence {
    let mut out = TokenSequence::new();
    for word in text.split_whitespace() {
        let word_len = word.chars().count();
        let best = suffixes
            .iter()
            .map(|s| s.as_ref())
            .filter(|s| !s.is_empty() && word.ends_with(s))
            .filter(|s| word_len - s.chars().count() >= MIN_ROOT_LEN)
            .max_by(|a, b| a.len().cmp(&b.len()).then_with(|| b.cmp(a)));
        match best {
            Some(suffix) => {
                out.push(Token::word(&word[..word.len() - suffix.len()]));
                out.push(Token::suffix(suffix));
            }
            None => out.push(Token::word(word)),
        }
    }
    out
}

/// Join tokens with spaces, attaching suffix tokens to the token before them.
pub fn detokenize(tokens: &TokenSequence) -> Result<String> {
    let mut out = String::new();
    for (i, token) in tokens.tokens().iter().enumerate() {
        if token.is_suffix() {
            if i == 0 {
                return Err(Error::DanglingSuffix(token.as_str().to_string()));
            }
            out.push_str(&token.as_str()[1..]);
        } else {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(token.as_str());
        }
    }
    Ok(out)
}
