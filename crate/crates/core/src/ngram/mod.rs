//! Position-aligned context models: direct n-gram estimates, the Naïve Bayes
//! variant, and the beam-search decoder they share.
//!
//! Both sequences are aligned token by token. The English token at position
//! `i` is predicted from the `n` Etruscan tokens ending at `i` and, in
//! [`ContextMode::EttEng`], from the `n` English tokens before `i`. Missing
//! context slots are filled with [`PAD`]; an [`EOS`] follows the last English
//! token.

mod beam;
mod counts;
mod naive_bayes;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::tokenizer::TokenSequence;
use crate::{EOS, PAD};

pub use beam::beam_translate;
pub use counts::NgramModel;
pub use naive_bayes::{NaiveBayesModel, UNK};

/// Default number of beams.
pub const DEFAULT_BEAMS: usize = 8;
/// Default additive smoothing constant.
pub const DEFAULT_ALPHA: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ContextMode {
    /// Etruscan tokens only.
    #[serde(rename = "ett")]
    EttOnly,
    /// Etruscan tokens and the previously generated English tokens.
    #[serde(rename = "ett-eng")]
    EttEng,
}

/// The conditioning context of one English token.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Context {
    pub ett: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub eng: Vec<String>,
}

impl Context {
    pub fn new<S: AsRef<str>>(ett: &[S], eng: &[S]) -> Self {
        Context {
            ett: ett.iter().map(|s| s.as_ref().to_string()).collect(),
            eng: eng.iter().map(|s| s.as_ref().to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignedPosition {
    pub context: Context,
    pub target: String,
}

/// The `n` Etruscan slots ending at position `i`.
pub(crate) fn ett_window<'a>(source: &[&'a str], i: usize, n: usize) -> Vec<&'a str> {
    (0..n)
        .map(|k| {
            let idx = (i + k) as isize - (n as isize - 1);
            if idx >= 0 && (idx as usize) < source.len() {
                source[idx as usize]
            } else {
                PAD
            }
        })
        .collect()
}

/// The `n` English slots before position `i`.
pub(crate) fn eng_window<'a>(history: &[&'a str], i: usize, n: usize) -> Vec<&'a str> {
    (0..n)
        .map(|k| {
            let idx = i as isize - n as isize + k as isize;
            if idx >= 0 {
                history[idx as usize]
            } else {
                PAD
            }
        })
        .collect()
}

/// Training positions of one pair.
///
/// The English side gets an `EOS`; the shorter side is padded with `PAD` up
/// to the length of the longer so every position has a target.
pub fn align_pair(ett: &TokenSequence, eng: &TokenSequence, n: usize, mode: ContextMode) -> Vec<AlignedPosition> {
    let source: Vec<&str> = ett.iter_str().collect();
    let mut targets: Vec<&str> = eng.iter_str().collect();
    targets.push(EOS);
    let len = source.len().max(targets.len());
    targets.resize(len, PAD);

    (0..len)
        .map(|i| {
            let ett_ctx = ett_window(&source, i, n);
            let eng_ctx = match mode {
                ContextMode::EttOnly => Vec::new(),
                ContextMode::EttEng => eng_window(&targets, i, n),
            };
            AlignedPosition {
                context: Context::new(&ett_ctx, &eng_ctx),
                target: targets[i].to_string(),
            }
        })
        .collect()
}

/// Sorted English vocabulary, always containing `PAD` and `EOS`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocab {
    tokens: Vec<String>,
    index: HashMap<String, u32>,
}

impl Vocab {
    pub fn new<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        tokens.sort();
        tokens.dedup();
        let index = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        Vocab { tokens, index }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: u32) -> &str {
        &self.tokens[id as usize]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }
}

/// A model giving a distribution over its English vocabulary for a context.
pub trait ContextModel {
    fn order(&self) -> usize;
    fn mode(&self) -> ContextMode;
    fn vocab(&self) -> &Vocab;
    /// Log-probabilities indexed like [`ContextModel::vocab`].
    fn log_probs(&self, ett: &[&str], eng: &[&str]) -> Vec<f64>;

    /// The distribution as a token map; sums to one.
    fn distribution(&self, context: &Context) -> HashMap<String, f64> {
        let ett: Vec<&str> = context.ett.iter().map(String::as_str).collect();
        let eng: Vec<&str> = context.eng.iter().map(String::as_str).collect();
        self.log_probs(&ett, &eng)
            .into_iter()
            .enumerate()
            .map(|(i, lp)| (self.vocab().token(i as u32).to_string(), lp.exp()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenizer::tokenize_whitespace;

    #[test]
    fn trigram_alignment_pads_the_left() {
        let pos = align_pair(&tokenize_whitespace("e1 e2"), &tokenize_whitespace("g1 g2"), 3, ContextMode::EttOnly);
        assert_eq!(pos[0].context.ett, [PAD, PAD, "e1"]);
        assert_eq!(pos[0].target, "g1");
        assert_eq!(pos[1].context.ett, [PAD, "e1", "e2"]);
        assert_eq!(pos[1].target, "g2");
        assert_eq!(pos[2].target, EOS);
        assert_eq!(pos.len(), 3);
    }

    #[test]
    fn unigram_has_no_left_padding() {
        let pos = align_pair(&tokenize_whitespace("a b"), &tokenize_whitespace("x y"), 1, ContextMode::EttOnly);
        assert_eq!(pos[0].context.ett, ["a"]);
        assert_eq!(pos[1].context.ett, ["b"]);
        assert_eq!(pos[2].context.ett, [PAD]);
    }

    #[test]
    fn short_english_gets_pad_targets() {
        let pos = align_pair(&tokenize_whitespace("a b c d"), &tokenize_whitespace("x"), 1, ContextMode::EttOnly);
        let targets: Vec<_> = pos.iter().map(|p| p.target.as_str()).collect();
        assert_eq!(targets, ["x", EOS, PAD, PAD]);
    }

    #[test]
    fn bigram_english_context() {
        let pos = align_pair(&tokenize_whitespace("t1 t2"), &tokenize_whitespace("g1 g2"), 2, ContextMode::EttEng);
        assert_eq!(pos[0].context, Context::new(&[PAD, "t1"], &[PAD, PAD]));
        assert_eq!(pos[1].context, Context::new(&["t1", "t2"], &[PAD, "g1"]));
        assert_eq!(pos[2].context, Context::new(&["t2", PAD], &["g1", "g2"]));
    }
}
