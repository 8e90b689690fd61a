//! The two context-free models: a random generator and a word dictionary.

use std::collections::BTreeMap;

use log::warn;
use rand::Rng;
use rand_distr::{Distribution, Normal, weighted::WeightedIndex};
use serde::{Deserialize, Serialize};

use crate::corpus::Lexicon;
use crate::tokenizer::TokenSequence;
use crate::{Error, Result};

/// Ignores the source and samples English tokens from the training
/// distribution, with a normally distributed length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomModel {
    pub length_mean: f64,
    pub length_std: f64,
    pub unigrams: BTreeMap<String, f64>,
}

impl RandomModel {
    pub fn train(english: &[TokenSequence]) -> Result<Self> {
        if english.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "random model needs at least 2 training sequences, got {}",
                english.len()
            )));
        }
        let n = english.len() as f64;
        let lengths: Vec<f64> = english.iter().map(|s| s.len() as f64).collect();
        let mean = lengths.iter().sum::<f64>() / n;
        let var = lengths.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / (n - 1.0);

        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for token in english.iter().flat_map(|s| s.iter_str()) {
            *counts.entry(token.to_string()).or_default() += 1;
        }
        let total: usize = counts.values().sum();
        if total == 0 {
            return Err(Error::InsufficientData("training translations contain no tokens".into()));
        }
        let unigrams = counts
            .into_iter()
            .map(|(t, c)| (t, c as f64 / total as f64))
            .collect();
        Ok(RandomModel {
            length_mean: mean,
            length_std: var.sqrt(),
            unigrams,
        })
    }

    /// Draw a translation. The source only matters through the RNG state.
    pub fn translate<R: Rng + ?Sized>(&self, _source: &TokenSequence, rng: &mut R) -> TokenSequence {
        let normal = Normal::new(self.length_mean, self.length_std).expect("finite length statistics");
        let len = normal.sample(rng).round().max(0.0) as usize;
        let (tokens, weights): (Vec<&String>, Vec<f64>) = self.unigrams.iter().unzip();
        let Ok(index) = WeightedIndex::new(&weights) else {
            return TokenSequence::new();
        };
        let words: Vec<&str> = (0..len).map(|_| tokens[index.sample(rng)].as_str()).collect();
        TokenSequence::from_words(&words)
    }
}

/// Word-for-word lookup in the lexicon, in source order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DictModel {
    pub table: BTreeMap<String, Vec<String>>,
}

impl DictModel {
    /// One entry per translatable vocable; the first gloss of a repeated
    /// form wins.
    pub fn from_lexicon(lexicon: &Lexicon) -> Self {
        let mut table = BTreeMap::new();
        for entry in lexicon.translatable() {
            if table.contains_key(&entry.etruscan) {
                warn!("duplicate lexicon entry {:?}, keeping the first gloss", entry.etruscan);
                continue;
            }
            let gloss = entry.english.split_whitespace().map(str::to_string).collect();
            table.insert(entry.etruscan.clone(), gloss);
        }
        DictModel { table }
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Unknown tokens, suffix tokens included, produce nothing.
    pub fn translate(&self, source: &TokenSequence) -> TokenSequence {
        let words: Vec<&str> = source
            .iter_str()
            .filter_map(|t| self.table.get(t))
            .flatten()
            .map(String::as_str)
            .collect();
        TokenSequence::from_words(&words)
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;
    use crate::augment::item_rng;
    use crate::corpus::{FeatureVector, LexiconEntry};
    use crate::tokenizer::{tokenize_suffix, tokenize_whitespace};

    fn seqs(lines: &[&str]) -> Vec<TokenSequence> {
        lines.iter().map(|l| tokenize_whitespace(l)).collect()
    }

    #[test]
    fn length_statistics_use_sample_std() {
        let m = RandomModel::train(&seqs(&["a b", "a b c d"])).unwrap();
        assert_abs_diff_eq!(m.length_mean, 3.0);
        assert_abs_diff_eq!(m.length_std, 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(m.unigrams.values().sum::<f64>(), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(m.unigrams["a"], 2.0 / 6.0, epsilon = 1e-12);
    }

    #[test]
    fn identical_lengths_give_zero_std() {
        let m = RandomModel::train(&seqs(&["a b c", "x y z", "p q r"])).unwrap();
        assert_eq!(m.length_std, 0.0);
        let mut rng = item_rng(5, 0);
        for _ in 0..20 {
            assert_eq!(m.translate(&TokenSequence::new(), &mut rng).len(), 3);
        }
    }

    #[test]
    fn single_sequence_is_rejected() {
        assert!(matches!(RandomModel::train(&seqs(&["a b"])), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn random_output_is_seeded_and_uses_vocab() {
        let m = RandomModel::train(&seqs(&["x x", "x x x"])).unwrap();
        let src = tokenize_whitespace("eca shuthic");
        let a = m.translate(&src, &mut item_rng(1, 2));
        let b = m.translate(&src, &mut item_rng(1, 2));
        assert_eq!(a, b);
        assert!(a.iter_str().all(|t| t == "x"));
    }

    #[test]
    fn negative_lengths_clamp_to_empty() {
        let m = RandomModel {
            length_mean: -50.0,
            length_std: 1.0,
            unigrams: [("x".to_string(), 1.0)].into_iter().collect(),
        };
        assert!(m.translate(&TokenSequence::new(), &mut item_rng(0, 0)).is_empty());
    }

    fn entry(etr: &str, eng: &str) -> LexiconEntry {
        LexiconEntry::new(etr, eng, FeatureVector::default()).unwrap()
    }

    fn sample_lexicon() -> Lexicon {
        Lexicon::new(vec![
            entry("itun", "this"),
            entry("turuce", "dedicated"),
            entry("venel", "venel"),
            entry("atelinas", "atelina"),
            entry("tinas", "tinia"),
        ])
    }

    #[test]
    fn dictionary_translation() {
        let m = DictModel::from_lexicon(&sample_lexicon());
        let out = m.translate(&tokenize_whitespace("itun turuce venel atelinas tinas dlniiaras"));
        assert_eq!(out.joined(), "this dedicated venel atelina tinia");
        assert!(m.translate(&tokenize_whitespace("xx yy")).is_empty());
    }

    #[test]
    fn duplicates_and_untranslatable_entries() {
        let lex = Lexicon::new(vec![entry("itun", "this"), entry("turuce", "dedicated"), entry("itun", "that"), entry("ca", "")]);
        let m = DictModel::from_lexicon(&lex);
        assert_eq!(m.len(), 2);
        assert_eq!(m.table["itun"], ["this"]);
        assert!(!m.table.contains_key("ca"));
    }

    #[test]
    fn suffix_glosses_and_multiword_expansion() {
        let lex = Lexicon::new(vec![
            entry("it", "this"),
            entry("-un", "for him"),
            entry("turu", "dedicated"),
            entry("-ce", "three"),
            entry("ve", "this"),
            entry("-nel", "venel laris"),
            entry("atelin", "atelina"),
            entry("dlniiar", "shows"),
        ])
        .with_suffixes(&["un", "ce", "nel", "as"]);
        let m = DictModel::from_lexicon(&lex);
        let src = tokenize_suffix("itun turuce venel atelinas tinas dlniiaras", lex.suffixes());
        assert_eq!(m.translate(&src).joined(), "this for him dedicated three this venel laris atelina shows");
    }
}
