//! Training-data augmentation: proper-name substitution and simulated damage.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::corpus::{Lexicon, LexiconEntry};
use crate::tokenizer::{Token, TokenSequence};
use crate::{Error, Execution, Result};

/// An Etruscan/English training pair.
pub type Pair = (TokenSequence, TokenSequence);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AugmentConfig {
    /// Name-substituted copies produced per input pair.
    #[serde(rename = "name_augmentation_max_replacements")]
    pub max_name_replacements: usize,
    /// Probability that a word start (and, independently, a word end) is damaged.
    #[serde(rename = "unk_augmentation_prob")]
    pub damage_prob: f64,
    /// Success probability of the geometric damage length.
    #[serde(rename = "unk_augmentation_len")]
    pub damage_geom_p: f64,
    /// Damaged copies produced per input pair.
    #[serde(rename = "unk_augmentation_iterations")]
    pub damage_iterations: usize,
    pub seed: u64,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        AugmentConfig {
            max_name_replacements: 1,
            damage_prob: 0.1,
            damage_geom_p: 0.5,
            damage_iterations: 1,
            seed: 0,
        }
    }
}

impl AugmentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.damage_prob) {
            return Err(Error::invalid(format!("damage_prob must be in [0, 1], got {}", self.damage_prob)));
        }
        if !(self.damage_geom_p > 0.0 && self.damage_geom_p <= 1.0) {
            return Err(Error::invalid(format!(
                "damage_geom_p must be in (0, 1], got {}",
                self.damage_geom_p
            )));
        }
        Ok(())
    }
}

fn find_span(haystack: &[&str], needle: &[&str]) -> Option<usize> {
    if needle.is_empty() || needle.len() > haystack.len() {
        return None;
    }
    haystack.windows(needle.len()).position(|w| w == needle)
}

fn gloss_tokens(entry: &LexiconEntry) -> Vec<&str> {
    entry.english.split_whitespace().collect()
}

/// Replace proper nouns with feature-identical ones on both sides of the pair.
///
/// Each output pair carries exactly one substitution; at most
/// `cfg.max_name_replacements` pairs are returned.
pub fn augment_names<R: Rng + ?Sized>(pair: &Pair, lexicon: &Lexicon, cfg: &AugmentConfig, rng: &mut R) -> Vec<Pair> {
    let (ett, eng) = pair;
    let mut out = Vec::new();
    if cfg.max_name_replacements == 0 {
        return out;
    }
    let eng_words: Vec<&str> = eng.iter_str().collect();
    let nouns: Vec<&LexiconEntry> = lexicon
        .translatable()
        .filter(|e| e.features.is_proper_noun() && !e.etruscan.contains(' '))
        .collect();

    for (pos, token) in ett.tokens().iter().enumerate() {
        if out.len() >= cfg.max_name_replacements {
            break;
        }
        if token.is_suffix() {
            continue;
        }
        let Some(entry) = nouns.iter().find(|e| e.etruscan == token.as_str()) else {
            continue;
        };
        let gloss = gloss_tokens(entry);
        let Some(span) = find_span(&eng_words, &gloss) else {
            continue;
        };
        let partners: Vec<&&LexiconEntry> = nouns
            .iter()
            .filter(|e| e.features == entry.features && e.etruscan != entry.etruscan)
            .collect();
        let Some(partner) = partners.choose(rng) else {
            continue;
        };

        let mut new_ett = ett.clone();
        new_ett.tokens_mut()[pos] = Token::word(partner.etruscan.clone());
        let mut new_eng: Vec<&str> = eng_words[..span].to_vec();
        new_eng.extend(gloss_tokens(partner));
        new_eng.extend(&eng_words[span + gloss.len()..]);
        out.push((new_ett, TokenSequence::from_words(&new_eng)));
    }
    out
}

/// Overwrite `start` leading and `end` trailing characters with `-`. The two
/// runs together are capped at the word length.
pub fn damage_word(word: &str, start: usize, end: usize) -> String {
    let mut chars: Vec<char> = word.chars().collect();
    let len = chars.len();
    let start = start.min(len);
    let end = end.min(len - start);
    for c in chars.iter_mut().take(start) {
        *c = '-';
    }
    for c in chars.iter_mut().skip(len - end) {
        *c = '-';
    }
    chars.into_iter().collect()
}

/// Simulate damage at word boundaries on the Etruscan side. The English side
/// is left as is.
pub fn augment_damage<R: Rng + ?Sized>(pair: &Pair, cfg: &AugmentConfig, rng: &mut R) -> Result<Pair> {
    cfg.validate()?;
    let geometric = Geometric::new(cfg.damage_geom_p).map_err(|e| Error::invalid(e.to_string()))?;
    let draw = |rng: &mut R| -> usize {
        if cfg.damage_prob > 0.0 && rng.random_bool(cfg.damage_prob) {
            // support starts at one damaged character
            geometric.sample(rng) as usize + 1
        } else {
            0
        }
    };
    let tokens = pair
        .0
        .tokens()
        .iter()
        .map(|t| {
            if t.is_suffix() {
                return t.clone();
            }
            let start = draw(rng);
            let end = draw(rng);
            Token::word(damage_word(t.as_str(), start, end))
        })
        .collect();
    Ok((tokens, pair.1.clone()))
}

/// Independent RNG for item `index` of a batch seeded by `seed`.
pub fn item_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// The original pairs followed by every name-substituted and damaged copy.
///
/// Each input pair draws from its own RNG stream, so the result is the same
/// under sequential and parallel execution.
pub fn augment_corpus(pairs: &[Pair], lexicon: &Lexicon, cfg: &AugmentConfig, exec: Execution) -> Result<Vec<Pair>> {
    cfg.validate()?;
    let extra = exec.map_range(pairs.len(), |i| -> Result<Vec<Pair>> {
        let mut rng = item_rng(cfg.seed, i as u64);
        let mut out = augment_names(&pairs[i], lexicon, cfg, &mut rng);
        for _ in 0..cfg.damage_iterations {
            out.push(augment_damage(&pairs[i], cfg, &mut rng)?);
        }
        Ok(out)
    });
    let mut all = pairs.to_vec();
    for batch in extra {
        all.extend(batch?);
    }
    Ok(all)
}
