use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{align_pair, ContextMode, ContextModel, Vocab};
use crate::augment::Pair;
use crate::{Error, Result, EOS, PAD};

/// Placeholder for context tokens never seen in training.
pub const UNK: &str = "<unk>";

#[derive(Debug, Clone, Default, PartialEq)]
struct Slot {
    /// feature id -> (english id, count), sorted by english id
    counts: HashMap<u32, Vec<(u32, u64)>>,
}

/// `P(eng_i) * prod_j P(ctx_j | eng_i)`, normalized over the English
/// vocabulary. Each context slot has its own smoothed conditional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NbRepr", into = "NbRepr")]
pub struct NaiveBayesModel {
    n: usize,
    mode: ContextMode,
    alpha: f64,
    vocab: Vocab,
    ett_features: Vocab,
    eng_features: Vocab,
    prior_counts: Vec<u64>,
    total: u64,
    slots: Vec<Slot>,
    log_prior: Vec<f64>,
    log_denoms: Vec<Vec<f64>>,
}

impl NaiveBayesModel {
    pub fn train(pairs: &[Pair], n: usize, mode: ContextMode, alpha: f64) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InsufficientData("Naive Bayes training needs at least one pair".into()));
        }
        let positions: Vec<_> = pairs.iter().flat_map(|(ett, eng)| align_pair(ett, eng, n, mode)).collect();
        let mut english = vec![EOS.to_string(), PAD.to_string()];
        let mut etruscan = vec![PAD.to_string(), UNK.to_string()];
        for p in &positions {
            english.push(p.target.clone());
            etruscan.extend(p.context.ett.iter().cloned());
        }
        let num_slots = n * if mode == ContextMode::EttEng { 2 } else { 1 };
        let mut prior = BTreeMap::new();
        let mut slots = vec![BTreeMap::<String, BTreeMap<String, u64>>::new(); num_slots];
        for p in positions {
            for (j, f) in p.context.ett.iter().chain(&p.context.eng).enumerate() {
                *slots[j].entry(f.clone()).or_default().entry(p.target.clone()).or_default() += 1;
            }
            *prior.entry(p.target).or_default() += 1;
        }
        Self::build(n, mode, alpha, english, etruscan, prior, slots)
    }

    fn build(
        n: usize,
        mode: ContextMode,
        alpha: f64,
        english: Vec<String>,
        etruscan: Vec<String>,
        prior: BTreeMap<String, u64>,
        slot_counts: Vec<BTreeMap<String, BTreeMap<String, u64>>>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("context size n must be at least 1"));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::invalid(format!("alpha must be positive, got {alpha}")));
        }
        let num_slots = n * if mode == ContextMode::EttEng { 2 } else { 1 };
        if slot_counts.len() != num_slots {
            return Err(Error::invalid(format!("expected {num_slots} context slots, got {}", slot_counts.len())));
        }
        let vocab = Vocab::new(english);
        let ett_features = Vocab::new(etruscan);
        let eng_features = Vocab::new(vocab.tokens().iter().cloned().chain([UNK.to_string()]));
        let english_id = |t: &str| vocab.id(t).ok_or_else(|| Error::invalid(format!("token {t:?} is not in the vocabulary")));

        let mut prior_counts = vec![0u64; vocab.len()];
        for (t, c) in prior {
            prior_counts[english_id(&t)? as usize] += c;
        }
        let total: u64 = prior_counts.iter().sum();

        let mut slots = Vec::with_capacity(num_slots);
        for (j, table) in slot_counts.into_iter().enumerate() {
            let features = if j < n { &ett_features } else { &eng_features };
            let mut slot = Slot::default();
            for (f, targets) in table {
                let fid = features.id(&f).ok_or_else(|| Error::invalid(format!("context token {f:?} is not in the slot vocabulary")))?;
                let mut row = Vec::with_capacity(targets.len());
                for (t, c) in targets {
                    if c > 0 {
                        row.push((english_id(&t)?, c));
                    }
                }
                row.sort_unstable();
                if !row.is_empty() {
                    slot.counts.insert(fid, row);
                }
            }
            slots.push(slot);
        }

        let v = vocab.len() as f64;
        let log_prior = prior_counts
            .iter()
            .map(|&c| ((c as f64 + alpha) / (total as f64 + alpha * v)).ln())
            .collect();
        let log_denoms = (0..num_slots)
            .map(|j| {
                let f = if j < n { ett_features.len() } else { eng_features.len() } as f64;
                prior_counts.iter().map(|&c| (c as f64 + alpha * f).ln()).collect()
            })
            .collect();
        Ok(NaiveBayesModel {
            n,
            mode,
            alpha,
            vocab,
            ett_features,
            eng_features,
            prior_counts,
            total,
            slots,
            log_prior,
            log_denoms,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn num_slots(&self) -> usize {
        self.slots.len()
    }

    /// Feature vocabulary of context slot `slot`. Etruscan slots come first.
    pub fn slot_vocab(&self, slot: usize) -> &Vocab {
        if slot < self.n {
            &self.ett_features
        } else {
            &self.eng_features
        }
    }

    fn feature_id(&self, slot: usize, token: &str) -> u32 {
        let features = self.slot_vocab(slot);
        features.id(token).unwrap_or_else(|| features.id(UNK).expect("UNK is always present"))
    }

    /// Smoothed prior `P(e)`.
    pub fn prior(&self, english: &str) -> f64 {
        match self.vocab.id(english) {
            Some(id) => self.log_prior[id as usize].exp(),
            None => 0.0,
        }
    }

    /// Smoothed conditional `P(token | e)` for context slot `slot`; unseen
    /// tokens are read as `UNK`.
    pub fn likelihood(&self, slot: usize, token: &str, english: &str) -> f64 {
        let Some(e) = self.vocab.id(english) else { return 0.0 };
        let fid = self.feature_id(slot, token);
        let count = self.slots[slot]
            .counts
            .get(&fid)
            .and_then(|row| row.iter().find(|(id, _)| *id == e))
            .map_or(0, |(_, c)| *c);
        let f = self.slot_vocab(slot).len() as f64;
        (count as f64 + self.alpha) / (self.prior_counts[e as usize] as f64 + self.alpha * f)
    }
}

impl ContextModel for NaiveBayesModel {
    fn order(&self) -> usize {
        self.n
    }

    fn mode(&self) -> ContextMode {
        self.mode
    }

    fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    fn log_probs(&self, ett: &[&str], eng: &[&str]) -> Vec<f64> {
        let ln_alpha = self.alpha.ln();
        let mut scores = self.log_prior.clone();
        for (j, token) in ett.iter().chain(eng).enumerate().take(self.slots.len()) {
            for (s, d) in scores.iter_mut().zip(&self.log_denoms[j]) {
                *s += ln_alpha - d;
            }
            if let Some(row) = self.slots[j].counts.get(&self.feature_id(j, token)) {
                for &(e, c) in row {
                    scores[e as usize] += (c as f64 + self.alpha).ln() - ln_alpha;
                }
            }
        }
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let log_z = max + scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln();
        scores.iter_mut().for_each(|s| *s -= log_z);
        scores
    }
}

type SlotTable = BTreeMap<String, BTreeMap<String, u64>>;

#[derive(Serialize, Deserialize)]
struct NbRepr {
    n: usize,
    context_mode: ContextMode,
    alpha: f64,
    english_vocab: Vec<String>,
    etruscan_vocab: Vec<String>,
    prior_counts: BTreeMap<String, u64>,
    slot_counts: Vec<SlotTable>,
}

impl From<NaiveBayesModel> for NbRepr {
    fn from(m: NaiveBayesModel) -> Self {
        let prior_counts = m
            .prior_counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (m.vocab.token(i as u32).to_string(), c))
            .collect();
        let slot_counts = m
            .slots
            .iter()
            .enumerate()
            .map(|(j, slot)| {
                let features = m.slot_vocab(j);
                slot.counts
                    .iter()
                    .map(|(&f, row)| {
                        let targets = row.iter().map(|&(e, c)| (m.vocab.token(e).to_string(), c)).collect();
                        (features.token(f).to_string(), targets)
                    })
                    .collect()
            })
            .collect();
        NbRepr {
            n: m.n,
            context_mode: m.mode,
            alpha: m.alpha,
            english_vocab: m.vocab.tokens().to_vec(),
            etruscan_vocab: m.ett_features.tokens().to_vec(),
            prior_counts,
            slot_counts,
        }
    }
}

impl TryFrom<NbRepr> for NaiveBayesModel {
    type Error = Error;

    fn try_from(r: NbRepr) -> Result<Self> {
        NaiveBayesModel::build(r.n, r.context_mode, r.alpha, r.english_vocab, r.etruscan_vocab, r.prior_counts, r.slot_counts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ngram::Context;
    use crate::tokenizer::tokenize_whitespace;
    use approx::assert_relative_eq;

    fn pair(a: &str, b: &str) -> Pair {
        (tokenize_whitespace(a), tokenize_whitespace(b))
    }

    fn posterior(m: &NaiveBayesModel, ett: &[&str]) -> HashMap<String, f64> {
        m.distribution(&Context::new(ett, &[]))
    }

    #[test]
    fn single_pair_argmax() {
        let m = NaiveBayesModel::train(&[pair("a", "x")], 1, ContextMode::EttOnly, 1.0).unwrap();
        let post = posterior(&m, &["a"]);
        let best = post.iter().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        assert_eq!(best, "x");
        assert_relative_eq!(post.values().sum::<f64>(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn hand_computed_toy_case() {
        // positions: (a)->x, (pad)->eos ; V = {eos, pad, x}; F = {a, pad, unk}
        let m = NaiveBayesModel::train(&[pair("a", "x")], 1, ContextMode::EttOnly, 1.0).unwrap();
        let prior = |c: f64| (c + 1.0) / (2.0 + 3.0);
        let lik = |c: f64, ne: f64| (c + 1.0) / (ne + 3.0);
        let x = prior(1.0) * lik(1.0, 1.0);
        let eos = prior(1.0) * lik(0.0, 1.0);
        let pad = prior(0.0) * lik(0.0, 0.0);
        let z = x + eos + pad;
        let post = posterior(&m, &["a"]);
        assert_relative_eq!(post["x"], x / z, epsilon = 1e-9);
        assert_relative_eq!(post[EOS], eos / z, epsilon = 1e-9);
        assert_relative_eq!(post[PAD], pad / z, epsilon = 1e-9);
    }

    #[test]
    fn log_space_matches_direct_products() {
        let pairs = [pair("a b c", "x y"), pair("c d", "y z w"), pair("a a", "x")];
        let m = NaiveBayesModel::train(&pairs, 2, ContextMode::EttEng, 0.7).unwrap();
        let ett = ["a", "zzz"];
        let eng = [PAD, "y"];
        let direct: Vec<f64> = m
            .vocab()
            .tokens()
            .iter()
            .map(|e| {
                let slots = ett.iter().chain(&eng).enumerate();
                m.prior(e) * slots.map(|(j, f)| m.likelihood(j, f, e)).product::<f64>()
            })
            .collect();
        let z: f64 = direct.iter().sum();
        let post = m.distribution(&Context::new(&ett, &eng));
        for (e, d) in m.vocab().tokens().iter().zip(&direct) {
            assert_relative_eq!(post[e], d / z, epsilon = 1e-9);
        }
    }

    #[test]
    fn symmetric_data_gives_equal_posteriors() {
        let m = NaiveBayesModel::train(&[pair("a", "x"), pair("a", "y")], 1, ContextMode::EttOnly, 1.0).unwrap();
        let post = posterior(&m, &["a"]);
        assert_relative_eq!(post["x"], post["y"], epsilon = 1e-12);
    }

    #[test]
    fn unknown_context_maps_to_unk() {
        let m = NaiveBayesModel::train(&[pair("a", "x")], 1, ContextMode::EttOnly, 1.0).unwrap();
        assert_eq!(m.likelihood(0, "never-seen", "x"), m.likelihood(0, UNK, "x"));
    }

    #[test]
    fn conditionals_sum_to_one() {
        let pairs = [pair("a b c", "x y"), pair("c d", "y z w")];
        let m = NaiveBayesModel::train(&pairs, 2, ContextMode::EttEng, 0.5).unwrap();
        let prior_sum: f64 = m.vocab().tokens().iter().map(|e| m.prior(e)).sum();
        assert_relative_eq!(prior_sum, 1.0, epsilon = 1e-9);
        for slot in 0..m.num_slots() {
            for e in m.vocab().tokens() {
                let s: f64 = m.slot_vocab(slot).tokens().iter().map(|f| m.likelihood(slot, f, e)).sum();
                assert_relative_eq!(s, 1.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let pairs = [pair("a b c", "x y"), pair("c d", "y z w")];
        let m = NaiveBayesModel::train(&pairs, 2, ContextMode::EttEng, 1.0).unwrap();
        let back: NaiveBayesModel = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(m, back);
    }
}
