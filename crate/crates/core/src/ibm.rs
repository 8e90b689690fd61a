//! IBM alignment models 1 and 2 trained with EM, plus a lexical decoder.
//!
//! `t(e|f)` is the probability of English token `e` given Etruscan token `f`;
//! a [`NULL`] token is prepended to every Etruscan sentence. Model 2 adds
//! `a(i|j, l_e, l_f)`, the probability that English position `j` aligns to
//! Etruscan position `i` (0 is NULL) given both sentence lengths.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::augment::Pair;
use crate::corpus::Lexicon;
use crate::tokenizer::{Token, TokenSequence};
use crate::{Error, Execution, Result};

/// The empty source token.
pub const NULL: &str = "<null>";
/// Default number of EM iterations.
pub const DEFAULT_ITERATIONS: usize = 10;
/// Probabilities below this are not written to model files.
pub const PRUNE_THRESHOLD: f64 = 1e-6;

/// Translation table `t(e|f)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TTable {
    rows: HashMap<String, Vec<(String, f64)>>,
}

impl TTable {
    pub fn prob(&self, f: &str, e: &str) -> f64 {
        self.rows
            .get(f)
            .and_then(|row| row.iter().find(|(t, _)| t == e))
            .map_or(0.0, |(_, p)| *p)
    }

    /// Targets of `f` with nonzero probability, sorted by token.
    pub fn targets(&self, f: &str) -> &[(String, f64)] {
        self.rows.get(f).map_or(&[], Vec::as_slice)
    }

    pub fn sources(&self) -> impl Iterator<Item = &str> {
        self.rows.keys().map(String::as_str)
    }

    /// Most probable target of `f`; ties go to the smaller token.
    pub fn best(&self, f: &str) -> Option<(&str, f64)> {
        self.targets(f)
            .iter()
            .fold(None, |best: Option<(&str, f64)>, (e, p)| match best {
                Some((_, bp)) if bp >= *p => best,
                _ => Some((e.as_str(), *p)),
            })
    }
}

/// Alignment table `a(i | j, l_e, l_f)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AlignTable {
    /// (l_e, l_f) -> probabilities indexed `i * l_e + j`, `j` zero-based.
    blocks: BTreeMap<(usize, usize), Vec<f64>>,
}

impl AlignTable {
    /// `a(i | j, l_e, l_f)` with `i` in `0..=l_f` (0 is NULL) and `j` in
    /// `0..l_e`.
    pub fn prob(&self, i: usize, j: usize, l_e: usize, l_f: usize) -> Option<f64> {
        self.blocks.get(&(l_e, l_f)).map(|b| b[i * l_e + j])
    }

    pub fn lengths(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.blocks.keys().copied()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IbmModel {
    ttable: TTable,
    align: Option<AlignTable>,
    drop: HashMap<String, f64>,
    log_likelihoods: Vec<f64>,
}

/// Interned training corpus with one flat parameter per co-occurring pair.
struct Prepared {
    src_vocab: Vec<String>,
    tgt_vocab: Vec<String>,
    pairs: Vec<PreparedPair>,
    link_src: Vec<u32>,
    link_tgt: Vec<u32>,
    lengths: Vec<(usize, usize)>,
}

struct PreparedPair {
    /// Etruscan ids, NULL first.
    src: Vec<u32>,
    /// Link id of (src[i], tgt[j]) at `i * l_e + j`.
    links: Vec<u32>,
    l_e: usize,
    block: usize,
}

impl Prepared {
    fn new(pairs: &[Pair]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InsufficientData("IBM training needs at least one pair".into()));
        }
        let mut src_set = BTreeSet::new();
        let mut tgt_set = BTreeSet::new();
        for (f, e) in pairs {
            src_set.extend(f.iter_str());
            tgt_set.extend(e.iter_str());
        }
        src_set.remove(NULL);
        let src_vocab: Vec<String> = std::iter::once(NULL).chain(src_set).map(String::from).collect();
        let tgt_vocab: Vec<String> = tgt_set.into_iter().map(String::from).collect();
        let src_id: HashMap<&str, u32> = src_vocab.iter().enumerate().map(|(i, s)| (s.as_str(), i as u32)).collect();
        let tgt_id: HashMap<&str, u32> = tgt_vocab.iter().enumerate().map(|(i, s)| (s.as_str(), i as u32)).collect();

        let mut lengths = BTreeSet::new();
        for (f, e) in pairs {
            lengths.insert((e.len(), f.len()));
        }
        let lengths: Vec<(usize, usize)> = lengths.into_iter().collect();

        let mut link_index: HashMap<(u32, u32), u32> = HashMap::new();
        let mut link_src = Vec::new();
        let mut link_tgt = Vec::new();
        let mut prepared = Vec::with_capacity(pairs.len());
        for (f, e) in pairs {
            let src: Vec<u32> = std::iter::once(0).chain(f.iter_str().map(|s| src_id[s])).collect();
            let tgt: Vec<u32> = e.iter_str().map(|s| tgt_id[s]).collect();
            let mut links = Vec::with_capacity(src.len() * tgt.len());
            for &fi in &src {
                for &ej in &tgt {
                    let next = link_src.len() as u32;
                    let id = *link_index.entry((fi, ej)).or_insert_with(|| {
                        link_src.push(fi);
                        link_tgt.push(ej);
                        next
                    });
                    links.push(id);
                }
            }
            let block = lengths.binary_search(&(e.len(), f.len())).expect("length recorded");
            prepared.push(PreparedPair { src, links, l_e: tgt.len(), block });
        }
        Ok(Prepared { src_vocab, tgt_vocab, pairs: prepared, link_src, link_tgt, lengths })
    }

    fn uniform_t(&self) -> Vec<f64> {
        vec![1.0 / self.tgt_vocab.len().max(1) as f64; self.link_src.len()]
    }

    fn uniform_a(&self) -> Vec<Vec<f64>> {
        self.lengths
            .iter()
            .map(|&(l_e, l_f)| vec![1.0 / (l_f + 1) as f64; (l_f + 1) * l_e])
            .collect()
    }
}

struct Posterior {
    /// Indexed like `PreparedPair::links`.
    weights: Vec<f64>,
    log_likelihood: f64,
}

fn e_step(pair: &PreparedPair, t: &[f64], a: Option<&[Vec<f64>]>) -> Posterior {
    let l_e = pair.l_e;
    let rows = pair.src.len();
    let mut weights = vec![0.0; pair.links.len()];
    let mut log_likelihood = 0.0;
    for j in 0..l_e {
        let mut z = 0.0;
        for i in 0..rows {
            let k = i * l_e + j;
            let w = t[pair.links[k] as usize] * a.map_or(1.0, |a| a[pair.block][k]);
            weights[k] = w;
            z += w;
        }
        log_likelihood += match a {
            Some(_) => z.ln(),
            None => (z / rows as f64).ln(),
        };
        if z > 0.0 {
            for i in 0..rows {
                weights[i * l_e + j] /= z;
            }
        }
    }
    Posterior { weights, log_likelihood }
}

struct EmState<'a> {
    data: &'a Prepared,
    t: Vec<f64>,
    a: Option<Vec<Vec<f64>>>,
    log_likelihoods: Vec<f64>,
}

impl EmState<'_> {
    fn posteriors(&self, exec: Execution) -> Vec<Posterior> {
        exec.map(&self.data.pairs, |p| e_step(p, &self.t, self.a.as_deref()))
    }

    fn iterate(&mut self, exec: Execution) {
        let posts = self.posteriors(exec);
        self.log_likelihoods.push(posts.iter().map(|p| p.log_likelihood).sum());

        let mut link_counts = vec![0.0; self.t.len()];
        let mut align_counts = self.a.as_ref().map(|a| a.iter().map(|b| vec![0.0; b.len()]).collect::<Vec<_>>());
        for (pair, post) in self.data.pairs.iter().zip(&posts) {
            for (k, &w) in post.weights.iter().enumerate() {
                link_counts[pair.links[k] as usize] += w;
            }
            if let Some(counts) = align_counts.as_mut() {
                for (c, &w) in counts[pair.block].iter_mut().zip(&post.weights) {
                    *c += w;
                }
            }
        }

        let mut src_totals = vec![0.0; self.data.src_vocab.len()];
        for (k, &c) in link_counts.iter().enumerate() {
            src_totals[self.data.link_src[k] as usize] += c;
        }
        for (k, t) in self.t.iter_mut().enumerate() {
            let total = src_totals[self.data.link_src[k] as usize];
            *t = if total > 0.0 { link_counts[k] / total } else { 0.0 };
        }

        if let (Some(a), Some(counts)) = (self.a.as_mut(), align_counts) {
            for ((block, counts), &(l_e, l_f)) in a.iter_mut().zip(counts).zip(&self.data.lengths) {
                for j in 0..l_e {
                    let total: f64 = (0..=l_f).map(|i| counts[i * l_e + j]).sum();
                    if total > 0.0 {
                        for i in 0..=l_f {
                            block[i * l_e + j] = counts[i * l_e + j] / total;
                        }
                    }
                }
            }
        }
    }

    fn finish(self, exec: Execution) -> IbmModel {
        let posts = self.posteriors(exec);
        let mut log_likelihoods = self.log_likelihoods;
        log_likelihoods.push(posts.iter().map(|p| p.log_likelihood).sum());

        // Chance that an Etruscan token receives no alignment at all, averaged
        // over its occurrences.
        let mut drop_sum = vec![0.0; self.data.src_vocab.len()];
        let mut drop_n = vec![0usize; self.data.src_vocab.len()];
        for (pair, post) in self.data.pairs.iter().zip(&posts) {
            for (i, &f) in pair.src.iter().enumerate().skip(1) {
                let none: f64 = (0..pair.l_e).map(|j| 1.0 - post.weights[i * pair.l_e + j]).product();
                drop_sum[f as usize] += none;
                drop_n[f as usize] += 1;
            }
        }
        let drop = (1..self.data.src_vocab.len())
            .filter(|&f| drop_n[f] > 0)
            .map(|f| (self.data.src_vocab[f].clone(), drop_sum[f] / drop_n[f] as f64))
            .collect();

        let mut rows: HashMap<String, Vec<(String, f64)>> = HashMap::new();
        for (k, &p) in self.t.iter().enumerate() {
            if p > 0.0 {
                let f = &self.data.src_vocab[self.data.link_src[k] as usize];
                let e = &self.data.tgt_vocab[self.data.link_tgt[k] as usize];
                rows.entry(f.clone()).or_default().push((e.clone(), p));
            }
        }
        for row in rows.values_mut() {
            row.sort_by(|a, b| a.0.cmp(&b.0));
        }
        let align = self.a.map(|a| AlignTable { blocks: self.data.lengths.iter().copied().zip(a).collect() });
        IbmModel { ttable: TTable { rows }, align, drop, log_likelihoods }
    }
}

fn check_iterations(iterations: usize) -> Result<()> {
    if iterations == 0 {
        return Err(Error::invalid("IBM training needs at least one iteration"));
    }
    Ok(())
}

/// Model 1: `iterations` EM steps from a uniform table.
pub fn train_ibm1(pairs: &[Pair], iterations: usize, exec: Execution) -> Result<IbmModel> {
    check_iterations(iterations)?;
    let data = Prepared::new(pairs)?;
    let mut state = EmState { t: data.uniform_t(), a: None, data: &data, log_likelihoods: Vec::new() };
    for _ in 0..iterations {
        state.iterate(exec);
    }
    Ok(state.finish(exec))
}

/// Model 2: a Model 1 run of `iterations` steps, then `iterations` joint EM
/// steps starting from a uniform alignment table.
pub fn train_ibm2(pairs: &[Pair], iterations: usize, exec: Execution) -> Result<IbmModel> {
    check_iterations(iterations)?;
    let data = Prepared::new(pairs)?;
    let mut state = EmState { t: data.uniform_t(), a: None, data: &data, log_likelihoods: Vec::new() };
    for _ in 0..iterations {
        state.iterate(exec);
    }
    state.a = Some(data.uniform_a());
    for _ in 0..iterations {
        state.iterate(exec);
    }
    Ok(state.finish(exec))
}

/// `sum log P(e | f)` over `pairs` under Model 1, or Model 2 when `align` is
/// given. Length-pair combinations missing from `align` use a uniform
/// alignment.
pub fn corpus_log_likelihood(ttable: &TTable, align: Option<&AlignTable>, pairs: &[Pair]) -> f64 {
    let mut total = 0.0;
    for (f, e) in pairs {
        let src: Vec<&str> = std::iter::once(NULL).chain(f.iter_str()).collect();
        let (l_e, l_f) = (e.len(), f.len());
        for (j, ej) in e.iter_str().enumerate() {
            let z: f64 = src
                .iter()
                .enumerate()
                .map(|(i, fi)| {
                    let a = align
                        .and_then(|a| a.prob(i, j, l_e, l_f))
                        .unwrap_or(1.0 / (l_f + 1) as f64);
                    ttable.prob(fi, ej) * a
                })
                .sum();
            total += z.ln();
        }
    }
    total
}

/// Lexicon entries as one-word training pairs.
pub fn dictionary_pairs(lexicon: &Lexicon) -> Vec<Pair> {
    lexicon
        .translatable()
        .map(|entry| {
            (
                TokenSequence::from_strs(&[entry.etruscan.as_str()]),
                entry.english.split_whitespace().map(Token::word).collect(),
            )
        })
        .collect()
}

impl IbmModel {
    /// 1 or 2.
    pub fn order(&self) -> u8 {
        if self.align.is_some() {
            2
        } else {
            1
        }
    }

    pub fn ttable(&self) -> &TTable {
        &self.ttable
    }

    pub fn align(&self) -> Option<&AlignTable> {
        self.align.as_ref()
    }

    /// Probability that `f` is left unaligned, from the last E-step.
    pub fn drop_prob(&self, f: &str) -> f64 {
        self.drop.get(f).copied().unwrap_or(0.0)
    }

    /// Training log-likelihood before each EM step and after the last one.
    /// Empty for models read from disk.
    pub fn log_likelihoods(&self) -> &[f64] {
        &self.log_likelihoods
    }

    pub fn log_likelihood(&self, pairs: &[Pair]) -> f64 {
        corpus_log_likelihood(&self.ttable, self.align.as_ref(), pairs)
    }

    /// Translates each Etruscan token to its most probable English token.
    ///
    /// Unknown tokens are dropped, as are tokens more likely to stay
    /// unaligned than to produce their best translation. Model 2 then orders
    /// the output by the most probable English position of each source token.
    pub fn translate(&self, source: &TokenSequence) -> TokenSequence {
        let l_f = source.len();
        let mut out: Vec<(usize, &str)> = Vec::new();
        for (i, f) in source.iter_str().enumerate() {
            let Some((e, p)) = self.ttable.best(f) else { continue };
            if self.drop_prob(f) > p {
                continue;
            }
            let position = self
                .align
                .as_ref()
                .and_then(|a| a.blocks.get(&(l_f, l_f)))
                .map_or(i, |block| {
                    (0..l_f).fold(0, |best, j| if block[(i + 1) * l_f + j] > block[(i + 1) * l_f + best] { j } else { best })
                });
            out.push((position, e));
        }
        out.sort_by_key(|&(pos, _)| pos);
        out.into_iter().map(|(_, e)| Token::word(e)).collect()
    }
}

#[derive(Serialize, Deserialize)]
struct IbmRepr {
    order: u8,
    ttable: BTreeMap<String, BTreeMap<String, f64>>,
    drop: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    align: Vec<AlignBlock>,
}

#[derive(Serialize, Deserialize)]
struct AlignBlock {
    l_e: usize,
    l_f: usize,
    /// `probs[i][j]` is `a(i | j, l_e, l_f)`.
    probs: Vec<Vec<f64>>,
}

impl Serialize for IbmModel {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let ttable = self
            .ttable
            .rows
            .iter()
            .map(|(f, row)| {
                let kept = row.iter().filter(|(_, p)| *p >= PRUNE_THRESHOLD).map(|(e, p)| (e.clone(), *p)).collect();
                (f.clone(), kept)
            })
            .collect();
        let align = self
            .align
            .iter()
            .flat_map(|a| &a.blocks)
            .map(|(&(l_e, l_f), block)| AlignBlock {
                l_e,
                l_f,
                probs: (0..=l_f).map(|i| block[i * l_e..(i + 1) * l_e].to_vec()).collect(),
            })
            .collect();
        IbmRepr {
            order: self.order(),
            ttable,
            drop: self.drop.iter().map(|(k, v)| (k.clone(), *v)).collect(),
            align,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IbmModel {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = IbmRepr::deserialize(deserializer)?;
        let mut rows = HashMap::new();
        for (f, row) in repr.ttable {
            // renormalize after pruning
            let total: f64 = row.values().sum();
            if total > 0.0 {
                rows.insert(f, row.into_iter().map(|(e, p)| (e, p / total)).collect());
            }
        }
        let align = match repr.order {
            1 => None,
            2 => {
                let mut blocks = BTreeMap::new();
                for b in repr.align {
                    if b.probs.len() != b.l_f + 1 || b.probs.iter().any(|r| r.len() != b.l_e) {
                        return Err(D::Error::custom(format!("alignment block ({}, {}) has the wrong shape", b.l_e, b.l_f)));
                    }
                    blocks.insert((b.l_e, b.l_f), b.probs.concat());
                }
                Some(AlignTable { blocks })
            }
            other => return Err(D::Error::custom(format!("unsupported IBM model order {other}"))),
        };
        Ok(IbmModel { ttable: TTable { rows }, align, drop: repr.drop.into_iter().collect(), log_likelihoods: Vec::new() })
    }
}
