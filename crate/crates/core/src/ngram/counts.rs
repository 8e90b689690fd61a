use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{align_pair, Context, ContextMode, ContextModel, Vocab};
use crate::augment::Pair;
use crate::{Error, Result, EOS, PAD};

#[derive(Debug, Clone, Default, PartialEq)]
struct TargetCounts {
    total: u64,
    targets: Vec<(u32, u64)>,
}

/// Direct estimate of `P(eng_i | context)` from aligned counts, with additive
/// smoothing over the English vocabulary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NgramRepr", into = "NgramRepr")]
pub struct NgramModel {
    n: usize,
    mode: ContextMode,
    ordered: bool,
    alpha: f64,
    vocab: Vocab,
    counts: HashMap<Context, TargetCounts>,
}

impl NgramModel {
    pub fn train(pairs: &[Pair], n: usize, mode: ContextMode, ordered: bool, alpha: f64) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InsufficientData("n-gram training needs at least one pair".into()));
        }
        let mut raw: HashMap<Context, BTreeMap<String, u64>> = HashMap::new();
        for (ett, eng) in pairs {
            for pos in align_pair(ett, eng, n, mode) {
                let key = canonical(pos.context, ordered);
                *raw.entry(key).or_default().entry(pos.target).or_default() += 1;
            }
        }
        let counts = raw
            .into_iter()
            .map(|(ctx, targets)| (ctx, targets.into_iter().collect()))
            .collect();
        Self::from_counts(n, mode, ordered, alpha, [EOS, PAD], counts)
    }

    /// Builds a model from explicit counts. The vocabulary is `vocab` plus
    /// every counted target.
    pub fn from_counts<I, S>(
        n: usize,
        mode: ContextMode,
        ordered: bool,
        alpha: f64,
        vocab: I,
        counts: Vec<(Context, Vec<(String, u64)>)>,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::validate(n, alpha)?;
        let mut tokens: Vec<String> = vocab.into_iter().map(Into::into).collect();
        tokens.extend(counts.iter().flat_map(|(_, t)| t.iter().map(|(e, _)| e.clone())));
        let vocab = Vocab::new(tokens);

        let mut table: HashMap<Context, TargetCounts> = HashMap::new();
        for (ctx, targets) in counts {
            let arity = n * if mode == ContextMode::EttEng { 2 } else { 1 };
            if ctx.ett.len() + ctx.eng.len() != arity || ctx.ett.len() != n {
                return Err(Error::invalid(format!("context {ctx:?} does not have {n} slots per side")));
            }
            let entry = table.entry(canonical(ctx, ordered)).or_default();
            for (token, count) in targets {
                if count == 0 {
                    continue;
                }
                let id = vocab.id(&token).expect("vocabulary covers all targets");
                entry.total += count;
                match entry.targets.iter_mut().find(|(t, _)| *t == id) {
                    Some((_, c)) => *c += count,
                    None => entry.targets.push((id, count)),
                }
            }
        }
        table.retain(|_, c| c.total > 0);
        for c in table.values_mut() {
            c.targets.sort_unstable();
        }
        Ok(NgramModel { n, mode, ordered, alpha, vocab, counts: table })
    }

    fn validate(n: usize, alpha: f64) -> Result<()> {
        if n == 0 {
            return Err(Error::invalid("context size n must be at least 1"));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::invalid(format!("alpha must be positive, got {alpha}")));
        }
        Ok(())
    }

    pub fn ordered(&self) -> bool {
        self.ordered
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Number of distinct stored contexts.
    pub fn num_contexts(&self) -> usize {
        self.counts.len()
    }

    /// Raw count of `target` after `context`.
    pub fn count(&self, context: &Context, target: &str) -> u64 {
        let key = canonical(context.clone(), self.ordered);
        let Some(id) = self.vocab.id(target) else { return 0 };
        self.counts
            .get(&key)
            .and_then(|c| c.targets.iter().find(|(t, _)| *t == id))
            .map_or(0, |(_, c)| *c)
    }
}

fn canonical(mut ctx: Context, ordered: bool) -> Context {
    if !ordered {
        ctx.ett.sort();
    }
    ctx
}

impl ContextModel for NgramModel {
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
        let v = self.vocab.len() as f64;
        let key = canonical(Context::new(ett, eng), self.ordered);
        match self.counts.get(&key) {
            None => vec![-v.ln(); self.vocab.len()],
            Some(c) => {
                let denom = (c.total as f64 + self.alpha * v).ln();
                let mut out = vec![self.alpha.ln() - denom; self.vocab.len()];
                for &(id, count) in &c.targets {
                    out[id as usize] = (count as f64 + self.alpha).ln() - denom;
                }
                out
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct NgramRepr {
    n: usize,
    context_mode: ContextMode,
    ordered: bool,
    alpha: f64,
    english_vocab: Vec<String>,
    counts: Vec<CountRow>,
}

#[derive(Serialize, Deserialize)]
struct CountRow {
    context: Context,
    targets: BTreeMap<String, u64>,
}

impl From<NgramModel> for NgramRepr {
    fn from(m: NgramModel) -> Self {
        let mut counts: Vec<CountRow> = m
            .counts
            .iter()
            .map(|(ctx, c)| CountRow {
                context: ctx.clone(),
                targets: c.targets.iter().map(|&(id, n)| (m.vocab.token(id).to_string(), n)).collect(),
            })
            .collect();
        counts.sort_by(|a, b| a.context.cmp(&b.context));
        NgramRepr {
            n: m.n,
            context_mode: m.mode,
            ordered: m.ordered,
            alpha: m.alpha,
            english_vocab: m.vocab.tokens().to_vec(),
            counts,
        }
    }
}

impl TryFrom<NgramRepr> for NgramModel {
    type Error = Error;

    fn try_from(r: NgramRepr) -> Result<Self> {
        let counts = r
            .counts
            .into_iter()
            .map(|row| (row.context, row.targets.into_iter().collect()))
            .collect();
        NgramModel::from_counts(r.n, r.context_mode, r.ordered, r.alpha, r.english_vocab, counts)
    }
}
