#![allow(dead_code)]

use etruscan_mt::augment::{augment_damage, item_rng, AugmentConfig, Pair};
use etruscan_mt::corpus::{is_normalized, normalize, Inscription, Lexicon, ParallelCorpus, Source};
use etruscan_mt::harness::{run_benchmark_on, BenchmarkConfig, BenchmarkData, TokenizerChoice};
use etruscan_mt::ibm::{train_ibm1, train_ibm2};
use etruscan_mt::model::ModelConfig;
use etruscan_mt::ngram::{beam_translate, Context, ContextMode, ContextModel, NaiveBayesModel, NgramModel};
use etruscan_mt::baselines::RandomModel;
use etruscan_mt::tokenizer::{detokenize, tokenize_suffix, tokenize_whitespace, TokenSequence};
use etruscan_mt::{Execution, PAD};
use proptest::prelude::*;
use proptest::sample::Index;

pub const SPECIAL: &[char] = &[
    'θ', 'ϑ', 'φ', 'ϕ', 'χ', 'σ', 'ς', 'ś', 'š', '⊞', '\'', '’', '´', 'ʼ', '\u{301}', '·', '•', ':', '⋮', '|', ' ',
    '\t', '-', 'Θ', 'Σ', 'A', 'z',
];

/// Arbitrary Unicode with transcription symbols mixed in.
pub fn unicode_text() -> impl Strategy<Value = String> {
    prop::collection::vec(prop_oneof![any::<char>(), prop::sample::select(SPECIAL)], 0..40)
        .prop_map(|cs| cs.into_iter().collect())
}

/// Text that is already in normalized form.
pub fn normalized_text() -> impl Strategy<Value = String> {
    prop::collection::vec("[a-z-]{1,10}", 0..8).prop_map(|ws| ws.join(" "))
}

pub fn suffix_list() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec("[a-z]{1,3}", 0..6)
}

pub fn sentence(vocab: &'static [&'static str], max: usize) -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(vocab), 1..=max).prop_map(|ws| ws.join(" "))
}

pub const ETT: &[&str] = &["mi", "clan", "avil", "larthia", "vel", "suthi", "ati", "puia"];
pub const ENG: &[&str] = &["i", "am", "son", "years", "larthia", "vel", "tomb", "mother", "wife"];

pub fn small_corpus() -> impl Strategy<Value = Vec<Pair>> {
    prop::collection::vec((sentence(ETT, 5), sentence(ENG, 6)), 2..12).prop_map(|rows| {
        rows.iter().map(|(a, b)| (tokenize_whitespace(a), tokenize_whitespace(b))).collect()
    })
}

pub fn check_normalize_idempotent(s: &str) -> Result<(), TestCaseError> {
    let once = normalize(s);
    prop_assert_eq!(normalize(&once), once.clone());
    prop_assert!(is_normalized(&once), "{:?}", once);
    Ok(())
}

pub fn check_tokenizer_round_trip(s: &str, suffixes: &[String]) -> Result<(), TestCaseError> {
    prop_assert_eq!(detokenize(&tokenize_whitespace(s)).unwrap(), s);
    let tokens = tokenize_suffix(s, suffixes);
    prop_assert_eq!(detokenize(&tokens).unwrap(), s);
    prop_assert_eq!(TokenSequence::from_strs(&tokens.to_strings()).len(), tokens.len());
    Ok(())
}

fn assert_sums_to_one(d: impl Iterator<Item = f64>) -> Result<(), TestCaseError> {
    let mut sum = 0.0;
    for p in d {
        prop_assert!(p > 0.0);
        sum += p;
    }
    prop_assert!((sum - 1.0).abs() <= 1e-9, "sum {}", sum);
    Ok(())
}

fn contexts(model: &dyn ContextModel, ett: &[&str], picks: &[Index]) -> Vec<Context> {
    let n = model.order();
    let vocab = model.vocab().tokens();
    let mut slot = picks.iter().cycle();
    let mut pick = |choices: &[&str]| choices[slot.next().unwrap().index(choices.len())].to_string();
    let mut ett_choices: Vec<&str> = ett.to_vec();
    ett_choices.extend([PAD, "never-seen"]);
    let eng_choices: Vec<&str> = vocab.iter().map(String::as_str).collect();
    (0..4)
        .map(|_| Context {
            ett: (0..n).map(|_| pick(&ett_choices)).collect(),
            eng: match model.mode() {
                ContextMode::EttOnly => Vec::new(),
                ContextMode::EttEng => (0..n).map(|_| pick(&eng_choices)).collect(),
            },
        })
        .collect()
}

pub fn check_distributions(pairs: &[Pair], n: usize, eng_ctx: bool, picks: &[Index]) -> Result<(), TestCaseError> {
    let mode = if eng_ctx { ContextMode::EttEng } else { ContextMode::EttOnly };
    let models: Vec<Box<dyn ContextModel>> = vec![
        Box::new(NgramModel::train(pairs, n, mode, true, 1.0).unwrap()),
        Box::new(NgramModel::train(pairs, n, mode, false, 0.3).unwrap()),
        Box::new(NaiveBayesModel::train(pairs, n, mode, 1.0).unwrap()),
    ];
    for model in &models {
        for ctx in contexts(model.as_ref(), ETT, picks) {
            assert_sums_to_one(model.distribution(&ctx).into_values())?;
        }
    }
    let english: Vec<TokenSequence> = pairs.iter().map(|(_, e)| e.clone()).collect();
    assert_sums_to_one(RandomModel::train(&english).unwrap().unigrams.into_values())?;
    for ibm in [train_ibm1(pairs, 3, Execution::Sequential).unwrap(), train_ibm2(pairs, 3, Execution::Sequential).unwrap()] {
        for f in ibm.ttable().sources() {
            let s: f64 = ibm.ttable().targets(f).iter().map(|(_, p)| p).sum();
            prop_assert!((s - 1.0).abs() <= 1e-9, "t row {} sums to {}", f, s);
        }
        if let Some(a) = ibm.align() {
            for (l_e, l_f) in a.lengths() {
                for j in 0..l_e {
                    let s: f64 = (0..=l_f).map(|i| a.prob(i, j, l_e, l_f).unwrap()).sum();
                    prop_assert!((s - 1.0).abs() <= 1e-9);
                }
            }
        }
    }
    Ok(())
}

pub fn check_beam_equivalence(pairs: &[Pair], n: usize, source: &str) -> Result<(), TestCaseError> {
    let src = tokenize_whitespace(source);
    let ngram = NgramModel::train(pairs, n, ContextMode::EttOnly, true, 1.0).unwrap();
    let nb = NaiveBayesModel::train(pairs, n, ContextMode::EttOnly, 1.0).unwrap();
    let greedy = beam_translate(&ngram, &src, 1, 64).unwrap();
    for beams in [2, 8] {
        prop_assert_eq!(&beam_translate(&ngram, &src, beams, 64).unwrap(), &greedy);
    }
    let greedy = beam_translate(&nb, &src, 1, 64).unwrap();
    prop_assert_eq!(&beam_translate(&nb, &src, 8, 64).unwrap(), &greedy);
    Ok(())
}

pub fn check_unordered_permutation(pairs: &[Pair], n: usize, ctx: Vec<String>, perm: Vec<usize>) -> Result<(), TestCaseError> {
    let model = NgramModel::train(pairs, n, ContextMode::EttOnly, false, 1.0).unwrap();
    let ctx: Vec<String> = ctx.into_iter().take(n).collect();
    let mut order: Vec<usize> = (0..ctx.len()).collect();
    for (i, p) in perm.iter().enumerate().take(ctx.len()) {
        order.swap(i, p % ctx.len());
    }
    let permuted: Vec<String> = order.iter().map(|&i| ctx[i].clone()).collect();
    let a = model.distribution(&Context { ett: ctx, eng: Vec::new() });
    let b = model.distribution(&Context { ett: permuted, eng: Vec::new() });
    prop_assert_eq!(a, b);
    Ok(())
}

pub fn check_damage_preserves_shape(pair: &Pair, prob: f64, geom_p: f64, seed: u64) -> Result<(), TestCaseError> {
    let cfg = AugmentConfig { damage_prob: prob, damage_geom_p: geom_p, ..AugmentConfig::default() };
    let (ett, eng) = augment_damage(pair, &cfg, &mut item_rng(seed, 0)).unwrap();
    prop_assert_eq!(ett.len(), pair.0.len());
    prop_assert_eq!(&eng, &pair.1);
    for (a, b) in pair.0.tokens().iter().zip(ett.tokens()) {
        prop_assert_eq!(a.as_str().chars().count(), b.as_str().chars().count());
        for (x, y) in a.as_str().chars().zip(b.as_str().chars()) {
            prop_assert!(x == y || y == '-');
        }
    }
    Ok(())
}

pub fn corpus_of(pairs: &[(String, String)]) -> ParallelCorpus {
    let items = pairs
        .iter()
        .enumerate()
        .map(|(i, (e, g))| Inscription::new(format!("p{i}"), Source::Etp, e, Some(g)))
        .collect();
    ParallelCorpus::new("prop", items).unwrap()
}

pub fn bench_corpus() -> impl Strategy<Value = Vec<(String, String)>> {
    prop::collection::vec((sentence(ETT, 5), sentence(ENG, 6)), 5..15)
}

pub fn check_benchmark_determinism(rows: &[(String, String)], seed: u64, family: usize) -> Result<(), TestCaseError> {
    let model = [
        ModelConfig::Random,
        ModelConfig::Ngram { n: 2, context: ContextMode::EttEng, ordered: true, alpha: 1.0, beams: 4 },
        ModelConfig::NaiveBayes { n: 1, context: ContextMode::EttOnly, alpha: 1.0, beams: 8 },
        ModelConfig::Ibm2 { iterations: 2, dictionary: false },
    ][family % 4]
        .clone();
    let mut config = BenchmarkConfig::new("in-memory", model);
    config.repeats = 3;
    config.seed = seed;
    config.augmentation = Some(AugmentConfig { damage_prob: 0.3, ..AugmentConfig::default() });
    let data = BenchmarkData::new(corpus_of(rows), Lexicon::default(), TokenizerChoice::Whitespace);
    let a = run_benchmark_on(&config, &data, Execution::Sequential).unwrap();
    let b = run_benchmark_on(&config, &data, Execution::Parallel).unwrap();
    let c = run_benchmark_on(&config, &data, Execution::Parallel).unwrap();
    let json = |r| serde_json::to_string(r).unwrap();
    prop_assert_eq!(json(&a), json(&b));
    prop_assert_eq!(json(&b), json(&c));
    Ok(())
}
