mod common;

use common::*;
use etruscan_mt::corpus::split_corpus;
use etruscan_mt::ibm::train_ibm1;
use etruscan_mt::metrics::{bleu, chrf, score_corpus, ter};
use etruscan_mt::Execution;
use proptest::prelude::*;
use proptest::sample::Index;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn normalize_is_idempotent(s in unicode_text()) {
        check_normalize_idempotent(&s)?;
    }

    #[test]
    fn tokenizers_round_trip(s in normalized_text(), suffixes in suffix_list()) {
        check_tokenizer_round_trip(&s, &suffixes)?;
    }

    #[test]
    fn damage_keeps_length_and_alphabet(
        pair in small_corpus().prop_map(|c| c[0].clone()),
        prob in 0.0..=1.0f64,
        geom in 0.05..=1.0f64,
        seed in any::<u64>(),
    ) {
        check_damage_preserves_shape(&pair, prob, geom, seed)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distributions_are_normalized(
        pairs in small_corpus(),
        n in 1..=3usize,
        eng in any::<bool>(),
        picks in prop::collection::vec(any::<Index>(), 8),
    ) {
        check_distributions(&pairs, n, eng, &picks)?;
    }

    #[test]
    fn beam_width_is_irrelevant_without_english_context(pairs in small_corpus(), n in 1..=3usize, src in sentence(ETT, 7)) {
        check_beam_equivalence(&pairs, n, &src)?;
    }

    #[test]
    fn unordered_contexts_ignore_slot_order(
        pairs in small_corpus(),
        n in 1..=3usize,
        ctx in prop::collection::vec(prop::sample::select(ETT).prop_map(String::from), 3),
        perm in prop::collection::vec(0..3usize, 3),
    ) {
        check_unordered_permutation(&pairs, n, ctx, perm)?;
    }

    #[test]
    fn metrics_ignore_pair_order(
        pairs in prop::collection::vec((sentence(ENG, 6), sentence(ENG, 6)), 1..10),
        rotate in any::<Index>(),
    ) {
        let (h, r): (Vec<String>, Vec<String>) = pairs.iter().cloned().unzip();
        let k = rotate.index(h.len());
        let (mut h2, mut r2) = (h.clone(), r.clone());
        h2.rotate_left(k);
        r2.rotate_left(k);
        let a = score_corpus(&h, &r, Execution::Sequential).unwrap();
        let b = score_corpus(&h2, &r2, Execution::Parallel).unwrap();
        prop_assert!((a.bleu - b.bleu).abs() < 1e-9);
        prop_assert!((a.chrf - b.chrf).abs() < 1e-9);
        prop_assert!((a.ter - b.ter).abs() < 1e-9);
        prop_assert!((0.0..=100.0).contains(&a.bleu) && (0.0..=100.0).contains(&a.chrf) && a.ter >= 0.0);
    }

    #[test]
    fn identity_scores_are_perfect(mut refs in prop::collection::vec(sentence(ENG, 8), 1..10), long in sentence(ENG, 4)) {
        // corpus BLEU needs at least one 4-gram to be defined as 100
        refs.push(format!("{long} {long} {long} {long}"));
        prop_assert_eq!(bleu(&refs, &refs).unwrap(), 100.0);
        prop_assert_eq!(chrf(&refs, &refs).unwrap(), 100.0);
        prop_assert_eq!(ter(&refs, &refs).unwrap(), 0.0);
    }

    #[test]
    fn em_likelihood_never_decreases(pairs in small_corpus()) {
        let m = train_ibm1(&pairs, 8, Execution::Sequential).unwrap();
        for w in m.log_likelihoods().windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-9, "{:?}", m.log_likelihoods());
        }
        let m = etruscan_mt::ibm::train_ibm2(&pairs, 8, Execution::Sequential).unwrap();
        for w in m.log_likelihoods().windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-9);
        }
    }

    #[test]
    fn ibm1_ignores_target_word_order(pairs in small_corpus()) {
        let reversed: Vec<_> = pairs
            .iter()
            .map(|(f, e)| (f.clone(), e.tokens().iter().rev().cloned().collect()))
            .collect();
        let a = train_ibm1(&pairs, 5, Execution::Sequential).unwrap();
        let b = train_ibm1(&reversed, 5, Execution::Sequential).unwrap();
        for f in a.ttable().sources() {
            for (e, p) in a.ttable().targets(f) {
                prop_assert!((p - b.ttable().prob(f, e)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn split_partitions_translated_items(rows in bench_corpus(), seed in any::<u64>(), frac in 0.2..0.8f64) {
        let corpus = corpus_of(&rows);
        let (train, test) = split_corpus(&corpus, frac, seed).unwrap();
        prop_assert_eq!(train.len() + test.len(), corpus.len());
        let mut ids: Vec<_> = train.items().iter().chain(test.items()).map(|i| i.id.clone()).collect();
        ids.sort();
        ids.dedup();
        prop_assert_eq!(ids.len(), corpus.len());
        let again = split_corpus(&corpus, frac, seed).unwrap();
        prop_assert_eq!(again.0.items(), train.items());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn benchmarks_are_deterministic(rows in bench_corpus(), seed in 0..1000u64, family in 0..4usize) {
        check_benchmark_determinism(&rows, seed, family)?;
    }
}
