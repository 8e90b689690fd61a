//! Sequential vs parallel execution of the data-parallel loops.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use etruscan_mt::augment::Pair;
use etruscan_mt::corpus::{Inscription, Lexicon, ParallelCorpus, Source};
use etruscan_mt::harness::{run_benchmark_on, BenchmarkConfig, BenchmarkData, TokenizerChoice};
use etruscan_mt::ibm::train_ibm1;
use etruscan_mt::metrics::score_corpus;
use etruscan_mt::model::ModelConfig;
use etruscan_mt::tokenizer::tokenize_whitespace;
use etruscan_mt::Execution;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn sentences(n: usize, vocab: usize, prefix: &str, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words: Vec<String> = (0..vocab).map(|i| format!("{prefix}{i}")).collect();
    (0..n)
        .map(|_| {
            let len = rng.random_range(2..12);
            (0..len).map(|_| words.choose(&mut rng).unwrap().as_str()).collect::<Vec<_>>().join(" ")
        })
        .collect()
}

fn pairs(n: usize) -> Vec<Pair> {
    sentences(n, 400, "w", 1)
        .iter()
        .zip(sentences(n, 500, "e", 2))
        .map(|(f, e)| (tokenize_whitespace(f), tokenize_whitespace(&e)))
        .collect()
}

fn ibm1(c: &mut Criterion) {
    let mut group = c.benchmark_group("ibm1_train");
    group.sample_size(10);
    for size in [500, 2000] {
        let data = pairs(size);
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, size), &data, |b, data| {
                b.iter(|| train_ibm1(black_box(data), 5, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn scoring(c: &mut Criterion) {
    let mut group = c.benchmark_group("score_corpus");
    group.sample_size(10);
    for size in [1000, 4000] {
        let hyps = sentences(size, 300, "e", 3);
        let refs = sentences(size, 300, "e", 4);
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, size), &(&hyps, &refs), |b, (h, r)| {
                b.iter(|| score_corpus(black_box(h), black_box(r), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn repeats(c: &mut Criterion) {
    let mut group = c.benchmark_group("benchmark_repeats");
    group.sample_size(10);
    let ett = sentences(600, 300, "w", 5);
    let eng = sentences(600, 300, "e", 6);
    let items = ett
        .iter()
        .zip(&eng)
        .enumerate()
        .map(|(i, (f, e))| Inscription::new(format!("b{i}"), Source::Etp, f, Some(e)))
        .collect();
    let data = BenchmarkData::new(ParallelCorpus::new("bench", items).unwrap(), Lexicon::default(), TokenizerChoice::Whitespace);
    let mut config = BenchmarkConfig::new("in-memory", ModelConfig::Ibm1 { iterations: 5, dictionary: false });
    config.repeats = 10;
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| run_benchmark_on(black_box(&config), &data, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, ibm1, scoring, repeats);
criterion_main!(benches);
