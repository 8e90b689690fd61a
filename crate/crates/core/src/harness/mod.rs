//! Repeated split/train/translate/score experiments.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::info;
use serde::{Deserialize, Serialize};

use crate::augment::{augment_corpus, AugmentConfig, Pair};
use crate::corpus::{load_corpus, load_lexicon, load_suffixes, split_corpus, CorpusFormat, Inscription, Lexicon, ParallelCorpus, Source};
use crate::metrics::{score_corpus, MetricReport};
use crate::model::{train_model, ModelConfig};
use crate::tokenizer::{detokenize, tokenize_whitespace, TokenSequence, Tokenizer};
use crate::{Error, Execution, Result};

fn default_train_size() -> f64 {
    0.8
}
fn default_repeats() -> usize {
    10
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenizerChoice {
    #[default]
    Whitespace,
    /// Root plus suffix, using the configured suffix list.
    Suffix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub corpus: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lexicon: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suffixes: Option<PathBuf>,
    /// Keep only inscriptions from this source.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<Source>,
    /// Fraction of translated inscriptions used for training.
    #[serde(default = "default_train_size")]
    pub train_size: f64,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    /// Run `r` uses seed `seed + r`.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tokenizer: TokenizerChoice,
    pub model: ModelConfig,
    /// Augment each training split; its seed is replaced by the run seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub augmentation: Option<AugmentConfig>,
    /// Train and test on the whole corpus instead of splitting.
    #[serde(default)]
    pub full_eval: bool,
    /// Where result files go.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workdir: Option<PathBuf>,
}

impl BenchmarkConfig {
    /// A config with default protocol settings.
    pub fn new(corpus: impl Into<PathBuf>, model: ModelConfig) -> Self {
        BenchmarkConfig {
            corpus: corpus.into(),
            lexicon: None,
            suffixes: None,
            source: None,
            train_size: default_train_size(),
            repeats: default_repeats(),
            seed: 0,
            tokenizer: TokenizerChoice::Whitespace,
            model,
            augmentation: None,
            full_eval: false,
            workdir: None,
        }
    }

    /// Reads a JSON config. Relative paths are taken relative to the file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config: BenchmarkConfig = serde_json::from_str(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        resolve(&mut config.corpus);
        config.lexicon.as_mut().map(resolve);
        config.suffixes.as_mut().map(resolve);
        config.workdir.as_mut().map(resolve);
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.repeats == 0 {
            return Err(Error::invalid("repeats must be at least 1"));
        }
        if !self.full_eval && !(self.train_size > 0.0 && self.train_size < 1.0) {
            return Err(Error::invalid(format!("train_size must be in (0, 1), got {}", self.train_size)));
        }
        if let Some(aug) = &self.augmentation {
            aug.validate()?;
        }
        self.model.validate()
    }
}

/// Corpus, lexicon and tokenizer a benchmark runs on.
#[derive(Debug, Clone)]
pub struct BenchmarkData {
    pub corpus: ParallelCorpus,
    pub lexicon: Lexicon,
    pub tokenizer: Tokenizer,
}

impl BenchmarkData {
    pub fn new(corpus: ParallelCorpus, lexicon: Lexicon, choice: TokenizerChoice) -> Self {
        let tokenizer = match choice {
            TokenizerChoice::Whitespace => Tokenizer::Whitespace,
            TokenizerChoice::Suffix => Tokenizer::Suffix { suffixes: lexicon.suffixes().to_vec() },
        };
        BenchmarkData { corpus, lexicon, tokenizer }
    }

    /// Loads everything the config points to.
    pub fn load(config: &BenchmarkConfig) -> Result<Self> {
        let (mut corpus, report) = load_corpus(&config.corpus, CorpusFormat::from_path(&config.corpus))?;
        info!("{report}");
        if let Some(source) = config.source {
            corpus = corpus.filter_source(source);
        }
        let mut lexicon = match &config.lexicon {
            Some(path) => load_lexicon(path)?,
            None => Lexicon::default(),
        };
        if let Some(path) = &config.suffixes {
            lexicon = lexicon.with_suffixes(&load_suffixes(path)?);
        }
        if config.tokenizer == TokenizerChoice::Suffix && lexicon.suffixes().is_empty() {
            return Err(Error::invalid("suffix tokenizer needs a non-empty suffix list"));
        }
        Ok(BenchmarkData::new(corpus, lexicon, config.tokenizer))
    }

    pub fn pairs(&self, items: &[Inscription]) -> Vec<Pair> {
        items
            .iter()
            .filter_map(|item| {
                let english = item.english.as_deref()?;
                Some((self.tokenizer.tokenize(&item.etruscan), tokenize_whitespace(english)))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub bleu: f64,
    pub chrf: f64,
    pub ter: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunScore {
    pub seed: u64,
    pub bleu: f64,
    pub chrf: f64,
    pub ter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkResult {
    pub config: BenchmarkConfig,
    pub runs: Vec<RunScore>,
    pub mean: Scores,
    pub std: Scores,
    /// Set when there is a single run and `std` is reported as zero.
    pub single_run: bool,
    #[serde(skip)]
    pub seconds: Vec<f64>,
}

/// Mean and sample standard deviation; the deviation is 0 for one value.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn run_once(config: &BenchmarkConfig, data: &BenchmarkData, run: usize, exec: Execution) -> Result<(RunScore, f64)> {
    let start = Instant::now();
    let seed = config.seed + run as u64;
    let (train, test) = if config.full_eval {
        let all = data.corpus.translated();
        (all.clone(), all)
    } else {
        split_corpus(&data.corpus, config.train_size, seed).map_err(|e| e.in_stage("split", run))?
    };
    let mut train_pairs = data.pairs(train.items());
    if let Some(aug) = &config.augmentation {
        let cfg = AugmentConfig { seed, ..aug.clone() };
        train_pairs = augment_corpus(&train_pairs, &data.lexicon, &cfg, exec).map_err(|e| e.in_stage("augment", run))?;
    }
    let model = train_model(&config.model, &train_pairs, &data.lexicon, exec).map_err(|e| e.in_stage("train", run))?;

    let test_pairs = data.pairs(test.items());
    let sources: Vec<TokenSequence> = test_pairs.iter().map(|(f, _)| f.clone()).collect();
    let outputs = model.translate_all(&sources, seed, exec).map_err(|e| e.in_stage("translate", run))?;
    let hyps = outputs
        .iter()
        .map(detokenize)
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.in_stage("translate", run))?;
    let refs: Vec<String> = test_pairs.iter().map(|(_, e)| e.joined()).collect();
    let report: MetricReport = score_corpus(&hyps, &refs, exec).map_err(|e| e.in_stage("score", run))?;
    let score = RunScore { seed, bleu: report.bleu, chrf: report.chrf, ter: report.ter };
    info!("run {run} (seed {seed}): {report}");
    Ok((score, start.elapsed().as_secs_f64()))
}

/// Runs the protocol on already loaded data. Runs are independent and may
/// execute in parallel; results are collected in run order.
pub fn run_benchmark_on(config: &BenchmarkConfig, data: &BenchmarkData, exec: Execution) -> Result<BenchmarkResult> {
    config.validate()?;
    let outcomes = exec.map_range(config.repeats, |run| run_once(config, data, run, exec));
    let mut runs = Vec::with_capacity(config.repeats);
    let mut seconds = Vec::with_capacity(config.repeats);
    for outcome in outcomes {
        let (score, secs) = outcome?;
        runs.push(score);
        seconds.push(secs);
    }
    let stat = |f: fn(&RunScore) -> f64| mean_std(&runs.iter().map(f).collect::<Vec<_>>());
    let (bleu, bleu_sd) = stat(|r| r.bleu);
    let (chrf, chrf_sd) = stat(|r| r.chrf);
    let (ter, ter_sd) = stat(|r| r.ter);
    Ok(BenchmarkResult {
        config: config.clone(),
        single_run: runs.len() == 1,
        runs,
        mean: Scores { bleu, chrf, ter },
        std: Scores { bleu: bleu_sd, chrf: chrf_sd, ter: ter_sd },
        seconds,
    })
}

/// Loads the configured data and runs the protocol.
pub fn run_benchmark(config: &BenchmarkConfig, exec: Execution) -> Result<BenchmarkResult> {
    config.validate()?;
    let data = BenchmarkData::load(config)?;
    run_benchmark_on(config, &data, exec)
}

/// Model rows with metric columns; standard deviations go in parentheses on
/// the line below each row.
pub fn format_table(results: &[BenchmarkResult]) -> String {
    let labels: Vec<String> = results.iter().map(|r| r.config.model.label()).collect();
    let width = labels.iter().map(String::len).chain([5]).max().unwrap_or(5);
    let mut out = String::new();
    let _ = writeln!(out, "{:<width$} | {:>9} {:>9} {:>9}", "Model", "BLEU", "chr-F", "TER");
    let _ = writeln!(out, "{}", "-".repeat(width + 33));
    for (label, r) in labels.iter().zip(results) {
        let _ = writeln!(out, "{:<width$} | {:>9.3} {:>9.3} {:>9.3}", label, r.mean.bleu, r.mean.chrf, r.mean.ter);
        let paren = |v: f64| format!("({v:.3})");
        let _ = writeln!(
            out,
            "{:<width$} | {:>9} {:>9} {:>9}",
            "",
            paren(r.std.bleu),
            paren(r.std.chrf),
            paren(r.std.ter)
        );
    }
    out
}

/// Writes `results.json`, `timing.json` and `table.txt` into `dir`.
pub fn write_results(result: &BenchmarkResult, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let write = |name: &str, text: String| {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| Error::io(path, e))
    };
    write("results.json", serde_json::to_string_pretty(result)? + "\n")?;
    let timing = serde_json::json!({
        "seconds_per_run": result.seconds,
        "total_seconds": result.seconds.iter().sum::<f64>(),
    });
    write("timing.json", serde_json::to_string_pretty(&timing)? + "\n")?;
    write("table.txt", format_table(std::slice::from_ref(result)))
}
