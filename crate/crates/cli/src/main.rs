//! `etmt`: command line front end for the Etruscan-English toolkit.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};

use anyhow::{bail, Context as _, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use etruscan_mt::augment::{augment_corpus, AugmentConfig};
use etruscan_mt::corpus::{
    load_corpus, load_lexicon, load_suffixes, normalize, normalize_counting, write_corpus, CorpusFormat, Lexicon,
    Source,
};
use etruscan_mt::harness::{run_benchmark, write_results, BenchmarkConfig, BenchmarkData, TokenizerChoice};
use etruscan_mt::metrics::score_corpus;
use etruscan_mt::model::{train_model, ModelConfig, ModelFile};
use etruscan_mt::ngram::{ContextMode, DEFAULT_ALPHA, DEFAULT_BEAMS};
use etruscan_mt::tokenizer::{detokenize, tokenize_whitespace, Tokenizer};
use etruscan_mt::{Error, Execution};

const CACHE_ENV: &str = "ETMT_CACHE_DIR";

#[derive(Parser)]
#[command(name = "etmt", version, about = "Statistical Etruscan to English translation")]
struct Cli {
    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    /// Run every loop on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Transliterate and clean Etruscan text (TSV/JSON corpus or plain lines).
    Normalize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Split normalized Etruscan lines into tokens.
    Tokenize {
        #[arg(long = "in", default_value = "-")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tok: TokenizerArgs,
    },
    /// Write a name-substituted and damaged copy of a corpus.
    Augment {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        lexicon: PathBuf,
        /// JSON augmentation settings.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output TSV with `etruscan` and `english` columns.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        tok: TokenizerArgs,
    },
    /// Train a model on a corpus.
    Train {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long)]
        source: Option<Source>,
        #[command(flatten)]
        tok: TokenizerArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Augment the training pairs with these JSON settings first.
        #[arg(long)]
        augment: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Translate Etruscan lines with a trained model.
    Translate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "in", default_value = "-")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed for the random model.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Score line-aligned hypotheses against references.
    Evaluate {
        #[arg(long)]
        hyp: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Run repeated split/train/test experiments from a JSON config.
    Benchmark {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `workdir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Train and test on the whole corpus.
        #[arg(long)]
        full_eval: bool,
    },
    /// Clone the public dataset repository into the cache directory.
    Fetch {
        /// Git URL of the dataset repository.
        #[arg(long, env = "ETMT_DATASET_URL")]
        url: String,
        /// Destination; defaults to $ETMT_CACHE_DIR or ~/.cache/etmt.
        #[arg(long)]
        dest: Option<PathBuf>,
    },
}

#[derive(Args)]
struct TokenizerArgs {
    #[arg(long, value_enum, default_value_t = TokArg::Whitespace)]
    tokenizer: TokArg,
    /// Suffix list, one per line; required by the suffix tokenizer.
    #[arg(long)]
    suffixes: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TokArg {
    Whitespace,
    Suffix,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Random,
    Dictionary,
    Ngram,
    NaiveBayes,
    Ibm1,
    Ibm2,
}

#[derive(Clone, Copy, ValueEnum)]
enum CtxArg {
    Ett,
    EttEng,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_enum)]
    family: Option<Family>,
    /// JSON model settings, as in the benchmark config.
    #[arg(long, conflicts_with = "family")]
    model_config: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long, value_enum, default_value_t = CtxArg::Ett)]
    context: CtxArg,
    /// Ignore word order inside the Etruscan context (n-gram only).
    #[arg(long)]
    unordered: bool,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long, default_value_t = DEFAULT_BEAMS)]
    beams: usize,
    #[arg(long, default_value_t = etruscan_mt::ibm::DEFAULT_ITERATIONS)]
    iterations: usize,
    /// Add lexicon entries to the IBM training pairs.
    #[arg(long)]
    dictionary: bool,
}

impl ModelArgs {
    fn config(&self) -> Result<ModelConfig> {
        if let Some(path) = &self.model_config {
            return serde_json::from_str(&read_text(path)?)
                .with_context(|| format!("{}: invalid model settings", path.display()));
        }
        let context = match self.context {
            CtxArg::Ett => ContextMode::EttOnly,
            CtxArg::EttEng => ContextMode::EttEng,
        };
        let (n, alpha, beams) = (self.n, self.alpha, self.beams);
        let Some(family) = self.family else {
            return Err(usage("either --family or --model-config is required"));
        };
        Ok(match family {
            Family::Random => ModelConfig::Random,
            Family::Dictionary => ModelConfig::Dictionary,
            Family::Ngram => ModelConfig::Ngram { n, context, ordered: !self.unordered, alpha, beams },
            Family::NaiveBayes => ModelConfig::NaiveBayes { n, context, alpha, beams },
            Family::Ibm1 => ModelConfig::Ibm1 { iterations: self.iterations, dictionary: self.dictionary },
            Family::Ibm2 => ModelConfig::Ibm2 { iterations: self.iterations, dictionary: self.dictionary },
        })
    }
}

/// Marks an error as caused by bad arguments rather than bad data.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn read_text(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Error::Io { path: path.into(), source: e }.into())
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io { path: p.into(), source: e }.into()),
        None => Ok(io::stdout().lock().write_all(text.as_bytes())?),
    }
}

fn lexicon_from(path: Option<&Path>, suffixes: Option<&Path>) -> Result<Lexicon> {
    let mut lexicon = match path {
        Some(p) => load_lexicon(p)?,
        None => Lexicon::default(),
    };
    if let Some(p) = suffixes {
        lexicon = lexicon.with_suffixes(&load_suffixes(p)?);
    }
    Ok(lexicon)
}

impl TokenizerArgs {
    fn choice(&self) -> Result<TokenizerChoice> {
        match self.tokenizer {
            TokArg::Whitespace => Ok(TokenizerChoice::Whitespace),
            TokArg::Suffix if self.suffixes.is_none() => Err(usage("--tokenizer suffix needs --suffixes")),
            TokArg::Suffix => Ok(TokenizerChoice::Suffix),
        }
    }
}

fn load_data(corpus: &Path, lexicon: Option<&Path>, source: Option<Source>, tok: &TokenizerArgs) -> Result<BenchmarkData> {
    let choice = tok.choice()?;
    let (mut corpus, report) = load_corpus(corpus, CorpusFormat::from_path(corpus))?;
    log::info!("{report}");
    if let Some(source) = source {
        corpus = corpus.filter_source(source);
    }
    let lexicon = lexicon_from(lexicon, tok.suffixes.as_deref())?;
    Ok(BenchmarkData::new(corpus, lexicon, choice))
}

fn run(cli: Cli) -> Result<()> {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::default() };
    match cli.command {
        Cmd::Normalize { input, out } => {
            let ext = input.extension().and_then(|e| e.to_str()).unwrap_or("");
            if matches!(ext, "tsv" | "json") {
                let fmt = CorpusFormat::from_path(&input);
                let (corpus, report) = load_corpus(&input, fmt)?;
                eprintln!("{report}");
                write_corpus(&corpus, &out, CorpusFormat::from_path(&out))?;
            } else {
                let mut text = String::new();
                let mut dropped = 0;
                for line in read_text(&input)?.lines() {
                    let (norm, d) = normalize_counting(line);
                    dropped += d;
                    text.push_str(&norm);
                    text.push('\n');
                }
                if dropped > 0 {
                    eprintln!("{dropped} unmapped characters dropped");
                }
                write_text(Some(&out), &text)?;
            }
        }
        Cmd::Tokenize { input, out, tok } => {
            let tokenizer = match tok.choice()? {
                TokenizerChoice::Whitespace => Tokenizer::Whitespace,
                TokenizerChoice::Suffix => Tokenizer::Suffix {
                    suffixes: lexicon_from(None, tok.suffixes.as_deref())?.suffixes().to_vec(),
                },
            };
            let mut text = String::new();
            for line in read_text(&input)?.lines() {
                text.push_str(&tokenizer.tokenize(&normalize(line)).joined());
                text.push('\n');
            }
            write_text(out.as_deref(), &text)?;
        }
        Cmd::Augment { corpus, lexicon, config, seed, out, tok } => {
            let data = load_data(&corpus, Some(&lexicon), None, &tok)?;
            let mut cfg: AugmentConfig = match &config {
                Some(p) => serde_json::from_str(&read_text(p)?)?,
                None => AugmentConfig::default(),
            };
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let pairs = augment_corpus(&data.pairs(data.corpus.items()), &data.lexicon, &cfg, exec)?;
            let mut text = String::from("etruscan\tenglish\n");
            for (ett, eng) in &pairs {
                text.push_str(&format!("{}\t{}\n", detokenize(ett)?, eng.joined()));
            }
            write_text(Some(&out), &text)?;
            eprintln!("{} pairs written", pairs.len());
        }
        Cmd::Train { corpus, lexicon, source, tok, model, augment, out } => {
            let config = model.config()?;
            let data = load_data(&corpus, lexicon.as_deref(), source, &tok)?;
            let mut pairs = data.pairs(data.corpus.items());
            if let Some(p) = augment {
                let cfg: AugmentConfig = serde_json::from_str(&read_text(&p)?)?;
                pairs = augment_corpus(&pairs, &data.lexicon, &cfg, exec)?;
            }
            let trained = train_model(&config, &pairs, &data.lexicon, exec)?;
            ModelFile::new(data.tokenizer.clone(), trained).save(&out)?;
            eprintln!("{} trained on {} pairs, saved to {}", config.label(), pairs.len(), out.display());
        }
        Cmd::Translate { model, input, out, seed } => {
            let file = ModelFile::load(&model)?;
            let sources: Vec<_> = read_text(&input)?.lines().map(|l| file.tokenizer.tokenize(&normalize(l))).collect();
            let outputs = file.model.translate_all(&sources, seed, exec)?;
            let mut text = String::new();
            for o in &outputs {
                text.push_str(&detokenize(o)?);
                text.push('\n');
            }
            write_text(out.as_deref(), &text)?;
        }
        Cmd::Evaluate { hyp, reference, json } => {
            let norm = |s: &str| tokenize_whitespace(&etruscan_mt::corpus::normalize_english(s)).joined();
            let hyps: Vec<String> = read_text(&hyp)?.lines().map(norm).collect();
            let refs: Vec<String> = read_text(&reference)?.lines().map(norm).collect();
            let report = score_corpus(&hyps, &refs, exec)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                println!("{report}");
            }
        }
        Cmd::Benchmark { config, out, full_eval } => {
            let mut cfg = BenchmarkConfig::load(&config)?;
            cfg.full_eval |= full_eval;
            let dir = out.or_else(|| cfg.workdir.clone()).unwrap_or_else(|| PathBuf::from("results"));
            let result = run_benchmark(&cfg, exec)?;
            write_results(&result, &dir)?;
            print!("{}", etruscan_mt::harness::format_table(std::slice::from_ref(&result)));
            eprintln!("results written to {}", dir.display());
        }
        Cmd::Fetch { url, dest } => {
            let dest = match dest.or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from)) {
                Some(d) => d,
                None => match std::env::var_os("HOME") {
                    Some(home) => PathBuf::from(home).join(".cache").join("etmt"),
                    None => return Err(usage(format!("set {CACHE_ENV} or pass --dest"))),
                },
            };
            let name = url.trim_end_matches('/').trim_end_matches(".git").rsplit('/').next().unwrap_or("dataset");
            let target = dest.join(if name.is_empty() { "dataset" } else { name });
            if target.exists() {
                eprintln!("{} already exists", target.display());
                return Ok(());
            }
            fs::create_dir_all(&dest).map_err(|e| Error::Io { path: dest.clone(), source: e })?;
            let status = Command::new("git")
                .args(["clone", "--depth", "1", &url])
                .arg(&target)
                .status()
                .context("running git")?;
            if !status.success() {
                bail!("git clone of {url} failed with {status}");
            }
            println!("{}", target.display());
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let is_usage = err.chain().any(|e| {
        e.downcast_ref::<Usage>().is_some() || matches!(e.downcast_ref::<Error>(), Some(Error::InvalidArgument(_)))
    });
    if is_usage {
        1
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
