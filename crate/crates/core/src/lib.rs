//! Statistical machine translation for Etruscan to English.
//!
//! The crate covers the whole pipeline used to benchmark translation models on
//! a very small parallel corpus:
//!
//! * [`corpus`]: loading, transliteration and splitting of inscriptions and of
//!   the grammatical lexicon.
//! * [`tokenizer`]: whitespace and root+suffix tokenization.
//! * [`augment`]: proper-name substitution and simulated damage.
//! * [`metrics`]: BLEU, chr-F and TER compatible with the SacreBLEU defaults.
//! * [`baselines`], [`ngram`], [`ibm`]: the translation model families.
//! * [`harness`]: repeated train/test experiments and result reporting.
//!
//! Data-parallel loops (EM expected counts, test-set decoding, metric
//! statistics, benchmark repeats) run on rayon when the `parallel` feature is
//! enabled. Every parallel loop has a sequential counterpart selected through
//! [`Execution`], and both produce identical results.

pub mod augment;
pub mod baselines;
pub mod corpus;
mod error;
mod exec;
pub mod harness;
pub mod ibm;
pub mod metrics;
pub mod model;
pub mod ngram;
pub mod tokenizer;

pub use error::{Error, Result};
pub use exec::Execution;

/// Padding token used by the aligned n-gram contexts.
pub const PAD: &str = "<pad>";
/// End-of-sequence token.
pub const EOS: &str = "<eos>";
