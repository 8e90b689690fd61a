//! Model families behind one interface, their hyperparameters, and the
//! versioned model file.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::augment::{item_rng, Pair};
use crate::baselines::{DictModel, RandomModel};
use crate::corpus::Lexicon;
use crate::ibm::{dictionary_pairs, train_ibm1, train_ibm2, IbmModel, DEFAULT_ITERATIONS};
use crate::ngram::{beam_translate, ContextMode, NaiveBayesModel, NgramModel, DEFAULT_ALPHA, DEFAULT_BEAMS};
use crate::tokenizer::{TokenSequence, Tokenizer};
use crate::{Error, Execution, Result};

/// Tag written at the top of every model file.
pub const MODEL_FORMAT: &str = "etmt-model";
pub const MODEL_VERSION: u32 = 1;

/// Upper bound on generated length for the context models.
pub const MAX_OUTPUT_LEN: usize = 256;

fn default_n() -> usize {
    1
}
fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}
fn default_beams() -> usize {
    DEFAULT_BEAMS
}
fn default_ordered() -> bool {
    true
}
fn default_context() -> ContextMode {
    ContextMode::EttOnly
}
fn default_iterations() -> usize {
    DEFAULT_ITERATIONS
}

/// A model family together with its hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    Random,
    Dictionary,
    Ngram {
        #[serde(default = "default_n")]
        n: usize,
        #[serde(default = "default_context")]
        context: ContextMode,
        #[serde(default = "default_ordered")]
        ordered: bool,
        #[serde(default = "default_alpha")]
        alpha: f64,
        #[serde(default = "default_beams")]
        beams: usize,
    },
    NaiveBayes {
        #[serde(default = "default_n")]
        n: usize,
        #[serde(default = "default_context")]
        context: ContextMode,
        #[serde(default = "default_alpha")]
        alpha: f64,
        #[serde(default = "default_beams")]
        beams: usize,
    },
    Ibm1 {
        #[serde(default = "default_iterations")]
        iterations: usize,
        /// Add lexicon entries as one-word training pairs.
        #[serde(default)]
        dictionary: bool,
    },
    Ibm2 {
        #[serde(default = "default_iterations")]
        iterations: usize,
        #[serde(default)]
        dictionary: bool,
    },
}

impl ModelConfig {
    /// Short row label for result tables.
    pub fn label(&self) -> String {
        let ctx = |c: &ContextMode| match c {
            ContextMode::EttOnly => "ett",
            ContextMode::EttEng => "ett+eng",
        };
        match self {
            ModelConfig::Random => "random".into(),
            ModelConfig::Dictionary => "dictionary".into(),
            ModelConfig::Ngram { n, context, ordered, .. } => {
                format!("{n}-gram {}{}", ctx(context), if *ordered { "" } else { " unordered" })
            }
            ModelConfig::NaiveBayes { n, context, .. } => format!("naive bayes {n} {}", ctx(context)),
            ModelConfig::Ibm1 { dictionary, .. } => format!("IBM1{}", if *dictionary { " +dict" } else { "" }),
            ModelConfig::Ibm2 { dictionary, .. } => format!("IBM2{}", if *dictionary { " +dict" } else { "" }),
        }
    }

    /// Whether training uses the split at all.
    pub fn needs_training_data(&self) -> bool {
        !matches!(self, ModelConfig::Dictionary)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelConfig::Ngram { n, alpha, beams, .. } | ModelConfig::NaiveBayes { n, alpha, beams, .. } => {
                if *n == 0 {
                    return Err(Error::invalid("n must be at least 1"));
                }
                if !(*alpha > 0.0 && alpha.is_finite()) {
                    return Err(Error::invalid(format!("alpha must be positive, got {alpha}")));
                }
                if *beams == 0 {
                    return Err(Error::invalid("beams must be at least 1"));
                }
            }
            ModelConfig::Ibm1 { iterations, .. } | ModelConfig::Ibm2 { iterations, .. } if *iterations == 0 => {
                return Err(Error::invalid("iterations must be at least 1"));
            }
            _ => {}
        }
        Ok(())
    }
}

/// A trained model of any family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Model {
    Random(RandomModel),
    Dictionary(DictModel),
    Ngram { beams: usize, model: NgramModel },
    NaiveBayes { beams: usize, model: NaiveBayesModel },
    Ibm(IbmModel),
}

/// Trains the configured model on tokenized pairs. The lexicon is used by the
/// dictionary model and by IBM models with `dictionary: true`.
pub fn train_model(config: &ModelConfig, pairs: &[Pair], lexicon: &Lexicon, exec: Execution) -> Result<Model> {
    config.validate()?;
    let with_dict = |dictionary: bool| {
        let mut all = pairs.to_vec();
        if dictionary {
            all.extend(dictionary_pairs(lexicon));
        }
        all
    };
    Ok(match *config {
        ModelConfig::Random => {
            let english: Vec<TokenSequence> = pairs.iter().map(|(_, e)| e.clone()).collect();
            Model::Random(RandomModel::train(&english)?)
        }
        ModelConfig::Dictionary => Model::Dictionary(DictModel::from_lexicon(lexicon)),
        ModelConfig::Ngram { n, context, ordered, alpha, beams } => Model::Ngram {
            beams,
            model: NgramModel::train(pairs, n, context, ordered, alpha)?,
        },
        ModelConfig::NaiveBayes { n, context, alpha, beams } => Model::NaiveBayes {
            beams,
            model: NaiveBayesModel::train(pairs, n, context, alpha)?,
        },
        ModelConfig::Ibm1 { iterations, dictionary } => Model::Ibm(train_ibm1(&with_dict(dictionary), iterations, exec)?),
        ModelConfig::Ibm2 { iterations, dictionary } => Model::Ibm(train_ibm2(&with_dict(dictionary), iterations, exec)?),
    })
}

impl Model {
    /// Translates one sentence. Only the random model reads `seed`; the
    /// sentence `index` selects its own random stream.
    pub fn translate(&self, source: &TokenSequence, seed: u64, index: u64) -> Result<TokenSequence> {
        Ok(match self {
            Model::Random(m) => m.translate(source, &mut item_rng(seed, index)),
            Model::Dictionary(m) => m.translate(source),
            Model::Ngram { beams, model } => beam_translate(model, source, *beams, MAX_OUTPUT_LEN)?,
            Model::NaiveBayes { beams, model } => beam_translate(model, source, *beams, MAX_OUTPUT_LEN)?,
            Model::Ibm(m) => m.translate(source),
        })
    }

    /// Translates every source in order.
    pub fn translate_all(&self, sources: &[TokenSequence], seed: u64, exec: Execution) -> Result<Vec<TokenSequence>> {
        exec.map_range(sources.len(), |i| self.translate(&sources[i], seed, i as u64))
            .into_iter()
            .collect()
    }
}

/// A model plus the tokenizer its Etruscan input must go through.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub version: u32,
    pub tokenizer: Tokenizer,
    pub model: Model,
}

impl ModelFile {
    pub fn new(tokenizer: Tokenizer, model: Model) -> Self {
        ModelFile { format: MODEL_FORMAT.into(), version: MODEL_VERSION, tokenizer, model }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let json = serde_json::to_string(self)?;
        fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let header: serde_json::Value = serde_json::from_str(&text)?;
        let format = header.get("format").and_then(|v| v.as_str());
        let version = header.get("version").and_then(|v| v.as_u64());
        if format != Some(MODEL_FORMAT) {
            return Err(Error::Malformed { path: path.into(), line: 1, message: "not a model file".into() });
        }
        if version != Some(MODEL_VERSION as u64) {
            return Err(Error::Malformed {
                path: path.into(),
                line: 1,
                message: format!("unsupported model version {version:?}, expected {MODEL_VERSION}"),
            });
        }
        Ok(serde_json::from_value(header)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenizer::tokenize_whitespace;

    fn pairs() -> Vec<Pair> {
        [("mi aveles", "i am avele"), ("mi larthia", "i am larthia"), ("clan velus", "son of vel")]
            .iter()
            .map(|(a, b)| (tokenize_whitespace(a), tokenize_whitespace(b)))
            .collect()
    }

    #[test]
    fn config_defaults() {
        let c: ModelConfig = serde_json::from_str(r#"{"family": "ngram"}"#).unwrap();
        assert_eq!(
            c,
            ModelConfig::Ngram { n: 1, context: ContextMode::EttOnly, ordered: true, alpha: 1.0, beams: 8 }
        );
        let c: ModelConfig = serde_json::from_str(r#"{"family": "ibm2", "dictionary": true}"#).unwrap();
        assert_eq!(c, ModelConfig::Ibm2 { iterations: 10, dictionary: true });
        assert!(serde_json::from_str::<ModelConfig>(r#"{"family": "ngram", "beam": 3}"#).is_err());
    }

    #[test]
    fn every_family_round_trips_through_a_file() {
        let dir = tempfile::tempdir().unwrap();
        let lexicon = Lexicon::default();
        let configs = [
            ModelConfig::Random,
            ModelConfig::Dictionary,
            serde_json::from_str(r#"{"family": "ngram", "n": 2, "context": "ett-eng"}"#).unwrap(),
            serde_json::from_str(r#"{"family": "naive_bayes", "n": 2}"#).unwrap(),
            ModelConfig::Ibm1 { iterations: 3, dictionary: false },
            ModelConfig::Ibm2 { iterations: 3, dictionary: false },
        ];
        let src = tokenize_whitespace("mi aveles");
        for config in configs {
            let model = train_model(&config, &pairs(), &lexicon, Execution::Sequential).unwrap();
            let path = dir.path().join("model.json");
            ModelFile::new(Tokenizer::Whitespace, model.clone()).save(&path).unwrap();
            let back = ModelFile::load(&path).unwrap();
            assert_eq!(
                back.model.translate(&src, 7, 0).unwrap(),
                model.translate(&src, 7, 0).unwrap(),
                "{}",
                config.label()
            );
        }
    }

    #[test]
    fn wrong_version_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        fs::write(&path, r#"{"format": "etmt-model", "version": 99}"#).unwrap();
        assert!(ModelFile::load(&path).is_err());
    }
}
