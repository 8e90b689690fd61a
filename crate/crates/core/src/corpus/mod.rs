//! Inscriptions, the parallel corpus and the grammatical lexicon.

mod lexicon;
mod translit;

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use lexicon::{
    load_lexicon, load_suffixes, write_lexicon, FeatureVector, Lexicon, LexiconEntry,
    FEATURE_COUNT, FEATURE_NAMES, PROPER_NOUN_FEATURES,
};
pub use translit::{is_normalized, normalize, normalize_counting, normalize_english};

/// Which collection an inscription comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Source {
    #[serde(rename = "ETP")]
    Etp,
    #[serde(rename = "CIEP")]
    Ciep,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Etp => "ETP",
            Source::Ciep => "CIEP",
        }
    }
}

impl std::str::FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "ETP" => Ok(Source::Etp),
            "CIEP" => Ok(Source::Ciep),
            other => Err(Error::invalid(format!("unknown source {other:?}"))),
        }
    }
}

/// One parallel example.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inscription {
    pub id: String,
    pub source: Source,
    pub etruscan_raw: String,
    /// Output of [`normalize`] on `etruscan_raw`.
    pub etruscan: String,
    /// Normalized English translation, when one exists.
    pub english: Option<String>,
    pub date: Option<String>,
    pub location: Option<String>,
}

impl Inscription {
    /// Build an inscription, normalizing both sides.
    pub fn new(id: impl Into<String>, source: Source, etruscan_raw: &str, english: Option<&str>) -> Self {
        Inscription {
            id: id.into(),
            source,
            etruscan_raw: etruscan_raw.to_string(),
            etruscan: normalize(etruscan_raw),
            english: english.map(normalize_english).filter(|e| !e.is_empty()),
            date: None,
            location: None,
        }
    }

    pub fn is_translated(&self) -> bool {
        self.english.is_some()
    }
}

/// Ordered collection of inscriptions with unique ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelCorpus {
    name: String,
    items: Vec<Inscription>,
}

impl ParallelCorpus {
    pub fn new(name: impl Into<String>, items: Vec<Inscription>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(items.len());
        for item in &items {
            if !seen.insert(item.id.as_str()) {
                return Err(Error::DuplicateId(item.id.clone()));
            }
        }
        Ok(ParallelCorpus {
            name: name.into(),
            items,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn items(&self) -> &[Inscription] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Only the inscriptions that have an English translation.
    pub fn translated(&self) -> ParallelCorpus {
        ParallelCorpus {
            name: self.name.clone(),
            items: self.items.iter().filter(|i| i.is_translated()).cloned().collect(),
        }
    }

    /// Only the inscriptions from `source`.
    pub fn filter_source(&self, source: Source) -> ParallelCorpus {
        ParallelCorpus {
            name: format!("{}/{}", self.name, source.as_str()),
            items: self.items.iter().filter(|i| i.source == source).cloned().collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Tsv,
    Json,
}

impl CorpusFormat {
    /// Guess from the file extension; anything that is not `.json` is TSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => CorpusFormat::Json,
            _ => CorpusFormat::Tsv,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DroppedRow {
    pub line: u64,
    pub id: String,
    pub reason: String,
}

/// What happened while loading a corpus file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub path: PathBuf,
    pub rows_read: usize,
    pub rows_kept: usize,
    pub dropped: Vec<DroppedRow>,
    /// Characters removed by transliteration because they had no mapping.
    pub unmapped_chars: usize,
}

impl fmt::Display for LoadReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "file: {}", self.path.display())?;
        writeln!(f, "rows read: {}", self.rows_read)?;
        writeln!(f, "rows kept: {}", self.rows_kept)?;
        writeln!(f, "rows dropped: {}", self.dropped.len())?;
        writeln!(f, "unmapped characters dropped: {}", self.unmapped_chars)?;
        for row in &self.dropped {
            writeln!(f, "  line {} (id {:?}): {}", row.line, row.id, row.reason)?;
        }
        Ok(())
    }
}

const COLUMNS: [&str; 6] = ["id", "source", "etruscan", "english", "date", "location"];
const REQUIRED_COLUMNS: [&str; 4] = ["id", "source", "etruscan", "english"];

#[derive(Debug, Default, Deserialize, Serialize)]
struct Row {
    id: Option<String>,
    source: Option<String>,
    etruscan: Option<String>,
    english: Option<String>,
    date: Option<String>,
    location: Option<String>,
}

fn non_empty(field: Option<String>) -> Option<String> {
    field.filter(|s| !s.trim().is_empty())
}

struct Builder {
    path: PathBuf,
    items: Vec<Inscription>,
    report: LoadReport,
}

impl Builder {
    fn push(&mut self, line: u64, row: Row) -> Result<()> {
        self.report.rows_read += 1;
        let malformed = |message: String| Error::Malformed {
            path: self.path.clone(),
            line,
            message,
        };
        let id = non_empty(row.id).ok_or_else(|| malformed("missing id".into()))?;
        let source: Source = row
            .source
            .unwrap_or_default()
            .parse()
            .map_err(|e: Error| malformed(e.to_string()))?;
        let raw = row.etruscan.unwrap_or_default();
        let (etruscan, unmapped) = normalize_counting(&raw);
        self.report.unmapped_chars += unmapped;
        if etruscan.is_empty() {
            self.report.dropped.push(DroppedRow {
                line,
                id,
                reason: "etruscan text is empty after normalization".into(),
            });
            return Ok(());
        }
        self.items.push(Inscription {
            id,
            source,
            etruscan_raw: raw,
            etruscan,
            english: non_empty(row.english)
                .map(|e| normalize_english(&e))
                .filter(|e| !e.is_empty()),
            date: non_empty(row.date),
            location: non_empty(row.location),
        });
        self.report.rows_kept += 1;
        Ok(())
    }
}

/// Load a corpus file, normalizing every row.
pub fn load_corpus(path: impl AsRef<Path>, format: CorpusFormat) -> Result<(ParallelCorpus, LoadReport)> {
    let path = path.as_ref();
    let mut builder = Builder {
        path: path.to_path_buf(),
        items: Vec::new(),
        report: LoadReport {
            path: path.to_path_buf(),
            ..LoadReport::default()
        },
    };
    let file = File::open(path).map_err(|e| Error::io(path, e))?;

    match format {
        CorpusFormat::Tsv => {
            let mut reader = csv::ReaderBuilder::new()
                .delimiter(b'\t')
                .quoting(false)
                .from_reader(BufReader::new(file));
            let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
            for column in REQUIRED_COLUMNS {
                if !headers.iter().any(|h| h.trim() == column) {
                    return Err(Error::Malformed {
                        path: path.to_path_buf(),
                        line: 1,
                        message: format!("missing column {column:?}"),
                    });
                }
            }
            for record in reader.records() {
                let record = record.map_err(|e| csv_error(path, e))?;
                let line = record.position().map(|p| p.line()).unwrap_or(0);
                let row: Row = record.deserialize(Some(&headers)).map_err(|e| csv_error(path, e))?;
                builder.push(line, row)?;
            }
        }
        CorpusFormat::Json => {
            let rows: Vec<Row> = serde_json::from_reader(BufReader::new(file)).map_err(|e| Error::Malformed {
                path: path.to_path_buf(),
                line: e.line() as u64,
                message: e.to_string(),
            })?;
            for (i, row) in rows.into_iter().enumerate() {
                builder.push(i as u64 + 1, row)?;
            }
        }
    }

    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let corpus = ParallelCorpus::new(name, builder.items)?;
    Ok((corpus, builder.report))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        kind => Error::Malformed {
            path: path.to_path_buf(),
            line,
            message: format!("{kind:?}"),
        },
    }
}

fn clean_field(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

fn to_row(item: &Inscription) -> Row {
    Row {
        id: Some(clean_field(&item.id)),
        source: Some(item.source.as_str().to_string()),
        etruscan: Some(item.etruscan.clone()),
        english: Some(item.english.clone().unwrap_or_default()),
        date: Some(clean_field(item.date.as_deref().unwrap_or_default())),
        location: Some(clean_field(item.location.as_deref().unwrap_or_default())),
    }
}

/// Write the normalized corpus. The `etruscan` column holds the normalized
/// text, so loading the output again yields the same corpus.
pub fn write_corpus(corpus: &ParallelCorpus, path: impl AsRef<Path>, format: CorpusFormat) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let rows: Vec<Row> = corpus.items().iter().map(to_row).collect();
    match format {
        CorpusFormat::Tsv => {
            let mut writer = csv::WriterBuilder::new()
                .delimiter(b'\t')
                .quote_style(csv::QuoteStyle::Never)
                .from_writer(BufWriter::new(file));
            if rows.is_empty() {
                writer.write_record(COLUMNS).map_err(|e| csv_error(path, e))?;
            }
            for row in &rows {
                writer.serialize(row).map_err(|e| csv_error(path, e))?;
            }
            writer.flush().map_err(|e| Error::io(path, e))?;
        }
        CorpusFormat::Json => {
            let mut writer = BufWriter::new(file);
            serde_json::to_writer_pretty(&mut writer, &rows)?;
            writer.flush().map_err(|e| Error::io(path, e))?;
        }
    }
    Ok(())
}

/// Shuffle the translated inscriptions with `seed` and cut them into a train
/// and a test part; the train part gets `floor(n * train_fraction)` items.
pub fn split_corpus(
    corpus: &ParallelCorpus,
    train_fraction: f64,
    seed: u64,
) -> Result<(ParallelCorpus, ParallelCorpus)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::invalid(format!(
            "train fraction must be in (0, 1), got {train_fraction}"
        )));
    }
    let mut items: Vec<Inscription> = corpus.items().iter().filter(|i| i.is_translated()).cloned().collect();
    let n = items.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 translated inscriptions to split, found {n}"
        )));
    }
    let n_train = ((n as f64) * train_fraction + 1e-9).floor() as usize;
    if n_train == 0 || n_train == n {
        return Err(Error::InsufficientData(format!(
            "splitting {n} items with fraction {train_fraction} leaves an empty side"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    items.shuffle(&mut rng);
    let test = items.split_off(n_train);
    Ok((
        ParallelCorpus {
            name: format!("{}/train", corpus.name()),
            items,
        },
        ParallelCorpus {
            name: format!("{}/test", corpus.name()),
            items: test,
        },
    ))
}
