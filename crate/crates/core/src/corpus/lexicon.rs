use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{normalize, normalize_english};
use crate::{Error, Result};

pub const FEATURE_COUNT: usize = 54;

/// Grammatical features, in column order `f1..f54`.
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "city name",
    "place name",
    "name",
    "epithet",
    "theonomin",
    "cognomen",
    "praenomen",
    "nomen",
    "nominative",
    "accusative",
    "masculine",
    "feminine",
    "nas-particle",
    "nasa-particle",
    "u-particle",
    "θ-imperative",
    "θ-particle",
    "θas-particle",
    "as-particle",
    "active",
    "passive",
    "non-past",
    "past",
    "imperative",
    "jussive",
    "necessitative",
    "inanimate",
    "animate",
    "indefinite (pronoun)",
    "definite (article)",
    "deictic particle",
    "enclitic particle",
    "enclitic conjunction",
    "demonstrative",
    "adverb",
    "article",
    "conjunction",
    "post-position",
    "pronoun",
    "relative",
    "subordinator",
    "negation",
    "numeral",
    "1st genitive",
    "2nd genitive",
    "1st ablative",
    "2nd ablative",
    "locative",
    "1st pertinentive",
    "2nd pertinentive",
    "1st person",
    "2nd person",
    "3rd person",
    "plural",
];

/// Feature indices that mark a word as a proper noun: city name, place name,
/// name, theonomin, cognomen, praenomen, nomen.
pub const PROPER_NOUN_FEATURES: [usize; 7] = [0, 1, 2, 4, 5, 6, 7];

/// 54 binary grammatical features packed into the low bits of a `u64`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FeatureVector(u64);

impl FeatureVector {
    const MASK: u64 = (1 << FEATURE_COUNT) - 1;

    pub fn from_bits(bits: u64) -> Self {
        FeatureVector(bits & Self::MASK)
    }

    pub fn from_bools(flags: &[bool]) -> Result<Self> {
        if flags.len() != FEATURE_COUNT {
            return Err(Error::invalid(format!(
                "feature vector needs {FEATURE_COUNT} entries, got {}",
                flags.len()
            )));
        }
        Ok(FeatureVector(
            flags
                .iter()
                .enumerate()
                .fold(0, |acc, (i, &on)| if on { acc | (1 << i) } else { acc }),
        ))
    }

    /// Build from feature names; unknown names are rejected.
    pub fn from_names(names: &[&str]) -> Result<Self> {
        let mut bits = 0;
        for name in names {
            let idx = FEATURE_NAMES
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::invalid(format!("unknown grammatical feature {name:?}")))?;
            bits |= 1 << idx;
        }
        Ok(FeatureVector(bits))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn get(self, index: usize) -> bool {
        index < FEATURE_COUNT && self.0 & (1 << index) != 0
    }

    pub fn is_proper_noun(self) -> bool {
        PROPER_NOUN_FEATURES.iter().any(|&i| self.get(i))
    }

    pub fn names(self) -> impl Iterator<Item = &'static str> {
        (0..FEATURE_COUNT).filter(move |&i| self.get(i)).map(|i| FEATURE_NAMES[i])
    }
}

impl fmt::Debug for FeatureVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub etruscan: String,
    /// Empty when the vocable has no known translation.
    pub english: String,
    pub features: FeatureVector,
}

impl LexiconEntry {
    pub fn new(etruscan: &str, english: &str, features: FeatureVector) -> Result<Self> {
        let etruscan = normalize(etruscan);
        if etruscan.is_empty() {
            return Err(Error::invalid("lexicon entry with empty etruscan form"));
        }
        Ok(LexiconEntry {
            etruscan,
            english: normalize_english(english),
            features,
        })
    }

    pub fn is_translatable(&self) -> bool {
        !self.english.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: Vec<LexiconEntry>,
    suffixes: Vec<String>,
}

impl Lexicon {
    pub fn new(entries: Vec<LexiconEntry>) -> Self {
        Lexicon {
            entries,
            suffixes: Vec::new(),
        }
    }

    /// Attach a suffix list; entries are normalized, blanks and duplicates
    /// are removed, a leading `-` is ignored.
    pub fn with_suffixes<S: AsRef<str>>(mut self, suffixes: &[S]) -> Self {
        self.suffixes = clean_suffixes(suffixes.iter().map(|s| s.as_ref()));
        self
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn suffixes(&self) -> &[String] {
        &self.suffixes
    }

    pub fn translatable(&self) -> impl Iterator<Item = &LexiconEntry> {
        self.entries.iter().filter(|e| e.is_translatable())
    }
}

fn clean_suffixes<'a>(lines: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for line in lines {
        let suffix = normalize(line.trim().trim_start_matches('-'));
        if !suffix.is_empty() && !suffix.contains(' ') && !out.contains(&suffix) {
            out.push(suffix);
        }
    }
    out
}

fn parse_feature(path: &Path, line: u64, value: &str) -> Result<bool> {
    match value.trim() {
        "1" => Ok(true),
        "0" | "" => Ok(false),
        other => Err(Error::Malformed {
            path: path.to_path_buf(),
            line,
            message: format!("feature value must be 0 or 1, got {other:?}"),
        }),
    }
}

/// Load the lexicon TSV (`etruscan, english, f1..f54`). The suffix list is
/// loaded separately with [`load_suffixes`].
pub fn load_lexicon(path: impl AsRef<Path>) -> Result<Lexicon> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .quoting(false)
        .flexible(true)
        .has_headers(false)
        .from_reader(BufReader::new(file));

    let mut entries = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Malformed {
            path: path.to_path_buf(),
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(i as u64 + 1);
        let found = record.len().saturating_sub(2);
        if found != FEATURE_COUNT {
            return Err(Error::FeatureCount {
                path: path.to_path_buf(),
                line,
                found,
            });
        }
        if i == 0 {
            if record.get(0).map(str::trim) != Some("etruscan") {
                return Err(Error::Malformed {
                    path: path.to_path_buf(),
                    line,
                    message: "expected header row starting with \"etruscan\"".into(),
                });
            }
            continue;
        }
        let flags = record
            .iter()
            .skip(2)
            .map(|v| parse_feature(path, line, v))
            .collect::<Result<Vec<_>>>()?;
        let entry = LexiconEntry::new(&record[0], &record[1], FeatureVector::from_bools(&flags)?).map_err(|e| {
            Error::Malformed {
                path: path.to_path_buf(),
                line,
                message: e.to_string(),
            }
        })?;
        entries.push(entry);
    }
    Ok(Lexicon::new(entries))
}

/// Load a suffix file: one suffix per line.
pub fn load_suffixes(path: impl AsRef<Path>) -> Result<Vec<String>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let lines = BufReader::new(file)
        .lines()
        .collect::<std::io::Result<Vec<_>>>()
        .map_err(|e| Error::io(path, e))?;
    Ok(clean_suffixes(lines.iter().map(String::as_str)))
}

/// Write the lexicon in the same TSV layout [`load_lexicon`] reads.
pub fn write_lexicon(lexicon: &Lexicon, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| Error::io(path, e);
    write!(w, "etruscan\tenglish").map_err(io)?;
    for i in 1..=FEATURE_COUNT {
        write!(w, "\tf{i}").map_err(io)?;
    }
    writeln!(w).map_err(io)?;
    for entry in lexicon.entries() {
        write!(w, "{}\t{}", entry.etruscan, entry.english).map_err(io)?;
        for i in 0..FEATURE_COUNT {
            write!(w, "\t{}", u8::from(entry.features.get(i))).map_err(io)?;
        }
        writeln!(w).map_err(io)?;
    }
    w.flush().map_err(io)
}
