//! Labeled text corpora and tweet normalization.

use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;

use regex::Regex;
use thiserror::Error;

use crate::exec::Exec;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot open corpus {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("corpus is missing the {0:?} column")]
    MissingColumn(&'static str),
    #[error("row {row}: label {found:?} is not 0 or 1")]
    BadLabel { row: usize, found: String },
    #[error("malformed corpus: {0}")]
    Parse(String),
}

impl From<csv::Error> for CorpusError {
    fn from(e: csv::Error) -> Self {
        CorpusError::Parse(e.to_string())
    }
}

/// Delimited text layout. Both use a header row with `text` and `label`
/// columns and RFC 4180 quoting; they differ only in the delimiter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CorpusFormat {
    #[default]
    Tsv,
    Csv,
}

impl CorpusFormat {
    fn delimiter(self) -> u8 {
        match self {
            CorpusFormat::Tsv => b'\t',
            CorpusFormat::Csv => b',',
        }
    }

    /// Guesses from the file extension, defaulting to TSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => CorpusFormat::Csv,
            _ => CorpusFormat::Tsv,
        }
    }
}

impl FromStr for CorpusFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "tsv" => Ok(CorpusFormat::Tsv),
            "csv" => Ok(CorpusFormat::Csv),
            other => Err(format!(
                "unknown corpus format {other:?} (expected tsv or csv)"
            )),
        }
    }
}

impl fmt::Display for CorpusFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorpusFormat::Tsv => "tsv",
            CorpusFormat::Csv => "csv",
        })
    }
}

/// A text and its binary label (`true` = hate speech).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub text: String,
    pub label: bool,
}

impl Document {
    pub fn new(text: impl Into<String>, label: bool) -> Self {
        Document {
            text: text.into(),
            label,
        }
    }
}

/// Ordered documents, in source order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabeledCorpus {
    docs: Vec<Document>,
}

impl LabeledCorpus {
    pub fn new(docs: Vec<Document>) -> Self {
        LabeledCorpus { docs }
    }

    pub fn docs(&self) -> &[Document] {
        &self.docs
    }

    pub fn into_docs(self) -> Vec<Document> {
        self.docs
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn positives(&self) -> usize {
        self.docs.iter().filter(|d| d.label).count()
    }

    pub fn labels(&self) -> Vec<bool> {
        self.docs.iter().map(|d| d.label).collect()
    }

    /// Documents at the given positions, in that order.
    pub fn select(&self, indices: &[usize]) -> LabeledCorpus {
        LabeledCorpus::new(indices.iter().map(|&i| self.docs[i].clone()).collect())
    }

    pub fn map_text<F>(&self, exec: Exec, f: F) -> LabeledCorpus
    where
        F: Fn(&str) -> String + Sync + Send,
    {
        LabeledCorpus::new(exec.map(&self.docs, |d| Document::new(f(&d.text), d.label)))
    }

    pub fn write<W: Write>(&self, writer: W, format: CorpusFormat) -> Result<(), CorpusError> {
        let mut w = csv::WriterBuilder::new()
            .delimiter(format.delimiter())
            .quote_style(csv::QuoteStyle::Necessary)
            .from_writer(writer);
        w.write_record(["text", "label"])?;
        for doc in &self.docs {
            w.write_record([doc.text.as_str(), if doc.label { "1" } else { "0" }])?;
        }
        w.flush().map_err(|e| CorpusError::Parse(e.to_string()))?;
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>, format: CorpusFormat) -> Result<(), CorpusError> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| CorpusError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        self.write(file, format)
    }
}

impl FromIterator<Document> for LabeledCorpus {
    fn from_iter<I: IntoIterator<Item = Document>>(iter: I) -> Self {
        LabeledCorpus::new(iter.into_iter().collect())
    }
}

/// Reads a delimited corpus. Rows are numbered from 1, header excluded.
pub fn read_corpus<R: Read>(reader: R, format: CorpusFormat) -> Result<LabeledCorpus, CorpusError> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(format.delimiter())
        .has_headers(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let column = |name: &'static str| {
        headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(name))
            .ok_or(CorpusError::MissingColumn(name))
    };
    let text_col = column("text")?;
    let label_col = column("label")?;

    let mut docs = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record?;
        let field = |col: usize| {
            record
                .get(col)
                .ok_or_else(|| CorpusError::Parse(format!("row {row}: too few fields")))
        };
        let text = field(text_col)?;
        let label = match field(label_col)?.trim() {
            "0" => false,
            "1" => true,
            other => {
                return Err(CorpusError::BadLabel {
                    row,
                    found: other.to_string(),
                })
            }
        };
        docs.push(Document::new(text, label));
    }
    Ok(LabeledCorpus::new(docs))
}

pub fn load_corpus(
    path: impl AsRef<Path>,
    format: CorpusFormat,
) -> Result<LabeledCorpus, CorpusError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| CorpusError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    read_corpus(file, format)
}

/// Which normalization steps [`preprocess`] applies. All on by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PreprocessConfig {
    pub lowercase: bool,
    pub replace_urls: bool,
    pub replace_mentions: bool,
    pub collapse_whitespace: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            lowercase: true,
            replace_urls: true,
            replace_mentions: true,
            collapse_whitespace: true,
        }
    }
}

impl PreprocessConfig {
    pub fn none() -> Self {
        PreprocessConfig {
            lowercase: false,
            replace_urls: false,
            replace_mentions: false,
            collapse_whitespace: false,
        }
    }
}

pub const URL_TOKEN: &str = "<url>";
pub const USER_TOKEN: &str = "<user>";

// Parentheses never belong to a URL so that echoes survive: "(((http://x)))".
fn url_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)(?:https?://|www\.)[^\s()]+").unwrap())
}

fn mention_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"@\w+").unwrap())
}

/// Tweet normalization: lowercase, URLs to `<url>`, @-mentions to `<user>`,
/// then whitespace runs to a single space with the ends trimmed.
/// Parentheses are never touched.
pub fn preprocess(text: &str, config: &PreprocessConfig) -> String {
    let mut out = if config.lowercase {
        text.to_lowercase()
    } else {
        text.to_string()
    };
    if config.replace_urls {
        out = url_re().replace_all(&out, URL_TOKEN).into_owned();
    }
    if config.replace_mentions {
        out = mention_re().replace_all(&out, USER_TOKEN).into_owned();
    }
    if config.collapse_whitespace {
        out = out.split_whitespace().collect::<Vec<_>>().join(" ");
    }
    out
}

pub fn preprocess_corpus(
    corpus: &LabeledCorpus,
    config: &PreprocessConfig,
    exec: Exec,
) -> LabeledCorpus {
    corpus.map_text(exec, |t| preprocess(t, config))
}
