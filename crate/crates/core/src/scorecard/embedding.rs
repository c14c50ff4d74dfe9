use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::ScorecardError;

/// Word vectors sharing one dimension.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Self {
        EmbeddingTable {
            dim,
            vectors: HashMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn insert(
        &mut self,
        word: impl Into<String>,
        vector: Vec<f64>,
    ) -> Result<(), ScorecardError> {
        let word = word.into();
        if vector.len() != self.dim {
            return Err(ScorecardError::DimensionMismatch {
                word,
                expected: self.dim,
                found: vector.len(),
            });
        }
        self.vectors.insert(word, vector);
        Ok(())
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.vectors.get(word).map(Vec::as_slice)
    }

    /// A vector usable for cosine similarity: present and of non-zero norm.
    pub fn usable(&self, word: &str) -> Option<&[f64]> {
        self.get(word).filter(|v| v.iter().any(|&x| x != 0.0))
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.vectors.keys().map(String::as_str)
    }

    /// Reads the plain-text layout `word v1 v2 ...`, one word per line. A
    /// first line holding exactly two integers (`count dim`) is a header and
    /// is skipped. Blank lines are ignored.
    pub fn read_text<R: BufRead>(reader: R) -> Result<Self, ScorecardError> {
        let mut table: Option<EmbeddingTable> = None;
        for (i, line) in reader.lines().enumerate() {
            let lineno = i + 1;
            let line = line.map_err(|e| ScorecardError::Parse {
                line: lineno,
                message: e.to_string(),
            })?;
            let mut fields = line.split_whitespace();
            let Some(word) = fields.next() else { continue };
            let rest: Vec<&str> = fields.collect();
            if lineno == 1
                && rest.len() == 1
                && word.parse::<usize>().is_ok()
                && rest[0].parse::<usize>().is_ok()
            {
                continue;
            }
            let vector = rest
                .iter()
                .map(|t| t.parse::<f64>())
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|e| ScorecardError::Parse {
                    line: lineno,
                    message: format!("{word}: {e}"),
                })?;
            if vector.is_empty() {
                return Err(ScorecardError::Parse {
                    line: lineno,
                    message: format!("{word} has no components"),
                });
            }
            let t = table.get_or_insert_with(|| EmbeddingTable::new(vector.len()));
            t.insert(word, vector).map_err(|e| match e {
                ScorecardError::DimensionMismatch {
                    word,
                    expected,
                    found,
                } => ScorecardError::Parse {
                    line: lineno,
                    message: format!("{word} has {found} components, expected {expected}"),
                },
                other => other,
            })?;
        }
        Ok(table.unwrap_or_default())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScorecardError> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| ScorecardError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::read_text(BufReader::new(file))
    }
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}
