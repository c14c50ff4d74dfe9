//! Plain-text model files.
//!
//! ```text
//! kinfuse-linear-model 1
//! bias -1.2345678901234567e0
//! regularization 2.7825594022071258e-1
//! seed 42
//! folds 5
//! grid 1.0000000000000000e-4 ...
//! cv_f1 0.0000000000000000e0 ...
//! iterations 87
//! converged true
//! terms 2
//! 3.1415926535897931e0<TAB>word
//! ...
//! ```
//!
//! Reals are written with 17 significant digits, which round-trips every
//! f64 exactly. Terms never contain whitespace (see [`tokenize`]), so each
//! term line is `weight<TAB>term`.
//!
//! [`tokenize`]: crate::infusion::tokenize

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use thiserror::Error;

use super::{LinearModel, TrainingMeta, Vocabulary};

const MAGIC: &str = "kinfuse-linear-model";
const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("cannot access model file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("model file line {line}: {message}")]
    Format { line: usize, message: String },
}

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

fn reals(vs: &[f64]) -> String {
    vs.iter().map(|&v| real(v)).collect::<Vec<_>>().join(" ")
}

impl LinearModel {
    pub fn to_text(&self) -> String {
        let m = &self.meta;
        let mut out = String::new();
        writeln!(out, "{MAGIC} {VERSION}").unwrap();
        writeln!(out, "bias {}", real(self.bias)).unwrap();
        writeln!(out, "regularization {}", real(self.regularization)).unwrap();
        writeln!(out, "seed {}", m.seed).unwrap();
        writeln!(out, "folds {}", m.folds).unwrap();
        writeln!(out, "grid {}", reals(&m.grid)).unwrap();
        writeln!(out, "cv_f1 {}", reals(&m.cv_f1)).unwrap();
        writeln!(out, "iterations {}", m.iterations).unwrap();
        writeln!(out, "converged {}", m.converged).unwrap();
        writeln!(out, "terms {}", self.vocabulary.len()).unwrap();
        for (term, w) in self.vocabulary.terms().iter().zip(&self.weights) {
            writeln!(out, "{}\t{term}", real(*w)).unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, ModelError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut next = |name: &str| -> Result<(usize, String), ModelError> {
            let (line, l) = lines.next().ok_or_else(|| ModelError::Format {
                line: 0,
                message: format!("unexpected end of file, expected {name}"),
            })?;
            let rest = match name {
                "" => l,
                _ => l
                    .strip_prefix(name)
                    .and_then(|r| {
                        r.strip_prefix(' ')
                            .or(if r.is_empty() { Some("") } else { None })
                    })
                    .ok_or_else(|| ModelError::Format {
                        line,
                        message: format!("expected {name:?} field"),
                    })?,
            };
            Ok((line, rest.to_string()))
        };
        fn bad(line: usize, what: &str, value: &str) -> ModelError {
            ModelError::Format {
                line,
                message: format!("invalid {what}: {value:?}"),
            }
        }
        fn parse_reals(line: usize, s: &str) -> Result<Vec<f64>, ModelError> {
            s.split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| bad(line, "number", t)))
                .collect()
        }

        let (line, header) = next(MAGIC)?;
        match header.parse::<u32>() {
            Ok(VERSION) => {}
            _ => return Err(bad(line, "format version", &header)),
        }
        let (line, v) = next("bias")?;
        let bias = v.parse().map_err(|_| bad(line, "bias", &v))?;
        let (line, v) = next("regularization")?;
        let regularization = v.parse().map_err(|_| bad(line, "regularization", &v))?;
        let (line, v) = next("seed")?;
        let seed = v.parse().map_err(|_| bad(line, "seed", &v))?;
        let (line, v) = next("folds")?;
        let folds = v.parse().map_err(|_| bad(line, "folds", &v))?;
        let (line, v) = next("grid")?;
        let grid = parse_reals(line, &v)?;
        let (line, v) = next("cv_f1")?;
        let cv_f1 = parse_reals(line, &v)?;
        let (line, v) = next("iterations")?;
        let iterations = v.parse().map_err(|_| bad(line, "iterations", &v))?;
        let (line, v) = next("converged")?;
        let converged = v.parse().map_err(|_| bad(line, "converged flag", &v))?;
        let (line, v) = next("terms")?;
        let n: usize = v.parse().map_err(|_| bad(line, "term count", &v))?;

        let mut terms = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for _ in 0..n {
            let (line, l) = next("")?;
            let (w, term) = l
                .split_once('\t')
                .ok_or_else(|| bad(line, "term line", &l))?;
            weights.push(w.parse::<f64>().map_err(|_| bad(line, "weight", w))?);
            terms.push(term.to_string());
        }
        let vocabulary = Vocabulary::from_terms(terms).ok_or(ModelError::Format {
            line: 0,
            message: "repeated term".into(),
        })?;
        Ok(LinearModel {
            vocabulary,
            weights,
            bias,
            regularization,
            meta: TrainingMeta {
                seed,
                folds,
                grid,
                cv_f1,
                iterations,
                converged,
            },
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ModelError> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| ModelError::Io {
            path: path.display().to_string(),
            source: e,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ModelError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| ModelError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::from_text(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn text_round_trip_is_exact(
            weights in proptest::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 0..20),
            bias in -1e6f64..1e6,
            seed in any::<u64>(),
        ) {
            let terms: Vec<String> = (0..weights.len()).map(|i| format!("t{i}'x")).collect();
            let model = LinearModel {
                vocabulary: Vocabulary::from_terms(terms).unwrap(),
                weights,
                bias,
                regularization: 0.1,
                meta: TrainingMeta {
                    seed,
                    folds: 5,
                    grid: vec![1e-4, 0.1, 1e4],
                    cv_f1: vec![0.0, 0.5, 1.0 / 3.0],
                    iterations: 12,
                    converged: true,
                },
            };
            let back = LinearModel::from_text(&model.to_text()).unwrap();
            prop_assert_eq!(back, model);
        }
    }

    #[test]
    fn rejects_other_versions_and_truncation() {
        assert!(LinearModel::from_text("kinfuse-linear-model 2\n").is_err());
        assert!(LinearModel::from_text("something else\n").is_err());
        let vocab = Vocabulary::from_terms(vec!["a".into()]).unwrap();
        let text = LinearModel::zeros(vocab, 0.5).to_text();
        let truncated: String = text.lines().take(10).collect::<Vec<_>>().join("\n");
        assert!(LinearModel::from_text(&truncated).is_err());
    }
}
