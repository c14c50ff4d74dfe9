//! Multi-seed comparison of a baseline classifier against one trained on
//! knowledge-infused text.

use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use super::metrics::{compute_metrics, MetricsReport};
use super::split::{split_indices, SplitConfig};
use crate::classifier::{featurize, fit_cv, TrainConfig};
use crate::corpus::{preprocess_corpus, LabeledCorpus, PreprocessConfig};
use crate::exec::Exec;
use crate::infusion::infuse_corpus_with;
use crate::kg::KnowledgeGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arm {
    Base,
    Kg,
}

impl fmt::Display for Arm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Arm::Base => "Base",
            Arm::Kg => "KG",
        })
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ExperimentError {
    #[error("at least one seed is required")]
    NoSeeds,
    #[error("corpus is empty")]
    EmptyCorpus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub split: f64,
    pub preprocess: PreprocessConfig,
    pub train: TrainConfig,
    pub threshold: f64,
    pub exec: Exec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            split: 0.8,
            preprocess: PreprocessConfig::default(),
            train: TrainConfig::default(),
            threshold: 0.5,
            exec: Exec::default(),
        }
    }
}

/// Which row of the report: one seed, or the mean over seeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RowKind {
    Seed(u64),
    Mean,
}

impl fmt::Display for RowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowKind::Seed(s) => write!(f, "{s}"),
            RowKind::Mean => f.write_str("Mean"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub arm: Arm,
    pub kind: RowKind,
    /// Metrics, or the reason this arm/seed could not be evaluated.
    pub outcome: Result<MetricsReport, String>,
    /// Chosen inverse regularization strength (seed rows only).
    pub regularization: Option<f64>,
}

/// Rows ordered by arm, then seed in the order given, with each arm's mean
/// row last.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub rows: Vec<ExperimentRow>,
}

const HEADER: [&str; 8] = [
    "Model",
    "Seed",
    "F1",
    "Accuracy",
    "Balanced Accuracy",
    "Recall",
    "Precision",
    "AUCROC",
];

impl ExperimentReport {
    pub fn mean(&self, arm: Arm) -> Option<&MetricsReport> {
        self.rows
            .iter()
            .find(|r| r.arm == arm && r.kind == RowKind::Mean)
            .and_then(|r| r.outcome.as_ref().ok())
    }

    /// Aligned text table, metrics to three decimals.
    pub fn to_table(&self) -> String {
        let mut cells: Vec<Vec<String>> = vec![HEADER.iter().map(|s| s.to_string()).collect()];
        for row in &self.rows {
            let mut line = vec![row.arm.to_string(), row.kind.to_string()];
            match &row.outcome {
                Ok(m) => line.extend(m.values().iter().map(|v| format!("{v:.3}"))),
                Err(e) => {
                    line.push(format!("error: {e}"));
                }
            }
            cells.push(line);
        }
        let widths: Vec<usize> = (0..HEADER.len())
            .map(|c| {
                cells
                    .iter()
                    .filter(|l| l.len() == HEADER.len())
                    .map(|l| l[c].len())
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let mut out = String::new();
        for (i, line) in cells.iter().enumerate() {
            let padded: Vec<String> = line
                .iter()
                .enumerate()
                .map(|(c, s)| {
                    if line.len() == HEADER.len() {
                        format!("{s:<w$}", w = widths[c])
                    } else {
                        s.clone()
                    }
                })
                .collect();
            writeln!(out, "{}", padded.join(" | ").trim_end()).unwrap();
            if i == 0 {
                let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
                writeln!(out, "{}", rule.join("-|-")).unwrap();
            }
        }
        out
    }

    /// One CSV record per row, full precision.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "model",
            "seed",
            "f1",
            "accuracy",
            "balanced_accuracy",
            "recall",
            "precision",
            "aucroc",
            "regularization",
            "flags",
            "error",
        ])
        .unwrap();
        for row in &self.rows {
            let mut rec = vec![row.arm.to_string(), row.kind.to_string()];
            match &row.outcome {
                Ok(m) => {
                    rec.extend(m.values().iter().map(|v| v.to_string()));
                    rec.push(
                        row.regularization
                            .map(|c| c.to_string())
                            .unwrap_or_default(),
                    );
                    rec.push(
                        m.flags
                            .iter()
                            .map(|f| f.to_string())
                            .collect::<Vec<_>>()
                            .join(";"),
                    );
                    rec.push(String::new());
                }
                Err(e) => {
                    rec.extend(std::iter::repeat_n(String::new(), 8));
                    rec.push(e.clone());
                }
            }
            w.write_record(&rec).unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }
}

fn evaluate_seed(
    corpus: &LabeledCorpus,
    seed: u64,
    cfg: &ExperimentConfig,
) -> (Result<MetricsReport, String>, Option<f64>) {
    let split_cfg = match SplitConfig::new(cfg.split, seed) {
        Ok(c) => c,
        Err(e) => return (Err(e.to_string()), None),
    };
    let (train_idx, test_idx) = split_indices(corpus.len(), &split_cfg);
    if test_idx.is_empty() {
        return (Err("test split is empty".into()), None);
    }
    let train = corpus.select(&train_idx);
    let test = corpus.select(&test_idx);
    let model = match fit_cv(&train, &cfg.train, seed) {
        Ok(m) => m,
        Err(e) => return (Err(e.to_string()), None),
    };
    let labels = test.labels();
    let (scores, predicted): (Vec<f64>, Vec<bool>) = test
        .docs()
        .iter()
        .map(|d| {
            let p = model.predict_features(&featurize(&model.vocabulary, &d.text), cfg.threshold);
            (p.probability, p.label)
        })
        .unzip();
    (
        compute_metrics(&labels, &predicted, &scores).map_err(|e| e.to_string()),
        Some(model.regularization),
    )
}

/// Runs every seed on the preprocessed corpus and, when a graph is given,
/// on the infused corpus too. Infusion happens on the raw text before
/// preprocessing and before splitting, so both arms see the same partition
/// for a given seed.
pub fn run_experiment(
    corpus: &LabeledCorpus,
    kg: Option<&KnowledgeGraph>,
    seeds: &[u64],
    cfg: &ExperimentConfig,
) -> Result<ExperimentReport, ExperimentError> {
    if seeds.is_empty() {
        return Err(ExperimentError::NoSeeds);
    }
    if corpus.is_empty() {
        return Err(ExperimentError::EmptyCorpus);
    }
    let mut arms = vec![(
        Arm::Base,
        preprocess_corpus(corpus, &cfg.preprocess, cfg.exec),
    )];
    if let Some(kg) = kg {
        let infused = infuse_corpus_with(kg, corpus, cfg.exec);
        arms.push((
            Arm::Kg,
            preprocess_corpus(&infused, &cfg.preprocess, cfg.exec),
        ));
    }

    let tasks: Vec<(usize, u64)> = (0..arms.len())
        .flat_map(|a| seeds.iter().map(move |&s| (a, s)))
        .collect();
    let results = cfg
        .exec
        .map(&tasks, |&(a, seed)| evaluate_seed(&arms[a].1, seed, cfg));

    let mut rows = Vec::with_capacity(tasks.len() + arms.len());
    for (a, (arm, _)) in arms.iter().enumerate() {
        let start = rows.len();
        for ((_, seed), (outcome, regularization)) in
            tasks.iter().zip(&results).filter(|((ta, _), _)| *ta == a)
        {
            rows.push(ExperimentRow {
                arm: *arm,
                kind: RowKind::Seed(*seed),
                outcome: outcome.clone(),
                regularization: *regularization,
            });
        }
        let mean =
            MetricsReport::mean(rows[start..].iter().filter_map(|r| r.outcome.as_ref().ok()))
                .ok_or_else(|| "no seed produced metrics".to_string());
        rows.push(ExperimentRow {
            arm: *arm,
            kind: RowKind::Mean,
            outcome: mean,
            regularization: None,
        });
    }
    Ok(ExperimentReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;
    use crate::kg::{Entry, EntryType};

    fn toy() -> LabeledCorpus {
        (0..60)
            .map(|i| {
                let pos = i % 4 == 0;
                let text = if pos {
                    format!("they are zzz{} doc {i}", i % 3)
                } else {
                    format!("a plain note number {i}")
                };
                Document::new(text, pos)
            })
            .collect()
    }

    fn cfg() -> ExperimentConfig {
        ExperimentConfig {
            train: TrainConfig {
                candidates: vec![0.1, 1.0, 10.0],
                folds: 3,
                ..Default::default()
            },
            ..Default::default()
        }
    }

    #[test]
    fn row_layout_both_arms() {
        let mut kg = KnowledgeGraph::new();
        kg.insert("zzz0", Entry::new(EntryType::Slur).with_description("slur"));
        let seeds = [42, 44, 46, 48, 50];
        let report = run_experiment(&toy(), Some(&kg), &seeds, &cfg()).unwrap();
        assert_eq!(report.rows.len(), 12);
        let labels: Vec<String> = report
            .rows
            .iter()
            .map(|r| format!("{} {}", r.arm, r.kind))
            .collect();
        assert_eq!(labels[0], "Base 42");
        assert_eq!(labels[5], "Base Mean");
        assert_eq!(labels[6], "KG 42");
        assert_eq!(labels[11], "KG Mean");

        let base: Vec<&MetricsReport> = report.rows[..5]
            .iter()
            .map(|r| r.outcome.as_ref().unwrap())
            .collect();
        let mean_f1 = base.iter().map(|m| m.f1).sum::<f64>() / 5.0;
        assert!((report.mean(Arm::Base).unwrap().f1 - mean_f1).abs() < 1e-15);
    }

    #[test]
    fn single_seed_mean_is_that_row() {
        let report = run_experiment(&toy(), None, &[7], &cfg()).unwrap();
        assert_eq!(report.rows.len(), 2);
        let row = report.rows[0].outcome.as_ref().unwrap();
        assert_eq!(report.mean(Arm::Base).unwrap().values(), row.values());
    }

    #[test]
    fn deterministic_and_mode_independent() {
        let seq = ExperimentConfig {
            exec: Exec::Sequential,
            ..cfg()
        };
        let mut seq_train = seq.clone();
        seq_train.train.exec = Exec::Sequential;
        let a = run_experiment(&toy(), None, &[1, 2], &seq_train).unwrap();
        let b = run_experiment(&toy(), None, &[1, 2], &cfg()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn errors_are_recorded_per_row() {
        let corpus: LabeledCorpus = (0..10)
            .map(|i| Document::new(format!("d{i}"), i == 0))
            .collect();
        let report = run_experiment(
            &corpus,
            None,
            &[1],
            &ExperimentConfig {
                split: 1.0,
                ..cfg()
            },
        )
        .unwrap();
        assert!(report.rows[0].outcome.is_err());
        assert!(report.rows[1].outcome.is_err());
        assert!(report.to_table().contains("error"));
        assert_eq!(
            run_experiment(&corpus, None, &[], &cfg()),
            Err(ExperimentError::NoSeeds)
        );
    }

    #[test]
    fn table_layout() {
        let report = run_experiment(&toy(), None, &[3], &cfg()).unwrap();
        let table = report.to_table();
        let first = table.lines().next().unwrap();
        assert!(first.starts_with("Model | Seed | F1"));
        assert!(first.ends_with("AUCROC"));
        assert_eq!(table.lines().count(), 4);
        assert_eq!(report.to_csv().lines().count(), 3);
    }
}
