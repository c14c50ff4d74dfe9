//! Bag-of-words logistic regression with cross-validated regularization.
//!
//! [`fit_cv`] builds a vocabulary from the training texts, scores every
//! candidate inverse regularization strength `c` by mean F1 over stratified
//! folds, picks the best (ties go to the smaller `c`, the stronger penalty)
//! and refits on all documents.

mod features;
pub mod objective;
mod persist;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::corpus::LabeledCorpus;
use crate::evaluation::ConfusionCounts;
use crate::exec::Exec;

pub use features::{featurize, FeatureVector, Vocabulary};
pub use objective::{sigmoid, Problem, Solution, SolverConfig};
pub use persist::ModelError;

#[derive(Debug, Error, PartialEq)]
pub enum TrainError {
    #[error("training data must contain both labels ({positives} positive of {total})")]
    SingleClass { positives: usize, total: usize },
    #[error("invalid training configuration: {0}")]
    Config(String),
}

/// `n` logarithmically spaced values from `10^lo` to `10^hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![10f64.powf(lo)],
        _ => (0..n)
            .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / (n - 1) as f64))
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Candidate inverse regularization strengths, any order.
    pub candidates: Vec<f64>,
    pub folds: usize,
    pub solver: SolverConfig,
    /// Decision threshold used when scoring folds.
    pub threshold: f64,
    pub exec: Exec,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            candidates: log_grid(-4.0, 4.0, 10),
            folds: 5,
            solver: SolverConfig::default(),
            threshold: 0.5,
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingMeta {
    pub seed: u64,
    pub folds: usize,
    /// Candidate grid, ascending.
    pub grid: Vec<f64>,
    /// Mean held-out F1 per grid entry; empty when no CV was run.
    pub cv_f1: Vec<f64>,
    pub iterations: usize,
    /// False when the final fit stopped before reaching the tolerance.
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub vocabulary: Vocabulary,
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Chosen inverse regularization strength.
    pub regularization: f64,
    pub meta: TrainingMeta,
}

/// A probability and the thresholded label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub probability: f64,
    pub label: bool,
}

// Largest f64 below one; keeps probabilities strictly inside (0, 1).
const P_MAX: f64 = 1.0 - f64::EPSILON / 2.0;

fn probability(z: f64) -> f64 {
    sigmoid(z).clamp(f64::MIN_POSITIVE, P_MAX)
}

impl LinearModel {
    /// A model with all-zero weights and the given bias.
    pub fn zeros(vocabulary: Vocabulary, bias: f64) -> Self {
        let weights = vec![0.0; vocabulary.len()];
        LinearModel {
            vocabulary,
            weights,
            bias,
            regularization: 1.0,
            meta: TrainingMeta {
                seed: 0,
                folds: 0,
                grid: vec![1.0],
                cv_f1: Vec::new(),
                iterations: 0,
                converged: false,
            },
        }
    }

    /// Vocabulary size plus the bias.
    pub fn parameter_count(&self) -> usize {
        self.weights.len() + 1
    }

    pub fn decision_value(&self, features: &FeatureVector) -> f64 {
        features.dot(&self.weights) + self.bias
    }

    pub fn predict_features(&self, features: &FeatureVector, threshold: f64) -> Prediction {
        let probability = probability(self.decision_value(features));
        Prediction {
            probability,
            label: probability >= threshold,
        }
    }

    pub fn predict(&self, text: &str, threshold: f64) -> Prediction {
        self.predict_features(&featurize(&self.vocabulary, text), threshold)
    }

    pub fn weight_norm(&self) -> f64 {
        self.weights.iter().map(|w| w * w).sum::<f64>().sqrt()
    }
}

/// `sigmoid(w.x + b)` over the text's features and the `>= threshold` label.
pub fn predict(model: &LinearModel, text: &str, threshold: f64) -> Prediction {
    model.predict(text, threshold)
}

fn check_classes(labels: &[bool]) -> Result<(), TrainError> {
    let positives = labels.iter().filter(|&&l| l).count();
    if positives == 0 || positives == labels.len() {
        return Err(TrainError::SingleClass {
            positives,
            total: labels.len(),
        });
    }
    Ok(())
}

/// Fold index per document. Each class is shuffled separately and dealt
/// round-robin, continuing the rotation from one class to the next.
pub fn stratified_folds(labels: &[bool], folds: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0; labels.len()];
    let mut next = 0;
    for class in [false, true] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(&mut rng);
        for i in idx {
            assignment[i] = next % folds;
            next += 1;
        }
    }
    assignment
}

fn solve(
    rows: &[FeatureVector],
    labels: &[bool],
    idx: &[usize],
    dim: usize,
    c: f64,
    solver: &SolverConfig,
) -> Solution {
    let problem = Problem::new(
        idx.iter().map(|&i| &rows[i]).collect(),
        idx.iter().map(|&i| labels[i]).collect(),
        dim,
        c,
    );
    objective::minimize(&problem, solver)
}

fn held_out_f1(
    rows: &[FeatureVector],
    labels: &[bool],
    assignment: &[usize],
    fold: usize,
    dim: usize,
    c: f64,
    config: &TrainConfig,
) -> f64 {
    let (test, train): (Vec<usize>, Vec<usize>) =
        (0..rows.len()).partition(|&i| assignment[i] == fold);
    let train_labels: Vec<bool> = train.iter().map(|&i| labels[i]).collect();
    if test.is_empty() || check_classes(&train_labels).is_err() {
        return 0.0;
    }
    let sol = solve(rows, labels, &train, dim, c, &config.solver);
    let (w, b) = sol.params.split_at(dim);
    let mut counts = ConfusionCounts::default();
    for &i in &test {
        let p = probability(rows[i].dot(w) + b[0]);
        counts.record(labels[i], p >= config.threshold);
    }
    counts.f1().0
}

fn validate_config(config: &TrainConfig) -> Result<Vec<f64>, TrainError> {
    if config.candidates.is_empty() {
        return Err(TrainError::Config("no regularization candidates".into()));
    }
    if config
        .candidates
        .iter()
        .any(|c| !(c.is_finite() && *c > 0.0))
    {
        return Err(TrainError::Config(
            "candidates must be positive and finite".into(),
        ));
    }
    if config.folds < 2 {
        return Err(TrainError::Config("at least two folds are required".into()));
    }
    let mut grid = config.candidates.clone();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    Ok(grid)
}

/// Trains with cross-validated regularization. Deterministic for a fixed
/// corpus, configuration and seed, whichever [`Exec`] mode is used.
pub fn fit_cv(
    corpus: &LabeledCorpus,
    config: &TrainConfig,
    seed: u64,
) -> Result<LinearModel, TrainError> {
    let labels = corpus.labels();
    check_classes(&labels)?;
    let grid = validate_config(config)?;

    let vocabulary = Vocabulary::build(corpus.docs().iter().map(|d| d.text.as_str()));
    let dim = vocabulary.len();
    let rows: Vec<FeatureVector> = config
        .exec
        .map(corpus.docs(), |d| featurize(&vocabulary, &d.text));

    let folds = config.folds.min(rows.len());
    let assignment = stratified_folds(&labels, folds, seed);
    let scores = config.exec.map_range(grid.len() * folds, |task| {
        let (ci, fold) = (task / folds, task % folds);
        held_out_f1(&rows, &labels, &assignment, fold, dim, grid[ci], config)
    });
    let cv_f1: Vec<f64> = scores
        .chunks(folds)
        .map(|fold_scores| fold_scores.iter().sum::<f64>() / folds as f64)
        .collect();

    let mut best = 0;
    for (i, &score) in cv_f1.iter().enumerate() {
        if score > cv_f1[best] {
            best = i;
        }
    }
    let c = grid[best];

    let all: Vec<usize> = (0..rows.len()).collect();
    let sol = solve(&rows, &labels, &all, dim, c, &config.solver);
    let bias = sol.params[dim];
    let mut weights = sol.params;
    weights.truncate(dim);

    Ok(LinearModel {
        vocabulary,
        weights,
        bias,
        regularization: c,
        meta: TrainingMeta {
            seed,
            folds,
            grid,
            cv_f1,
            iterations: sol.iterations,
            converged: sol.converged,
        },
    })
}

/// Trains at a fixed inverse regularization strength, without CV.
pub fn fit_fixed(
    corpus: &LabeledCorpus,
    c: f64,
    solver: &SolverConfig,
) -> Result<LinearModel, TrainError> {
    let labels = corpus.labels();
    check_classes(&labels)?;
    if !(c.is_finite() && c > 0.0) {
        return Err(TrainError::Config(
            "regularization must be positive and finite".into(),
        ));
    }
    let vocabulary = Vocabulary::build(corpus.docs().iter().map(|d| d.text.as_str()));
    let dim = vocabulary.len();
    let rows: Vec<FeatureVector> = corpus
        .docs()
        .iter()
        .map(|d| featurize(&vocabulary, &d.text))
        .collect();
    let all: Vec<usize> = (0..rows.len()).collect();
    let sol = solve(&rows, &labels, &all, dim, c, solver);
    let bias = sol.params[dim];
    let mut weights = sol.params;
    weights.truncate(dim);
    Ok(LinearModel {
        vocabulary,
        weights,
        bias,
        regularization: c,
        meta: TrainingMeta {
            seed: 0,
            folds: 0,
            grid: vec![c],
            cv_f1: Vec::new(),
            iterations: sol.iterations,
            converged: sol.converged,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;

    fn corpus(rows: &[(&str, bool)]) -> LabeledCorpus {
        rows.iter().map(|&(t, l)| Document::new(t, l)).collect()
    }

    #[test]
    fn default_grid() {
        let g = log_grid(-4.0, 4.0, 10);
        assert_eq!(g.len(), 10);
        assert!((g[0] - 1e-4).abs() < 1e-18);
        assert!((g[9] - 1e4).abs() < 1e-9);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn separable_pair_is_fit_exactly() {
        let c = corpus(&[("a", false), ("b", true)]);
        let model = fit_cv(&c, &TrainConfig::default(), 1).unwrap();
        assert!(!model.predict("a", 0.5).label);
        assert!(model.predict("b", 0.5).label);
        assert!(model.meta.grid.contains(&model.regularization));
        assert_eq!(model.parameter_count(), 3);
    }

    #[test]
    fn single_class_rejected() {
        let c = corpus(&[("a", false), ("b", false)]);
        assert_eq!(
            fit_cv(&c, &TrainConfig::default(), 0),
            Err(TrainError::SingleClass {
                positives: 0,
                total: 2
            })
        );
        assert!(fit_cv(&LabeledCorpus::default(), &TrainConfig::default(), 0).is_err());
    }

    #[test]
    fn zero_iterations_predict_half() {
        let c = corpus(&[("a x", false), ("b x", true), ("c", false)]);
        let cfg = TrainConfig {
            solver: SolverConfig {
                max_iter: 0,
                ..Default::default()
            },
            ..Default::default()
        };
        let model = fit_cv(&c, &cfg, 3).unwrap();
        for text in ["a x", "b x", "c", "unseen"] {
            assert_eq!(model.predict(text, 0.5).probability, 0.5);
        }
        assert!(!model.meta.converged);
    }

    #[test]
    fn predict_examples() {
        let vocab = Vocabulary::from_terms(vec!["w".into()]).unwrap();
        let model = LinearModel::zeros(vocab.clone(), 0.0);
        let p = model.predict("anything", 0.5);
        assert_eq!(p.probability, 0.5);
        assert!(p.label);

        let mut model = LinearModel::zeros(vocab.clone(), 0.0);
        model.weights[0] = 5.0;
        let p = model.predict("w w", 0.5);
        assert!((p.probability - 0.999_954_602_1).abs() < 1e-6);

        let model = LinearModel::zeros(vocab, -2.0);
        let p = model.predict("oov only", 0.5);
        assert!((p.probability - 0.119_202_922).abs() < 1e-6);
        assert!(!p.label);
    }

    #[test]
    fn probabilities_stay_open_interval() {
        let vocab = Vocabulary::from_terms(vec!["w".into()]).unwrap();
        let mut model = LinearModel::zeros(vocab, 0.0);
        model.weights[0] = 1e3;
        let hi = model.predict("w", 0.5).probability;
        model.weights[0] = -1e3;
        let lo = model.predict("w", 0.5).probability;
        assert!(hi < 1.0 && hi > 0.5);
        assert!(lo > 0.0 && lo < 0.5);
    }

    #[test]
    fn folds_are_stratified_and_seeded() {
        let labels: Vec<bool> = (0..50).map(|i| i % 5 == 0).collect();
        let a = stratified_folds(&labels, 5, 9);
        assert_eq!(a, stratified_folds(&labels, 5, 9));
        for f in 0..5 {
            let pos = (0..50).filter(|&i| a[i] == f && labels[i]).count();
            let all = a.iter().filter(|&&x| x == f).count();
            assert_eq!(pos, 2);
            assert_eq!(all, 10);
        }
    }

    #[test]
    fn stronger_penalty_shrinks_weights() {
        let c = corpus(&[
            ("bad word here", true),
            ("bad thing", true),
            ("nice day", false),
            ("nice word", false),
            ("a day here", false),
            ("bad day", true),
        ]);
        let solver = SolverConfig {
            tol: 1e-10,
            max_iter: 5000,
            memory: 10,
        };
        let norms: Vec<f64> = log_grid(-4.0, 1.0, 8)
            .into_iter()
            .map(|reg| fit_fixed(&c, reg, &solver).unwrap().weight_norm())
            .collect();
        assert!(norms.windows(2).all(|w| w[0] <= w[1] + 1e-9), "{norms:?}");
        assert!(norms[0] < 1e-3);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let c = corpus(&[
            ("bad word here", true),
            ("bad thing", true),
            ("nice day", false),
            ("nice word", false),
            ("a day here", false),
            ("bad day", true),
            ("ok then", false),
            ("fine day", false),
        ]);
        let seq = TrainConfig {
            exec: Exec::Sequential,
            ..Default::default()
        };
        let par = TrainConfig {
            exec: Exec::Parallel,
            ..Default::default()
        };
        let a = fit_cv(&c, &seq, 5).unwrap();
        let b = fit_cv(&c, &par, 5).unwrap();
        assert_eq!(a, b);
    }
}
