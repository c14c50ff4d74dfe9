use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::corpus::LabeledCorpus;

#[derive(Debug, Error, PartialEq)]
#[error("train fraction must lie in (0, 1], got {0}")]
pub struct InvalidFraction(pub f64);

/// Train/test partition parameters. Not stratified: a plain seeded shuffle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitConfig {
    train_fraction: f64,
    pub seed: u64,
}

impl SplitConfig {
    pub fn new(train_fraction: f64, seed: u64) -> Result<Self, InvalidFraction> {
        if train_fraction > 0.0 && train_fraction <= 1.0 {
            Ok(SplitConfig {
                train_fraction,
                seed,
            })
        } else {
            Err(InvalidFraction(train_fraction))
        }
    }

    pub fn train_fraction(&self) -> f64 {
        self.train_fraction
    }

    /// `floor(fraction * n)`. The small offset absorbs products such as
    /// `0.29 * 100 = 28.999999999999996`.
    pub fn train_size(&self, n: usize) -> usize {
        ((self.train_fraction * n as f64 + 1e-9).floor() as usize).min(n)
    }
}

/// Shuffled positions split into a train prefix and a test remainder.
pub fn split_indices(n: usize, cfg: &SplitConfig) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(cfg.seed));
    let test = idx.split_off(cfg.train_size(n));
    (idx, test)
}

pub fn split(corpus: &LabeledCorpus, cfg: &SplitConfig) -> (LabeledCorpus, LabeledCorpus) {
    let (train, test) = split_indices(corpus.len(), cfg);
    (corpus.select(&train), corpus.select(&test))
}
