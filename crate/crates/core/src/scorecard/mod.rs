//! Stereotype scorecard over word embeddings.
//!
//! Each [`Criterion`] names a stereotype through three word lists. A model
//! "agrees" with the stereotype when the attribute words sit measurably
//! closer to the target group words than to the baseline words:
//!
//! ```text
//! score = mean over attributes a of [ mean_t cos(a, t) - mean_b cos(a, b) ]
//! ```
//!
//! Significance comes from a one-sided permutation test that reshuffles
//! which embedded words count as target and which as baseline.

mod embedding;

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Exec;

pub use embedding::{cosine, EmbeddingTable};

/// The bundled 14-criterion scorecard. Word lists are editable defaults.
pub const DEFAULT_SPEC: &str = include_str!("../../data/default_scorecard.json");

#[derive(Debug, Error)]
pub enum ScorecardError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("vector for {word:?} has {found} components, table has {expected}")]
    DimensionMismatch {
        word: String,
        expected: usize,
        found: usize,
    },
    #[error("criterion {criterion}: no {list} word has a usable vector")]
    AllWordsMissing { criterion: u32, list: &'static str },
    #[error("invalid scorecard spec: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Criterion {
    pub id: u32,
    pub name: String,
    pub target_words: Vec<String>,
    pub baseline_words: Vec<String>,
    pub attribute_words: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SpecFile {
    criteria: Vec<Criterion>,
}

/// Parses a JSON scorecard document `{"criteria": [...]}` and checks that
/// ids are unique and every word list is non-empty.
pub fn parse_spec(json: &str) -> Result<Vec<Criterion>, ScorecardError> {
    let spec: SpecFile =
        serde_json::from_str(json).map_err(|e| ScorecardError::InvalidSpec(e.to_string()))?;
    let mut ids = HashSet::new();
    for c in &spec.criteria {
        if !ids.insert(c.id) {
            return Err(ScorecardError::InvalidSpec(format!(
                "duplicate criterion id {}",
                c.id
            )));
        }
        for (list, words) in [
            ("target_words", &c.target_words),
            ("baseline_words", &c.baseline_words),
            ("attribute_words", &c.attribute_words),
        ] {
            if words.is_empty() {
                return Err(ScorecardError::InvalidSpec(format!(
                    "criterion {}: {list} is empty",
                    c.id
                )));
            }
        }
    }
    Ok(spec.criteria)
}

pub fn load_spec(path: impl AsRef<Path>) -> Result<Vec<Criterion>, ScorecardError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| ScorecardError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    parse_spec(&text)
}

pub fn default_spec() -> Vec<Criterion> {
    parse_spec(DEFAULT_SPEC).expect("bundled scorecard is valid")
}

/// Embedded vectors for a criterion, plus the words that had none.
struct Resolved<'a> {
    target: Vec<&'a [f64]>,
    baseline: Vec<&'a [f64]>,
    attribute: Vec<&'a [f64]>,
    skipped: Vec<String>,
}

fn resolve<'a>(
    emb: &'a EmbeddingTable,
    c: &Criterion,
) -> Result<Resolved<'a>, (ScorecardError, Vec<String>)> {
    let mut skipped = Vec::new();
    let mut lookup = |words: &[String]| -> Vec<&'a [f64]> {
        words
            .iter()
            .filter_map(|w| {
                let v = emb.usable(w);
                if v.is_none() {
                    skipped.push(w.clone());
                }
                v
            })
            .collect()
    };
    let target = lookup(&c.target_words);
    let baseline = lookup(&c.baseline_words);
    let attribute = lookup(&c.attribute_words);
    for (list, vs) in [
        ("target", &target),
        ("baseline", &baseline),
        ("attribute", &attribute),
    ] {
        if vs.is_empty() {
            return Err((
                ScorecardError::AllWordsMissing {
                    criterion: c.id,
                    list,
                },
                skipped,
            ));
        }
    }
    Ok(Resolved {
        target,
        baseline,
        attribute,
        skipped,
    })
}

fn mean_cosine(a: &[f64], set: &[&[f64]]) -> f64 {
    set.iter().map(|v| cosine(a, v)).sum::<f64>() / set.len() as f64
}

fn score_resolved(r: &Resolved<'_>) -> f64 {
    r.attribute
        .iter()
        .map(|a| mean_cosine(a, &r.target) - mean_cosine(a, &r.baseline))
        .sum::<f64>()
        / r.attribute.len() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct Association {
    pub score: f64,
    /// Words without a usable vector, in list order.
    pub skipped_words: Vec<String>,
}

/// Difference of mean cosine similarities. Words without a (non-zero)
/// vector are skipped and reported; a list with no usable word is an error.
pub fn association_score(
    emb: &EmbeddingTable,
    c: &Criterion,
) -> Result<Association, ScorecardError> {
    let r = resolve(emb, c).map_err(|(e, _)| e)?;
    Ok(Association {
        score: score_resolved(&r),
        skipped_words: r.skipped,
    })
}

/// One-sided permutation p-value `(1 + #{perm >= observed}) / (1 + permutations)`.
fn permutation_p_value(
    r: &Resolved<'_>,
    observed: f64,
    permutations: usize,
    rng: &mut ChaCha8Rng,
) -> f64 {
    // Per pooled word, its mean similarity to the attributes; the statistic
    // for any relabelling is then a difference of two means over this vector.
    let pool: Vec<f64> = r
        .target
        .iter()
        .chain(&r.baseline)
        .map(|w| r.attribute.iter().map(|a| cosine(a, w)).sum::<f64>() / r.attribute.len() as f64)
        .collect();
    let nt = r.target.len();
    let nb = r.baseline.len();
    let mut order: Vec<usize> = (0..pool.len()).collect();
    let mut hits = 0usize;
    for _ in 0..permutations {
        order.shuffle(rng);
        let t: f64 = order[..nt].iter().map(|&i| pool[i]).sum::<f64>() / nt as f64;
        let b: f64 = order[nt..].iter().map(|&i| pool[i]).sum::<f64>() / nb as f64;
        if t - b >= observed - 1e-12 {
            hits += 1;
        }
    }
    (hits + 1) as f64 / (permutations + 1) as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScorecardConfig {
    /// Minimum association score for agreement.
    pub threshold: f64,
    /// Significance level for agreement.
    pub alpha: f64,
    pub permutations: usize,
    pub seed: u64,
    pub exec: Exec,
}

impl Default for ScorecardConfig {
    fn default() -> Self {
        ScorecardConfig {
            threshold: 0.05,
            alpha: 0.05,
            permutations: 10_000,
            seed: 0,
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CriterionOutcome {
    Scored {
        score: f64,
        p_value: f64,
        agrees: bool,
    },
    Skipped {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub outcome: CriterionOutcome,
    pub skipped_words: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScorecardReport {
    pub entries: Vec<CriterionResult>,
}

impl ScorecardReport {
    pub fn scored(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| matches!(e.outcome, CriterionOutcome::Scored { .. }))
            .count()
    }

    pub fn skipped(&self) -> usize {
        self.entries.len() - self.scored()
    }

    /// Agreeing criteria; skipped ones count toward neither side.
    pub fn agreed(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| matches!(e.outcome, CriterionOutcome::Scored { agrees: true, .. }))
            .count()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "id",
            "name",
            "status",
            "score",
            "p_value",
            "agrees",
            "skipped_words",
        ])
        .unwrap();
        for e in &self.entries {
            let (status, score, p, agrees) = match &e.outcome {
                CriterionOutcome::Scored {
                    score,
                    p_value,
                    agrees,
                } => (
                    "scored".to_string(),
                    score.to_string(),
                    p_value.to_string(),
                    agrees.to_string(),
                ),
                CriterionOutcome::Skipped { reason } => (
                    format!("skipped: {reason}"),
                    String::new(),
                    String::new(),
                    String::new(),
                ),
            };
            w.write_record([
                e.id.to_string(),
                e.name.clone(),
                status,
                score,
                p,
                agrees,
                e.skipped_words.join(";"),
            ])
            .unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }

    pub fn to_table(&self) -> String {
        let name_w = self
            .entries
            .iter()
            .map(|e| e.name.len())
            .max()
            .unwrap_or(0)
            .max(9);
        let mut out = String::new();
        writeln!(
            out,
            "{:>3} | {:<name_w$} | {:>8} | {:>7} | Agrees",
            "ID", "Criterion", "Score", "p"
        )
        .unwrap();
        writeln!(out, "{}", "-".repeat(name_w + 37)).unwrap();
        for e in &self.entries {
            match &e.outcome {
                CriterionOutcome::Scored {
                    score,
                    p_value,
                    agrees,
                } => writeln!(
                    out,
                    "{:>3} | {:<name_w$} | {:>8.4} | {:>7.4} | {}",
                    e.id,
                    e.name,
                    score,
                    p_value,
                    if *agrees { "yes" } else { "no" }
                ),
                CriterionOutcome::Skipped { reason } => {
                    writeln!(out, "{:>3} | {:<name_w$} | skipped: {reason}", e.id, e.name)
                }
            }
            .unwrap();
        }
        writeln!(
            out,
            "agrees with {} of {} scored criteria ({} skipped)",
            self.agreed(),
            self.scored(),
            self.skipped()
        )
        .unwrap();
        out
    }
}

fn evaluate_one(emb: &EmbeddingTable, c: &Criterion, cfg: &ScorecardConfig) -> CriterionResult {
    let (outcome, skipped_words) = match resolve(emb, c) {
        Ok(r) => {
            let score = score_resolved(&r);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(u64::from(c.id));
            let p_value = permutation_p_value(&r, score, cfg.permutations, &mut rng);
            let agrees = score > cfg.threshold && p_value < cfg.alpha;
            (
                CriterionOutcome::Scored {
                    score,
                    p_value,
                    agrees,
                },
                r.skipped,
            )
        }
        Err((e, skipped)) => (
            CriterionOutcome::Skipped {
                reason: e.to_string(),
            },
            skipped,
        ),
    };
    CriterionResult {
        id: c.id,
        name: c.name.clone(),
        outcome,
        skipped_words,
    }
}

/// Scores every criterion. Criteria whose word lists cannot be embedded are
/// marked skipped rather than failed. Permutation streams depend only on
/// `(seed, criterion id)`.
pub fn evaluate_scorecard(
    emb: &EmbeddingTable,
    criteria: &[Criterion],
    cfg: &ScorecardConfig,
) -> ScorecardReport {
    ScorecardReport {
        entries: cfg.exec.map(criteria, |c| evaluate_one(emb, c, cfg)),
    }
}
