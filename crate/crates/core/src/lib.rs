//! Knowledge-infused hate speech classification toolkit.
//!
//! The crate is organised around the stages of a small research pipeline:
//!
//! - [`kg`]: a typed knowledge graph of group-specific history and language,
//!   loaded from a flat JSON map of entry names to records.
//! - [`infusion`]: gazetteer matching of document n-grams against graph keys,
//!   rendering matched entries as a context prefix followed by `[SEP]`.
//! - [`corpus`]: labeled TSV/CSV corpora and tweet normalization.
//! - [`classifier`]: bag-of-words features and L2 logistic regression with
//!   cross-validated regularization.
//! - [`evaluation`]: seeded splits, classification metrics and the
//!   multi-seed baseline-vs-infused experiment runner.
//! - [`scorecard`]: embedding association tests against a list of
//!   stereotype criteria.
//!
//! Data-parallel loops (documents, CV folds, seeds, criteria) run on rayon
//! when the `parallel` feature is enabled and fall back to plain iteration
//! otherwise. Results are identical either way.

pub mod classifier;
pub mod corpus;
pub mod evaluation;
pub mod exec;
pub mod infusion;
pub mod kg;
pub mod scorecard;

pub use classifier::{fit_cv, predict, LinearModel, TrainConfig, Vocabulary};
pub use corpus::{
    load_corpus, preprocess, CorpusFormat, Document, LabeledCorpus, PreprocessConfig,
};
pub use evaluation::{
    auc_roc, compute_metrics, run_experiment, split, ExperimentConfig, MetricsReport,
};
pub use exec::Exec;
pub use infusion::{extract_ngrams, infuse, infuse_corpus, tokenize, InfusedDocument};
pub use kg::{graph_stats, load_graph, validate_graph, Entry, EntryType, KnowledgeGraph};
pub use scorecard::{association_score, evaluate_scorecard, Criterion, EmbeddingTable};
