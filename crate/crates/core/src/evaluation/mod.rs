//! Seeded splits, classification metrics, and the experiment runner.

mod experiment;
mod metrics;
mod split;

pub use experiment::{
    run_experiment, Arm, ExperimentConfig, ExperimentError, ExperimentReport, ExperimentRow,
    RowKind,
};
pub use metrics::{
    auc_roc, compute_metrics, ConfusionCounts, DegenerateFlag, MetricsError, MetricsReport,
};
pub use split::{split, split_indices, InvalidFraction, SplitConfig};
