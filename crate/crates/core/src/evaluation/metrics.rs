use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("length mismatch: {labels} labels, {other} {what}")]
    LengthMismatch {
        labels: usize,
        other: usize,
        what: &'static str,
    },
    #[error("no documents to evaluate")]
    EmptyInput,
    #[error("AUC needs both positive and negative labels")]
    OneClassOnly,
}

/// Conventions applied when a metric's denominator is zero. The metric is
/// then reported as 0 (AUC as 0.5) and the flag is set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum DegenerateFlag {
    PrecisionUndefined,
    RecallUndefined,
    SpecificityUndefined,
    F1Undefined,
    AucUndefined,
}

impl fmt::Display for DegenerateFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

fn ratio(num: usize, den: usize) -> (f64, bool) {
    if den == 0 {
        (0.0, false)
    } else {
        (num as f64 / den as f64, true)
    }
}

impl ConfusionCounts {
    pub fn from_predictions(labels: &[bool], predicted: &[bool]) -> Self {
        let mut c = ConfusionCounts::default();
        for (&l, &p) in labels.iter().zip(predicted) {
            c.record(l, p);
        }
        c
    }

    pub fn record(&mut self, label: bool, predicted: bool) {
        match (label, predicted) {
            (true, true) => self.tp += 1,
            (false, true) => self.fp += 1,
            (true, false) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// Each of the following returns `(value, defined)`.
    pub fn precision(&self) -> (f64, bool) {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> (f64, bool) {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn specificity(&self) -> (f64, bool) {
        ratio(self.tn, self.tn + self.fp)
    }

    pub fn accuracy(&self) -> (f64, bool) {
        ratio(self.tp + self.tn, self.total())
    }

    /// Harmonic mean of precision and recall, evaluated as
    /// `2tp / (2tp + fp + fn)` to avoid compounding rounding. Flagged
    /// whenever `tp = 0`, where precision + recall is zero or undefined.
    pub fn f1(&self) -> (f64, bool) {
        if self.tp == 0 {
            return (0.0, false);
        }
        ratio(2 * self.tp, 2 * self.tp + self.fp + self.fn_)
    }

    pub fn balanced_accuracy(&self) -> f64 {
        (self.recall().0 + self.specificity().0) / 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub f1: f64,
    pub accuracy: f64,
    pub balanced_accuracy: f64,
    pub recall: f64,
    pub precision: f64,
    pub aucroc: f64,
    pub flags: BTreeSet<DegenerateFlag>,
    pub counts: ConfusionCounts,
}

impl MetricsReport {
    /// The six metrics in report column order.
    pub fn values(&self) -> [f64; 6] {
        [
            self.f1,
            self.accuracy,
            self.balanced_accuracy,
            self.recall,
            self.precision,
            self.aucroc,
        ]
    }

    /// Field-wise arithmetic mean. Flags are unioned and counts summed.
    pub fn mean<'a, I>(reports: I) -> Option<MetricsReport>
    where
        I: IntoIterator<Item = &'a MetricsReport>,
    {
        let mut sum = [0.0; 6];
        let mut flags = BTreeSet::new();
        let mut counts = ConfusionCounts::default();
        let mut n = 0usize;
        for r in reports {
            for (s, v) in sum.iter_mut().zip(r.values()) {
                *s += v;
            }
            flags.extend(r.flags.iter().copied());
            counts.tp += r.counts.tp;
            counts.fp += r.counts.fp;
            counts.fn_ += r.counts.fn_;
            counts.tn += r.counts.tn;
            n += 1;
        }
        if n == 0 {
            return None;
        }
        let m = sum.map(|s| s / n as f64);
        Some(MetricsReport {
            f1: m[0],
            accuracy: m[1],
            balanced_accuracy: m[2],
            recall: m[3],
            precision: m[4],
            aucroc: m[5],
            flags,
            counts,
        })
    }
}

/// Area under the ROC curve as the Mann-Whitney statistic: the probability
/// that a random positive scores above a random negative, ties counting
/// one half. Computed from average ranks in `O(n log n)`.
pub fn auc_roc(labels: &[bool], scores: &[f64]) -> Result<f64, MetricsError> {
    if labels.len() != scores.len() {
        return Err(MetricsError::LengthMismatch {
            labels: labels.len(),
            other: scores.len(),
            what: "scores",
        });
    }
    let pos = labels.iter().filter(|&&l| l).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(MetricsError::OneClassOnly);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Sum of 1-based ranks of the positives, tied groups sharing their mean rank.
    // Ranks are kept doubled so every partial sum is an integer.
    let mut rank_sum_x2: u128 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && scores[order[j]].total_cmp(&scores[order[i]]).is_eq() {
            j += 1;
        }
        let group_rank_x2 = (i + 1 + j) as u128;
        let group_pos = order[i..j].iter().filter(|&&k| labels[k]).count() as u128;
        rank_sum_x2 += group_rank_x2 * group_pos;
        i = j;
    }
    let pos_u = pos as u128;
    let u_x2 = rank_sum_x2 - pos_u * (pos_u + 1);
    Ok(u_x2 as f64 / (2.0 * pos as f64 * neg as f64))
}

/// All six metrics for one evaluation run.
pub fn compute_metrics(
    labels: &[bool],
    predicted: &[bool],
    scores: &[f64],
) -> Result<MetricsReport, MetricsError> {
    if labels.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    for (other, what) in [(predicted.len(), "predictions"), (scores.len(), "scores")] {
        if other != labels.len() {
            return Err(MetricsError::LengthMismatch {
                labels: labels.len(),
                other,
                what,
            });
        }
    }
    let counts = ConfusionCounts::from_predictions(labels, predicted);
    let mut flags = BTreeSet::new();
    let mut take = |(v, ok): (f64, bool), flag| {
        if !ok {
            flags.insert(flag);
        }
        v
    };
    let precision = take(counts.precision(), DegenerateFlag::PrecisionUndefined);
    let recall = take(counts.recall(), DegenerateFlag::RecallUndefined);
    take(counts.specificity(), DegenerateFlag::SpecificityUndefined);
    let f1 = take(counts.f1(), DegenerateFlag::F1Undefined);
    let aucroc = match auc_roc(labels, scores) {
        Ok(v) => v,
        Err(_) => {
            flags.insert(DegenerateFlag::AucUndefined);
            0.5
        }
    };
    Ok(MetricsReport {
        f1,
        accuracy: counts.accuracy().0,
        balanced_accuracy: counts.balanced_accuracy(),
        recall,
        precision,
        aucroc,
        flags,
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_auc(labels: &[bool], scores: &[f64]) -> f64 {
        let mut wins = 0.0;
        let mut pairs = 0.0;
        for (i, &li) in labels.iter().enumerate() {
            for (j, &lj) in labels.iter().enumerate() {
                if li && !lj {
                    pairs += 1.0;
                    if scores[i] > scores[j] {
                        wins += 1.0;
                    } else if scores[i] == scores[j] {
                        wins += 0.5;
                    }
                }
            }
        }
        wins / pairs
    }

    #[test]
    fn auc_fixture() {
        let labels = [false, false, true, true];
        assert_eq!(auc_roc(&labels, &[0.1, 0.4, 0.35, 0.8]).unwrap(), 0.75);
        assert_eq!(auc_roc(&labels, &[0.1, 0.2, 0.3, 0.4]).unwrap(), 1.0);
        assert_eq!(auc_roc(&labels, &[0.3; 4]).unwrap(), 0.5);
        assert_eq!(
            auc_roc(&[true, true], &[0.1, 0.2]),
            Err(MetricsError::OneClassOnly)
        );
        assert!(matches!(
            auc_roc(&[true], &[]),
            Err(MetricsError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn perfect_predictions() {
        let labels = [true, false, true, false];
        let r = compute_metrics(&labels, &labels, &[0.9, 0.1, 0.8, 0.2]).unwrap();
        assert_eq!(r.values(), [1.0; 6]);
        assert!(r.flags.is_empty());
    }

    #[test]
    fn all_negative_predictions() {
        let labels = [true, false, true, false];
        let r = compute_metrics(&labels, &[false; 4], &[0.1; 4]).unwrap();
        assert_eq!(r.recall, 0.0);
        assert_eq!(r.precision, 0.0);
        assert_eq!(r.f1, 0.0);
        assert_eq!(r.balanced_accuracy, 0.5);
        assert!(r.flags.contains(&DegenerateFlag::PrecisionUndefined));
        assert!(r.flags.contains(&DegenerateFlag::F1Undefined));
    }

    #[test]
    fn one_of_each_cell() {
        let labels = [true, false, true, false];
        let preds = [true, true, false, false];
        let r = compute_metrics(&labels, &preds, &[0.9, 0.8, 0.2, 0.1]).unwrap();
        assert_eq!(
            r.counts,
            ConfusionCounts {
                tp: 1,
                fp: 1,
                fn_: 1,
                tn: 1
            }
        );
        for v in [r.accuracy, r.precision, r.recall, r.f1, r.balanced_accuracy] {
            assert_eq!(v, 0.5);
        }
    }

    #[test]
    fn input_errors() {
        assert_eq!(
            compute_metrics(&[], &[], &[]),
            Err(MetricsError::EmptyInput)
        );
        assert!(matches!(
            compute_metrics(&[true], &[true, false], &[0.5]),
            Err(MetricsError::LengthMismatch {
                what: "predictions",
                ..
            })
        ));
        let r = compute_metrics(&[true, true], &[true, false], &[0.9, 0.1]).unwrap();
        assert!(r.flags.contains(&DegenerateFlag::AucUndefined));
        assert!(r.flags.contains(&DegenerateFlag::SpecificityUndefined));
    }

    fn labeled_scores() -> impl Strategy<Value = (Vec<bool>, Vec<f64>)> {
        (2usize..60).prop_flat_map(|n| {
            (
                proptest::collection::vec(any::<bool>(), n),
                proptest::collection::vec((0u8..12).prop_map(|v| f64::from(v) / 4.0), n),
            )
        })
    }

    proptest! {
        #[test]
        fn auc_equals_brute_force((labels, scores) in labeled_scores()) {
            prop_assume!(labels.iter().any(|&l| l) && labels.iter().any(|&l| !l));
            let fast = auc_roc(&labels, &scores).unwrap();
            prop_assert!((fast - brute_auc(&labels, &scores)).abs() <= 1e-12);
        }

        #[test]
        fn auc_invariant_under_monotone_transform((labels, scores) in labeled_scores()) {
            prop_assume!(labels.iter().any(|&l| l) && labels.iter().any(|&l| !l));
            let transformed: Vec<f64> = scores.iter().map(|s| (3.0 * s).exp() - 7.0).collect();
            prop_assert_eq!(auc_roc(&labels, &scores).unwrap(), auc_roc(&labels, &transformed).unwrap());
        }

        #[test]
        fn balanced_accuracy_identity(tp in 0usize..50, fp in 0usize..50, fn_ in 0usize..50, tn in 0usize..50) {
            let c = ConfusionCounts { tp, fp, fn_, tn };
            prop_assert_eq!(c.balanced_accuracy(), (c.recall().0 + c.specificity().0) / 2.0);
        }

        #[test]
        fn accuracy_permutation_invariant(pairs in proptest::collection::vec((any::<bool>(), any::<bool>()), 1..40), rot in 0usize..40) {
            let (labels, preds): (Vec<bool>, Vec<bool>) = pairs.iter().copied().unzip();
            let mut rotated = pairs.clone();
            let k = rot % rotated.len();
            rotated.rotate_left(k);
            rotated.reverse();
            let (l2, p2): (Vec<bool>, Vec<bool>) = rotated.into_iter().unzip();
            let a = compute_metrics(&labels, &preds, &vec![0.0; labels.len()]).unwrap().accuracy;
            let b = compute_metrics(&l2, &p2, &vec![0.0; l2.len()]).unwrap().accuracy;
            prop_assert_eq!(a, b);
        }
    }
}
