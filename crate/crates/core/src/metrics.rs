//! ROC/AUC, thresholded confusion metrics and lift tables.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_lengths(scores: &[f64], labels: &[u8]) -> Result<()> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch(scores.len(), labels.len()));
    }
    Ok(())
}

/// Indices ordered by score ascending; NaN sorts last via `total_cmp`.
fn ascending(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    idx
}

/// Mann-Whitney AUC from midranks: the probability that a random positive
/// outscores a random negative, ties counting one half.
pub fn auc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    check_lengths(scores, labels)?;
    let n_pos = labels.iter().filter(|&&l| l == 1).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass);
    }
    let order = ascending(scores);
    // Twice the positive rank sum keeps midranks integral.
    let mut rank_sum2: u128 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        // ranks i+1 ..= j, midrank (i + 1 + j) / 2
        let mid2 = (i + 1 + j) as u128;
        let pos_in_group = order[i..j].iter().filter(|&&k| labels[k] == 1).count() as u128;
        rank_sum2 += mid2 * pos_in_group;
        i = j;
    }
    let np = n_pos as u128;
    let u2 = rank_sum2 - np * (np + 1);
    Ok(u2 as f64 / (2.0 * n_pos as f64 * n_neg as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    /// Score cutoff (predict positive when `score >= threshold`); `None` for
    /// the origin, which lies above every score.
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub auc: f64,
}

impl RocCurve {
    /// Trapezoidal area under the curve.
    pub fn trapezoid_area(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| (w[1].fpr - w[0].fpr) * (w[1].tpr + w[0].tpr) / 2.0)
            .sum()
    }
}

/// ROC curve with one point per distinct score, descending.
pub fn roc_curve(scores: &[f64], labels: &[u8]) -> Result<RocCurve> {
    let auc = auc(scores, labels)?;
    let n_pos = labels.iter().filter(|&&l| l == 1).count() as f64;
    let n_neg = labels.len() as f64 - n_pos;
    let mut order = ascending(scores);
    order.reverse();
    let mut points = Vec::with_capacity(order.len() + 1);
    points.push(RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: None,
    });
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint {
            fpr: fp as f64 / n_neg,
            tpr: tp as f64 / n_pos,
            threshold: Some(s),
        });
    }
    Ok(RocCurve { points, auc })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMetrics {
    pub threshold: f64,
    pub true_positives: usize,
    pub false_positives: usize,
    pub true_negatives: usize,
    pub false_negatives: usize,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Accuracy, precision, recall and F1 when predicting positive iff
/// `score >= threshold`. Precision is 0 with no predicted positives, recall
/// is 0 with no actual positives, and F1 is 0 when both are 0.
pub fn confusion_metrics(scores: &[f64], labels: &[u8], threshold: f64) -> Result<ConfusionMetrics> {
    check_lengths(scores, labels)?;
    if scores.is_empty() {
        return Err(Error::Empty);
    }
    let (mut tp, mut fp, mut tn, mut fn_) = (0, 0, 0, 0);
    for (&s, &l) in scores.iter().zip(labels) {
        match (s >= threshold, l == 1) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fn_ += 1,
        }
    }
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(ConfusionMetrics {
        threshold,
        true_positives: tp,
        false_positives: fp,
        true_negatives: tn,
        false_negatives: fn_,
        accuracy: ratio(tp + tn, scores.len()),
        precision,
        recall,
        f1,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftBin {
    pub bin: usize,
    pub n: usize,
    pub events: usize,
    pub response_rate: f64,
    pub cumulative_events: usize,
    pub cumulative_capture: f64,
    pub cumulative_lift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftTable {
    pub bins: Vec<LiftBin>,
    pub requested_groups: usize,
    /// True when more groups were requested than there are rows.
    pub clamped: bool,
}

/// Gains/lift table over `groups` contiguous bins of the rows ranked by
/// score descending (ties by original index). Bin sizes differ by at most
/// one, earlier bins taking the remainder.
pub fn lift_table(scores: &[f64], labels: &[u8], groups: usize) -> Result<LiftTable> {
    check_lengths(scores, labels)?;
    let n = scores.len();
    if n == 0 || groups == 0 {
        return Err(Error::Empty);
    }
    let total_events = labels.iter().filter(|&&l| l == 1).count();
    if total_events == 0 {
        return Err(Error::NoPositives);
    }
    let g = groups.min(n);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let base_rate = total_events as f64 / n as f64;
    let (size, extra) = (n / g, n % g);
    let mut bins = Vec::with_capacity(g);
    let (mut start, mut cum_n, mut cum_events) = (0, 0, 0);
    for b in 0..g {
        let len = size + usize::from(b < extra);
        let events = order[start..start + len].iter().filter(|&&i| labels[i] == 1).count();
        start += len;
        cum_n += len;
        cum_events += events;
        bins.push(LiftBin {
            bin: b + 1,
            n: len,
            events,
            response_rate: events as f64 / len as f64,
            cumulative_events: cum_events,
            cumulative_capture: cum_events as f64 / total_events as f64,
            cumulative_lift: (cum_events as f64 / cum_n as f64) / base_rate,
        });
    }
    Ok(LiftTable {
        bins,
        requested_groups: groups,
        clamped: groups > n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn auc_perfect_and_ties() {
        let labels = [0, 1, 0, 1, 1];
        let scores: Vec<f64> = labels.iter().map(|&l| f64::from(l)).collect();
        assert_eq!(auc(&scores, &labels).unwrap(), 1.0);
        assert_eq!(auc(&[0.3; 5], &labels).unwrap(), 0.5);
        assert_eq!(auc(&[1.0, 2.0], &[1, 1]), Err(Error::SingleClass));
    }

    #[test]
    fn roc_shapes() {
        let r = roc_curve(&[0.9, 0.8, 0.2, 0.1], &[1, 1, 0, 0]).unwrap();
        assert!(r.points.iter().any(|p| p.fpr == 0.0 && p.tpr == 1.0));
        let r = roc_curve(&[0.5; 4], &[1, 0, 1, 0]).unwrap();
        assert_eq!(r.points.len(), 2);
        assert_eq!(r.trapezoid_area(), 0.5);
        let last = r.points.last().unwrap();
        assert_eq!((last.fpr, last.tpr), (1.0, 1.0));
    }

    #[test]
    fn confusion_hand_counted() {
        // TP=3, FP=1, FN=1, TN=5
        let scores = [0.9, 0.8, 0.7, 0.6, 0.4, 0.3, 0.2, 0.1, 0.05, 0.01];
        let labels = [1, 1, 1, 0, 1, 0, 0, 0, 0, 0];
        let m = confusion_metrics(&scores, &labels, 0.5).unwrap();
        assert_eq!(
            (m.true_positives, m.false_positives, m.false_negatives, m.true_negatives),
            (3, 1, 1, 5)
        );
        assert!((m.precision - 0.75).abs() < 1e-12);
        assert!((m.recall - 0.75).abs() < 1e-12);
        assert!((m.accuracy - 0.8).abs() < 1e-12);
        assert!((m.f1 - 0.75).abs() < 1e-12);
    }

    #[test]
    fn confusion_degenerate() {
        let m = confusion_metrics(&[0.1, 0.2], &[1, 0], 0.5).unwrap();
        assert_eq!((m.precision, m.recall, m.f1), (0.0, 0.0, 0.0));
        let m = confusion_metrics(&[1.0, 0.0, 1.0], &[1, 0, 1], 0.5).unwrap();
        assert_eq!((m.accuracy, m.precision, m.recall, m.f1), (1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn lift_perfect_two_groups() {
        let labels = vec![1, 0, 1, 0, 1, 0];
        let scores: Vec<f64> = labels.iter().map(|&l| f64::from(l)).collect();
        let t = lift_table(&scores, &labels, 2).unwrap();
        assert_eq!(t.bins[0].cumulative_lift, 2.0);
        assert_eq!(t.bins[1].cumulative_lift, 1.0);
    }

    #[test]
    fn lift_partition_303_by_50() {
        let labels: Vec<u8> = (0..303).map(|i| u8::from(i % 3 == 0)).collect();
        let scores: Vec<f64> = (0..303).map(|i| f64::from((i * 37) % 101)).collect();
        let t = lift_table(&scores, &labels, 50).unwrap();
        assert_eq!(t.bins.len(), 50);
        assert!(t.bins.iter().all(|b| b.n == 6 || b.n == 7));
        assert_eq!(t.bins.iter().map(|b| b.n).sum::<usize>(), 303);
        // 303 = 50 * 6 + 3: the first three bins take the remainder
        assert_eq!(t.bins.iter().filter(|b| b.n == 7).count(), 3);
    }

    #[test]
    fn lift_clamps_groups() {
        let t = lift_table(&[0.1, 0.9], &[0, 1], 5).unwrap();
        assert!(t.clamped);
        assert_eq!(t.bins.len(), 2);
    }
}
