//! Evaluation metrics: AUROC with midrank tie handling, step-interpolated
//! AUPRC, thresholded accuracy, and Pearson correlation.

use crate::error::{GppError, Result};

/// Scores paired with binary labels.
#[derive(Debug, Clone)]
pub struct ScoredLabels {
    scores: Vec<f64>,
    labels: Vec<u8>,
}

impl ScoredLabels {
    pub fn new(scores: Vec<f64>, labels: Vec<u8>) -> Result<Self> {
        if scores.len() != labels.len() || scores.is_empty() {
            return Err(GppError::InvalidInput(
                "scores and labels must have equal nonzero length".into(),
            ));
        }
        if labels.iter().any(|&y| y > 1) {
            return Err(GppError::InvalidInput("labels must be 0 or 1".into()));
        }
        if scores.iter().any(|s| !s.is_finite()) {
            return Err(GppError::InvalidInput("scores must be finite".into()));
        }
        Ok(Self { scores, labels })
    }

    fn n_pos(&self) -> usize {
        self.labels.iter().filter(|&&y| y == 1).count()
    }
}

/// Area under the ROC curve, computed from midranks: the probability that a
/// random positive outscores a random negative, ties counting one half.
pub fn auroc(sl: &ScoredLabels) -> Result<f64> {
    let n_pos = sl.n_pos();
    let n_neg = sl.labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(GppError::InvalidInput("auroc requires both classes present".into()));
    }
    let mut order: Vec<usize> = (0..sl.scores.len()).collect();
    order.sort_by(|&i, &j| sl.scores[i].total_cmp(&sl.scores[j]));

    // Midranks over tie groups, 1-based.
    let mut ranks = vec![0.0; sl.scores.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && sl.scores[order[j + 1]] == sl.scores[order[i]] {
            j += 1;
        }
        let midrank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = midrank;
        }
        i = j + 1;
    }
    let rank_sum_pos: f64 = ranks
        .iter()
        .zip(&sl.labels)
        .filter(|(_, &y)| y == 1)
        .map(|(r, _)| r)
        .sum();
    let u = rank_sum_pos - n_pos as f64 * (n_pos as f64 + 1.0) / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

/// Area under the precision-recall curve with step-wise interpolation:
/// `sum (R_i - R_{i-1}) P_i` over thresholds descending through the distinct
/// score values.
pub fn auprc(sl: &ScoredLabels) -> Result<f64> {
    let n_pos = sl.n_pos();
    if n_pos == 0 {
        return Err(GppError::InvalidInput("auprc requires at least one positive".into()));
    }
    let mut order: Vec<usize> = (0..sl.scores.len()).collect();
    order.sort_by(|&i, &j| sl.scores[j].total_cmp(&sl.scores[i]));

    let mut area = 0.0;
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut prev_recall = 0.0;
    let mut i = 0;
    while i < order.len() {
        // Consume a whole tie group before evaluating the operating point.
        let mut j = i;
        while j + 1 < order.len() && sl.scores[order[j + 1]] == sl.scores[order[i]] {
            j += 1;
        }
        for &idx in &order[i..=j] {
            if sl.labels[idx] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
        }
        let recall = tp as f64 / n_pos as f64;
        let precision = tp as f64 / (tp + fp) as f64;
        area += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j + 1;
    }
    Ok(area)
}

/// Fraction of rows with `(score >= threshold) == label`.
pub fn accuracy(sl: &ScoredLabels, threshold: f64) -> f64 {
    let correct = sl
        .scores
        .iter()
        .zip(&sl.labels)
        .filter(|(&s, &y)| u8::from(s >= threshold) == y)
        .count();
    correct as f64 / sl.labels.len() as f64
}

/// Sample Pearson correlation; errors when either sequence is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(GppError::InvalidInput(
            "pearson requires equal-length sequences of at least 2".into(),
        ));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
        sxy += (a - mx) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(GppError::UndefinedMetric(
            "pearson correlation of a constant sequence".into(),
        ));
    }
    Ok(sxy / (sxx * syy).sqrt())
}
