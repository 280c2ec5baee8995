//! Accuracy, precision, recall and average precision, all as percentages.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::data::Sample;
use crate::dataset::predict_batched;
use crate::error::{Error, Result};
use crate::features::Rescale;
use crate::rnn::Model;

pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub ap: f64,
    pub threshold: f64,
}

fn check_lengths(probs: &[f64], labels: &[u8]) -> Result<()> {
    if probs.is_empty() || probs.len() != labels.len() {
        return Err(Error::InvalidArgument(format!(
            "need equal non-empty score and label lists (got {} and {})",
            probs.len(),
            labels.len()
        )));
    }
    Ok(())
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        100.0 * num as f64 / den as f64
    }
}

/// `(accuracy, precision, recall)` with prediction `prob >= tau`.
/// Precision is 0 when nothing is predicted positive, recall 0 when there are
/// no positives.
pub fn confusion_at_threshold(probs: &[f64], labels: &[u8], tau: f64) -> Result<(f64, f64, f64)> {
    check_lengths(probs, labels)?;
    let (mut tp, mut fp, mut tn, mut fneg) = (0usize, 0usize, 0usize, 0usize);
    for (&p, &y) in probs.iter().zip(labels) {
        match (p >= tau, y != 0) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, false) => tn += 1,
            (false, true) => fneg += 1,
        }
    }
    Ok((
        ratio(tp + tn, probs.len()),
        ratio(tp, tp + fp),
        ratio(tp, tp + fneg),
    ))
}

/// Step-wise average precision `Σ (R_n − R_{n−1}) · P_n`, sweeping the
/// threshold over the distinct scores in decreasing order with `R_0 = 0`.
pub fn average_precision(probs: &[f64], labels: &[u8]) -> Result<f64> {
    check_lengths(probs, labels)?;
    let positives = labels.iter().filter(|&&y| y != 0).count();
    if positives == 0 {
        return Err(Error::InvalidArgument(
            "average precision needs at least one positive label".into(),
        ));
    }
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&a, &b| probs[b].total_cmp(&probs[a]));

    let (mut tp, mut fp) = (0usize, 0usize);
    let mut prev_recall = 0.0;
    let mut ap = 0.0;
    let mut i = 0;
    while i < order.len() {
        let score = probs[order[i]];
        while i < order.len() && probs[order[i]] == score {
            if labels[order[i]] != 0 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        let recall = tp as f64 / positives as f64;
        let precision = tp as f64 / (tp + fp) as f64;
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    Ok(100.0 * ap)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub threshold: f64,
    pub rescale: Rescale,
    pub batch_size: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_THRESHOLD,
            rescale: Rescale::Off,
            batch_size: 64,
        }
    }
}

/// Scores and labels used for metrics: the last output (the full horizon M)
/// of every sample.
pub fn scored_outputs(
    model: &Model,
    samples: &[Sample],
    options: &EvalOptions,
) -> Result<(Vec<f64>, Vec<u8>)> {
    let probs = predict_batched(model, samples, options.rescale, options.batch_size)?;
    let scores = probs
        .iter()
        .map(|p| *p.last().expect("at least one output"))
        .collect();
    let labels = samples
        .iter()
        .map(|s| *s.labels.last().expect("at least one label"))
        .collect();
    Ok((scores, labels))
}

/// Runs the model in evaluation mode over `samples` and computes all four
/// metrics.
pub fn evaluate(model: &Model, samples: &[Sample], options: &EvalOptions) -> Result<Metrics> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("evaluation set is empty".into()));
    }
    let (scores, labels) = scored_outputs(model, samples, options)?;
    metrics_from_scores(&scores, &labels, options.threshold)
}

pub fn metrics_from_scores(scores: &[f64], labels: &[u8], threshold: f64) -> Result<Metrics> {
    let (accuracy, precision, recall) = confusion_at_threshold(scores, labels, threshold)?;
    let ap = average_precision(scores, labels)?;
    Ok(Metrics {
        accuracy,
        precision,
        recall,
        ap,
        threshold,
    })
}

impl fmt::Display for Metrics {
    /// Aligned two-line table: `Acc.  P  R  AP`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>8} {:>8} {:>8} {:>8}", "Acc.", "P", "R", "AP")?;
        write!(
            f,
            "{:>8.2} {:>8.2} {:>8.2} {:>8.2}",
            self.accuracy, self.precision, self.recall, self.ap
        )
    }
}
