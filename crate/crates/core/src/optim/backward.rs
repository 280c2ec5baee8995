//! Loss and gradient of a batch through the whole model.

use super::loss::{bce_logit_grad, sample_loss};
use crate::data::Sample;
use crate::error::{Error, Result};
use crate::rnn::{Model, Params};

/// Mean batch loss with fixed per-sample dropout masks (`None` = no dropout).
pub fn batch_loss(
    model: &Model,
    batch: &[Sample],
    masks: &[Option<Vec<f64>>],
    pos_weight: f64,
) -> Result<f64> {
    check_batch(batch, masks)?;
    let mut total = 0.0;
    for (s, mask) in batch.iter().zip(masks) {
        let probs = model.trace(s, mask.as_deref())?.probs;
        total += sample_loss(&probs, &s.labels, pos_weight);
    }
    Ok(total / batch.len() as f64)
}

fn check_batch(batch: &[Sample], masks: &[Option<Vec<f64>>]) -> Result<()> {
    if batch.is_empty() {
        return Err(Error::InvalidArgument("empty batch".into()));
    }
    if masks.len() != batch.len() {
        return Err(Error::InvalidArgument(format!(
            "{} dropout masks for {} samples",
            masks.len(),
            batch.len()
        )));
    }
    Ok(())
}

/// Loss and its gradient with respect to every parameter (mean over the
/// batch and over horizons).
pub fn backward(
    model: &Model,
    batch: &[Sample],
    masks: &[Option<Vec<f64>>],
    pos_weight: f64,
) -> Result<(f64, Params)> {
    check_batch(batch, masks)?;
    let n = batch.len() as f64;
    let mut grads = model.params.zeros_like();
    let mut total = 0.0;
    for (s, mask) in batch.iter().zip(masks) {
        if s.labels.len() != model.config.outputs() {
            return Err(Error::Shape(format!(
                "sample has {} labels, model emits {}",
                s.labels.len(),
                model.config.outputs()
            )));
        }
        let trace = model.trace(s, mask.as_deref())?;
        total += sample_loss(&trace.probs, &s.labels, pos_weight);
        let k = trace.probs.len() as f64;
        let dlogits: Vec<f64> = trace
            .probs
            .iter()
            .zip(&s.labels)
            .map(|(&p, &y)| bce_logit_grad(p, y, pos_weight) / (k * n))
            .collect();
        model.backward(s, &trace, &dlogits, &mut grads)?;
    }
    if let Some((name, _)) = grads
        .tensors()
        .into_iter()
        .find(|(_, t)| t.iter().any(|v| !v.is_finite()))
    {
        return Err(Error::NonFiniteGradient(name));
    }
    Ok((total / n, grads))
}
