//! Central finite-difference verification of analytic gradients.

use super::backward::{backward, batch_loss};
use crate::data::Sample;
use crate::error::Result;
use crate::rnn::{Model, Params};

/// Denominator floor for the relative error, so parameters with a vanishing
/// derivative are judged on absolute error.
pub const REL_ERROR_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    /// Largest `|analytic - numeric| / max(|numeric|, floor)`.
    pub max_rel_error: f64,
    pub worst_param: String,
    pub worst_index: usize,
    pub analytic: f64,
    pub numeric: f64,
    pub checked: usize,
}

/// Compares `analytic` against central differences of the batch loss for
/// every parameter entry.
pub fn compare_gradients(
    model: &Model,
    batch: &[Sample],
    masks: &[Option<Vec<f64>>],
    eps: f64,
    analytic: &Params,
) -> Result<GradCheckReport> {
    let mut report = GradCheckReport {
        max_rel_error: 0.0,
        worst_param: String::new(),
        worst_index: 0,
        analytic: 0.0,
        numeric: 0.0,
        checked: 0,
    };
    let mut probe = model.clone();
    let originals: Vec<(String, Vec<f64>)> = model
        .params
        .tensors()
        .into_iter()
        .map(|(n, t)| (n, t.to_vec()))
        .collect();
    let analytic = analytic.tensors();
    for (ti, (name, values)) in originals.iter().enumerate() {
        for (i, &original) in values.iter().enumerate() {
            probe.params.tensors_mut()[ti].1[i] = original + eps;
            let up = batch_loss(&probe, batch, masks, 1.0)?;
            probe.params.tensors_mut()[ti].1[i] = original - eps;
            let down = batch_loss(&probe, batch, masks, 1.0)?;
            probe.params.tensors_mut()[ti].1[i] = original;

            let numeric = (up - down) / (2.0 * eps);
            let a = analytic[ti].1[i];
            let rel = (a - numeric).abs() / numeric.abs().max(REL_ERROR_FLOOR);
            report.checked += 1;
            if rel > report.max_rel_error || report.worst_param.is_empty() {
                report.max_rel_error = rel;
                report.worst_param = name.clone();
                report.worst_index = i;
                report.analytic = a;
                report.numeric = numeric;
            }
        }
    }
    Ok(report)
}

/// Analytic BPTT gradient of one sample's loss checked against central
/// differences with step `eps`. `mask` fixes the dropout pattern.
pub fn grad_check(
    model: &Model,
    sample: &Sample,
    eps: f64,
    mask: Option<&[f64]>,
) -> Result<GradCheckReport> {
    let batch = std::slice::from_ref(sample);
    let masks = [mask.map(<[f64]>::to_vec)];
    let (_, analytic) = backward(model, batch, &masks, 1.0)?;
    compare_gradients(model, batch, &masks, eps, &analytic)
}
