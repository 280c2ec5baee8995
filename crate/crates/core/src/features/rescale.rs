//! Rescaling of image features by the largest value in a batch.

use serde::{Deserialize, Serialize};

use crate::data::Sample;

/// How image features are rescaled before entering the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Rescale {
    Off,
    /// Divide by the maximum of each batch.
    Batch,
    /// Divide by a fixed maximum taken from the training set.
    Global {
        max: f64,
    },
}

/// Largest image-feature value over every frame of every sample.
pub fn batch_max(batch: &[Sample]) -> f64 {
    batch
        .iter()
        .flat_map(|s| s.inputs.iter())
        .flat_map(|f| f.image.iter().copied())
        .fold(0.0, f64::max)
}

/// Divides every image-feature entry by `max`. Categorical and center inputs
/// are left untouched; a non-positive `max` leaves the batch unchanged.
pub fn scale_images(batch: &mut [Sample], max: f64) {
    if max.is_nan() || max <= 0.0 {
        return;
    }
    for frame in batch.iter_mut().flat_map(|s| s.inputs.iter_mut()) {
        frame.image = frame.image.iter().map(|v| v / max).collect();
    }
}

/// Divides the batch's image features by its global maximum and returns the
/// maximum used.
pub fn rescale_batch(batch: &mut [Sample]) -> f64 {
    let max = batch_max(batch);
    scale_images(batch, max);
    max
}

impl Rescale {
    pub fn apply(&self, batch: &mut [Sample]) {
        match *self {
            Rescale::Off => {}
            Rescale::Batch => {
                rescale_batch(batch);
            }
            Rescale::Global { max } => scale_images(batch, max),
        }
    }
}
