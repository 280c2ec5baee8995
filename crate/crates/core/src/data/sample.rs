use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// Raw per-frame model input before embedding lookup.
///
/// Categorical variables and the center are optional so that a sample can be
/// built for any variable subset; a variable enabled in the model must be
/// present.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameInput {
    /// Shared so that overlapping windows reuse the same frame features.
    pub image: Arc<[f64]>,
    pub looking: Option<usize>,
    pub orientation: Option<usize>,
    pub movement: Option<usize>,
    /// Normalized box center `(u_c, v_c)`.
    pub center: Option<(f64, f64)>,
}

impl FrameInput {
    pub fn image_only(image: impl Into<Arc<[f64]>>) -> Self {
        Self {
            image: image.into(),
            looking: None,
            orientation: None,
            movement: None,
            center: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SampleSource {
    pub video_id: String,
    pub pedestrian_id: String,
    pub t: usize,
}

/// One training or evaluation window: N + 1 frame inputs and one label per
/// horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub inputs: Vec<FrameInput>,
    pub labels: Vec<u8>,
    pub source: SampleSource,
}
