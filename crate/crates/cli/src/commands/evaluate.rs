use crossing_core::dataset::{build_samples, load_split};
use crossing_core::features::FeatureStore;
use crossing_core::metrics::{evaluate, EvalOptions};
use crossing_core::{Checkpoint, Error, Metrics};
use serde::{Deserialize, Serialize};

use crate::args::EvaluateArgs;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    #[serde(flatten)]
    pub metrics: Metrics,
    pub samples: usize,
    pub manifest_id: Option<String>,
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<EvalReport> {
    let ck = Checkpoint::load(&args.checkpoint)?;
    let store = FeatureStore::open(&args.features)?;
    if store.feature_dim() != ck.model.config.image_dim {
        return Err(Error::Shape(format!(
            "feature store rows have {} values but the checkpoint expects {}",
            store.feature_dim(),
            ck.model.config.image_dim
        ))
        .into());
    }
    let tracks = load_split(&args.tracks, args.split, args.min_height)?;
    let samples = build_samples(&tracks, &store, &ck.meta.window)?;
    let options = EvalOptions {
        threshold: args.threshold,
        rescale: ck.meta.rescale,
        batch_size: args.batch,
    };
    let metrics = evaluate(&ck.model, &samples, &options)?;
    Ok(EvalReport {
        metrics,
        samples: samples.len(),
        manifest_id: ck.meta.manifest_id,
    })
}
