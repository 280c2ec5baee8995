use std::fmt::Write;

use crossing_core::dataset::{load_split, sample_at};
use crossing_core::features::FeatureStore;
use crossing_core::rnn::HorizonMode;
use crossing_core::{Checkpoint, Error};

use crate::args::PredictArgs;
use crate::error::{CliError, Result};

/// `(horizon_frames, probability)` for each of the eight horizons.
pub fn cmd_predict(args: &PredictArgs) -> Result<Vec<(usize, f64)>> {
    let ck = Checkpoint::load(&args.checkpoint)?;
    if ck.model.config.horizon != HorizonMode::Multi {
        return Err(CliError::Invalid(
            "predict needs a multi-horizon checkpoint (train with --multi-horizon)".into(),
        ));
    }
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
    let track = tracks
        .iter()
        .find(|t| t.video_id == args.video && t.pedestrian_id == args.pedestrian)
        .ok_or_else(|| {
            CliError::Invalid(format!(
                "no track for pedestrian {} in video {}",
                args.pedestrian, args.video
            ))
        })?;
    let mut batch = [sample_at(track, &store, &ck.meta.window, args.t)?];
    ck.meta.rescale.apply(&mut batch);
    let probs = ck.model.predict(&batch[0])?;
    Ok(ck.meta.window.offsets.iter().copied().zip(probs).collect())
}

pub fn prediction_csv(rows: &[(usize, f64)]) -> String {
    let mut s = String::from("horizon_frames,probability\n");
    for (h, p) in rows {
        writeln!(s, "{h},{p}").expect("string write");
    }
    s
}
