//! Joining prepared tracks with stored image features into model samples.

use std::path::Path;
use std::sync::Arc;

use crate::data::{
    make_windows, normalize_center, parse_tracks, prepare_tracks, window_at, FrameInput,
    FrameRecord, PedestrianTrack, Sample, SampleSource, Split, Window, WindowSpec,
};
use crate::error::{Error, Result};
use crate::features::{batch_max, FeatureKey, FeatureStore, Rescale};
use crate::rnn::Model;

/// Number of missing keys quoted in a missing-features error.
const MISSING_REPORT: usize = 10;

/// Reads a track file and applies downsampling plus split-dependent filtering.
pub fn load_split(
    path: impl AsRef<Path>,
    split: Split,
    min_height: f64,
) -> Result<Vec<PedestrianTrack>> {
    prepare_tracks(&parse_tracks(path)?, split, min_height)
}

pub fn feature_key(track: &PedestrianTrack, frame: &FrameRecord) -> FeatureKey {
    FeatureKey::new(&track.video_id, &track.pedestrian_id, frame.frame_index)
}

/// Model input for one annotated frame, carrying every variable.
pub fn frame_input(record: &FrameRecord, image: Arc<[f64]>) -> Result<FrameInput> {
    Ok(FrameInput {
        image,
        looking: Some(record.looking as usize),
        orientation: Some(record.orientation as usize),
        movement: Some(record.movement as usize),
        center: Some(normalize_center(record.bbox, record.image_size)?),
    })
}

struct TrackFeatures {
    frames: Vec<FrameInput>,
}

fn track_features(
    track: &PedestrianTrack,
    store: &FeatureStore,
    missing: &mut Vec<FeatureKey>,
) -> Result<Option<TrackFeatures>> {
    let before = missing.len();
    let mut frames = Vec::with_capacity(track.len());
    for record in &track.frames {
        let key = feature_key(track, record);
        if !store.contains(&key) {
            missing.push(key);
            continue;
        }
        frames.push(frame_input(record, store.feature(&key)?.into())?);
    }
    Ok((missing.len() == before).then_some(TrackFeatures { frames }))
}

fn sample_from(track: &PedestrianTrack, feats: &TrackFeatures, w: Window) -> Sample {
    Sample {
        inputs: feats.frames[w.inputs.clone()].to_vec(),
        labels: w.labels,
        source: SampleSource {
            video_id: track.video_id.clone(),
            pedestrian_id: track.pedestrian_id.clone(),
            t: w.t,
        },
    }
}

fn missing_error(missing: Vec<FeatureKey>) -> Error {
    Error::MissingFeatures {
        count: missing.len(),
        first: missing
            .iter()
            .take(MISSING_REPORT)
            .map(ToString::to_string)
            .collect(),
    }
}

/// Every window of every track as a sample. Features are only read for
/// tracks long enough to yield a window; any missing row is an error listing
/// the first few absent keys.
pub fn build_samples(
    tracks: &[PedestrianTrack],
    store: &FeatureStore,
    spec: &WindowSpec,
) -> Result<Vec<Sample>> {
    let mut samples = Vec::new();
    let mut missing = Vec::new();
    for track in tracks {
        if spec.count(track.len()) == 0 {
            continue;
        }
        if let Some(feats) = track_features(track, store, &mut missing)? {
            samples.extend(
                make_windows(track, spec)
                    .into_iter()
                    .map(|w| sample_from(track, &feats, w)),
            );
        }
    }
    if !missing.is_empty() {
        return Err(missing_error(missing));
    }
    Ok(samples)
}

/// The single window of `track` ending at position `t`.
pub fn sample_at(
    track: &PedestrianTrack,
    store: &FeatureStore,
    spec: &WindowSpec,
    t: usize,
) -> Result<Sample> {
    let window = window_at(track, spec, t)?;
    let mut missing = Vec::new();
    match track_features(track, store, &mut missing)? {
        Some(feats) => Ok(sample_from(track, &feats, window)),
        None => Err(missing_error(missing)),
    }
}

/// Evaluation-mode probabilities for every sample, processed in chunks of
/// `batch_size` so that per-batch rescaling matches training.
pub fn predict_batched(
    model: &Model,
    samples: &[Sample],
    rescale: Rescale,
    batch_size: usize,
) -> Result<Vec<Vec<f64>>> {
    if batch_size == 0 {
        return Err(Error::InvalidArgument("batch size must be positive".into()));
    }
    let mut out = Vec::with_capacity(samples.len());
    for chunk in samples.chunks(batch_size) {
        if rescale == Rescale::Off {
            for s in chunk {
                out.push(model.predict(s)?);
            }
        } else {
            let mut batch = chunk.to_vec();
            rescale.apply(&mut batch);
            for s in &batch {
                out.push(model.predict(s)?);
            }
        }
    }
    Ok(out)
}

/// Fixed rescaling maximum taken from a whole training set.
pub fn global_rescale(train_set: &[Sample]) -> Rescale {
    Rescale::Global {
        max: batch_max(train_set),
    }
}
