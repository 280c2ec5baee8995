use std::fs;

use crossing_core::data::save_tracks;
use crossing_core::synth::{synthetic_dataset, SynthConfig};

use crate::args::SynthArgs;
use crate::error::{CliError, Result};

/// Writes `train.jsonl`, `val.jsonl`, `test.jsonl` and `features.bin`. The
/// last two videos become the validation and test splits.
pub fn cmd_synth(args: &SynthArgs) -> Result<Vec<String>> {
    if args.videos < 3 {
        return Err(CliError::Invalid(
            "need at least 3 videos (train, val, test)".into(),
        ));
    }
    let (tracks, store) = synthetic_dataset(&SynthConfig {
        videos: args.videos,
        pedestrians_per_video: args.pedestrians,
        frames: args.frames,
        feature_dim: args.feature_dim,
        seed: args.seed,
        ..Default::default()
    });
    fs::create_dir_all(&args.out_dir).map_err(|e| CliError::io(&args.out_dir, e))?;
    let val_video = format!("video_{:04}", args.videos - 1);
    let test_video = format!("video_{:04}", args.videos);
    let (mut train, mut val, mut test) = (Vec::new(), Vec::new(), Vec::new());
    for t in tracks {
        match t.video_id.as_str() {
            v if v == val_video => val.push(t),
            v if v == test_video => test.push(t),
            _ => train.push(t),
        }
    }
    let mut written = Vec::new();
    for (name, split) in [
        ("train.jsonl", &train),
        ("val.jsonl", &val),
        ("test.jsonl", &test),
    ] {
        let path = args.out_dir.join(name);
        save_tracks(&path, split)?;
        written.push(path.display().to_string());
    }
    let features = args.out_dir.join("features.bin");
    store.save(&features)?;
    written.push(features.display().to_string());
    Ok(written)
}
