use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crossing_core::data::Split;
use crossing_core::dataset::{build_samples, global_rescale, load_split};
use crossing_core::features::{index_path, FeatureStore, Rescale};
use crossing_core::optim::{train, TrainHistory};
use crossing_core::rnn::{Checkpoint, CheckpointMeta};
use crossing_core::Error;
use log::info;
use serde::{Deserialize, Serialize};

use crate::args::TrainArgs;
use crate::error::{CliError, Result};
use crate::manifest::{hash_input, manifest_id, RunManifest, RunOutputs, RunSummary};
use crate::settings::{RescaleMode, TrainSettings};

pub const CHECKPOINT_FILE: &str = "model.ckpt";
pub const HISTORY_FILE: &str = "history.jsonl";
pub const MANIFEST_FILE: &str = "manifest.json";

/// One line of the history log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryLine {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    pub lr: f64,
    pub seed: u64,
    pub manifest_id: String,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub manifest: RunManifest,
    pub history: TrainHistory,
}

impl TrainOutcome {
    pub fn summary(&self) -> String {
        let s = &self.manifest.summary;
        format!(
            "run {}: {} epochs, best epoch {} (val loss {:.6}), stopped by {:?}\ncheckpoint {}",
            self.manifest.id,
            s.epochs_run,
            s.best_epoch,
            s.best_val_loss,
            s.stop_reason,
            self.manifest
                .outputs
                .checkpoint
                .as_deref()
                .map_or_else(|| "<none>".into(), |p| p.display().to_string()),
        )
    }
}

fn write_history(path: &Path, history: &TrainHistory, id: &str) -> Result<()> {
    let mut text = Vec::new();
    for e in &history.epochs {
        let line = HistoryLine {
            epoch: e.epoch,
            train_loss: e.train_loss,
            val_loss: e.val_loss,
            lr: history.lr,
            seed: history.seed,
            manifest_id: id.to_string(),
        };
        serde_json::to_writer(&mut text, &line).map_err(Error::from)?;
        text.push(b'\n');
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_vec_pretty(value).map_err(Error::from)?;
    text.push(b'\n');
    let mut f = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    f.write_all(&text).map_err(|e| CliError::io(path, e))
}

/// Full training pipeline: load and window both splits, train, then write
/// the checkpoint, history log and manifest into the output directory. A
/// diverged run still leaves its history and manifest behind.
pub fn cmd_train(args: &TrainArgs) -> Result<TrainOutcome> {
    let settings = TrainSettings::resolve(args)?;
    let paths = settings.paths()?;
    let spec = settings.window()?;

    let store = FeatureStore::open(paths.features)?;
    let train_tracks = load_split(paths.train, Split::Train, settings.min_height)?;
    let val_tracks = load_split(paths.val, Split::Val, settings.min_height)?;
    let train_set = build_samples(&train_tracks, &store, &spec)?;
    let val_set = build_samples(&val_tracks, &store, &spec)?;
    if train_set.is_empty() || val_set.is_empty() {
        return Err(CliError::Invalid(format!(
            "no windows of {} frames plus a {}-frame horizon (train {}, val {})",
            spec.seq_len(),
            spec.horizon(),
            train_set.len(),
            val_set.len()
        )));
    }
    info!(
        "{} training and {} validation windows",
        train_set.len(),
        val_set.len()
    );

    let rescale = match settings.rescale {
        RescaleMode::Off => Rescale::Off,
        RescaleMode::Batch => Rescale::Batch,
        RescaleMode::Global => global_rescale(&train_set),
    };
    let model_config = settings.model_config(store.feature_dim())?;
    let train_config = settings.train_config(rescale);
    let inputs = vec![
        hash_input("train", paths.train)?,
        hash_input("val", paths.val)?,
        hash_input("features", paths.features)?,
        hash_input("features_index", &index_path(paths.features))?,
    ];
    let id = manifest_id(&settings, &model_config, &train_config, &spec, &inputs);

    fs::create_dir_all(paths.out_dir).map_err(|e| CliError::io(paths.out_dir, e))?;
    let out = |name: &str| -> PathBuf { paths.out_dir.join(name) };

    let (model, history, failure) = match train(
        &train_set,
        &val_set,
        &model_config,
        &train_config,
        settings.seed,
    ) {
        Ok((model, history)) => (Some(model), history, None),
        Err(Error::Diverged { epoch, history }) => {
            let h = (*history).clone();
            (None, h, Some(Error::Diverged { epoch, history }))
        }
        Err(e) => return Err(e.into()),
    };

    write_history(&out(HISTORY_FILE), &history, &id)?;
    let checkpoint = match model {
        Some(model) => {
            let ck = Checkpoint {
                model,
                meta: CheckpointMeta {
                    window: spec.clone(),
                    rescale,
                    seed: settings.seed,
                    manifest_id: Some(id.clone()),
                },
            };
            ck.save(out(CHECKPOINT_FILE))?;
            Some(out(CHECKPOINT_FILE))
        }
        None => None,
    };
    let manifest = RunManifest {
        id,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        settings: settings.clone(),
        model: model_config,
        training: train_config,
        window: spec,
        seed: settings.seed,
        inputs,
        outputs: RunOutputs {
            checkpoint,
            history: out(HISTORY_FILE),
            manifest: out(MANIFEST_FILE),
        },
        summary: RunSummary {
            epochs_run: history.epochs.len(),
            best_epoch: history.best_epoch,
            best_val_loss: history.best_val_loss,
            stop_reason: history.stop_reason,
            train_samples: train_set.len(),
            val_samples: val_set.len(),
        },
    };
    write_json(&out(MANIFEST_FILE), &manifest)?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    Ok(TrainOutcome { manifest, history })
}
