//! Run manifests: what went into a training run and what came out.

use std::fs;
use std::path::{Path, PathBuf};

use crossing_core::data::WindowSpec;
use crossing_core::optim::{StopReason, TrainConfig};
use crossing_core::ModelConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};
use crate::settings::TrainSettings;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputFile {
    pub role: String,
    pub path: PathBuf,
    /// Git-style object hash: SHA-256 of `blob <len>\0` followed by the content.
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutputs {
    pub checkpoint: Option<PathBuf>,
    pub history: PathBuf,
    pub manifest: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub epochs_run: usize,
    pub best_epoch: usize,
    pub best_val_loss: f64,
    pub stop_reason: StopReason,
    pub train_samples: usize,
    pub val_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub id: String,
    pub tool_version: String,
    pub settings: TrainSettings,
    pub model: ModelConfig,
    pub training: TrainConfig,
    pub window: WindowSpec,
    pub seed: u64,
    pub inputs: Vec<InputFile>,
    pub outputs: RunOutputs,
    pub summary: RunSummary,
}

pub fn git_blob_sha256(content: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", content.len()).as_bytes());
    h.update(content);
    hex::encode(h.finalize())
}

pub fn hash_input(role: &str, path: &Path) -> Result<InputFile> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(InputFile {
        role: role.to_string(),
        path: path.to_path_buf(),
        sha256: git_blob_sha256(&bytes),
    })
}

#[derive(Serialize)]
struct Identity<'a> {
    settings: TrainSettings,
    model: &'a ModelConfig,
    training: &'a TrainConfig,
    window: &'a WindowSpec,
    seed: u64,
    inputs: Vec<(&'a str, &'a str)>,
}

/// Short identifier derived from everything that determines a run's results
/// (configuration, seed and input contents) but not from any path.
pub fn manifest_id(
    settings: &TrainSettings,
    model: &ModelConfig,
    training: &TrainConfig,
    window: &WindowSpec,
    inputs: &[InputFile],
) -> String {
    let identity = Identity {
        settings: settings.without_paths(),
        model,
        training,
        window,
        seed: settings.seed,
        inputs: inputs
            .iter()
            .map(|i| (i.role.as_str(), i.sha256.as_str()))
            .collect(),
    };
    let json = serde_json::to_vec(&identity).expect("identity serializes");
    hex::encode(Sha256::digest(&json))[..16].to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blob_hash_matches_git() {
        // git hash-object --object-format=sha256 of "hello\n"
        assert_eq!(
            git_blob_sha256(b"hello\n"),
            "2cf8d83d9ee29543b34a87727421fdecb7e3f3a183d337639025de576db9ebb4"
        );
    }

    #[test]
    fn id_ignores_paths() {
        let s = TrainSettings::default();
        let mut moved = s.clone();
        moved.out_dir = Some("/elsewhere".into());
        let (m, t, w) = (
            s.model_config(8).unwrap(),
            s.train_config(crossing_core::features::Rescale::Off),
            s.window().unwrap(),
        );
        assert_eq!(
            manifest_id(&s, &m, &t, &w, &[]),
            manifest_id(&moved, &m, &t, &w, &[])
        );
        let mut seeded = s.clone();
        seeded.seed = 1;
        assert_ne!(
            manifest_id(&s, &m, &t, &w, &[]),
            manifest_id(&seeded, &m, &t, &w, &[])
        );
    }
}
