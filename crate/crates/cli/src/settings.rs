//! Training options resolved from an optional config file and command-line
//! flags.

use std::fs;
use std::path::{Path, PathBuf};

use crossing_core::data::{
    WindowSpec, DEFAULT_HORIZON, DEFAULT_MIN_HEIGHT, DEFAULT_N_PAST, MULTI_HORIZON_STEPS,
};
use crossing_core::features::{Rescale, VariableSet};
use crossing_core::optim::TrainConfig;
use crossing_core::rnn::HorizonMode;
use crossing_core::{ModelConfig, RnnType};
use serde::{Deserialize, Serialize};

use crate::args::TrainArgs;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RescaleMode {
    Off,
    Batch,
    Global,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSettings {
    pub train: Option<PathBuf>,
    pub val: Option<PathBuf>,
    pub features: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub rnn: RnnType,
    pub vars: String,
    pub rescale: RescaleMode,
    pub hidden: usize,
    pub dropout: f64,
    pub lr: f64,
    pub patience: usize,
    pub batch: usize,
    pub epochs: usize,
    pub seed: u64,
    pub n_past: usize,
    pub horizon: usize,
    pub multi_horizon: bool,
    pub min_height: f64,
    pub clip_norm: Option<f64>,
    pub pos_weight: f64,
}

impl Default for TrainSettings {
    fn default() -> Self {
        let model = ModelConfig::default();
        let train = TrainConfig::default();
        Self {
            train: None,
            val: None,
            features: None,
            out_dir: None,
            rnn: model.rnn_type,
            vars: model.vars.to_string(),
            rescale: RescaleMode::Off,
            hidden: model.hidden_dim,
            dropout: model.dropout,
            lr: train.lr,
            patience: train.patience,
            batch: train.batch_size,
            epochs: train.max_epochs,
            seed: 0,
            n_past: DEFAULT_N_PAST,
            horizon: DEFAULT_HORIZON,
            multi_horizon: false,
            min_height: DEFAULT_MIN_HEIGHT,
            clip_norm: train.clip_norm,
            pos_weight: train.pos_weight,
        }
    }
}

/// Required input and output locations.
pub struct RunPaths<'a> {
    pub train: &'a Path,
    pub val: &'a Path,
    pub features: &'a Path,
    pub out_dir: &'a Path,
}

impl TrainSettings {
    /// Parses a config file; `.json` files are JSON, anything else TOML.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let parsed = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| e.to_string())
        } else {
            toml::from_str(&text).map_err(|e| e.to_string())
        };
        parsed.map_err(|e| CliError::Invalid(format!("config {}: {e}", path.display())))
    }

    /// Config file (if any) overlaid with every flag that was given.
    pub fn resolve(args: &TrainArgs) -> Result<Self> {
        let mut s = match &args.config {
            Some(path) => Self::from_file(path)?,
            None => Self::default(),
        };
        macro_rules! overlay {
            ($($field:ident => $target:ident),* $(,)?) => {
                $(if let Some(v) = &args.$field {
                    s.$target = v.clone().into();
                })*
            };
        }
        overlay!(
            train => train, val => val, features => features, out_dir => out_dir,
            rnn => rnn, hidden => hidden, dropout => dropout, lr => lr, patience => patience,
            batch => batch, epochs => epochs, seed => seed, n_past => n_past, horizon => horizon,
            min_height => min_height, pos_weight => pos_weight, clip_norm => clip_norm,
        );
        if let Some(v) = &args.vars {
            s.vars = v.to_string();
        }
        if args.rescale {
            s.rescale = RescaleMode::Batch;
        }
        if args.rescale_global {
            s.rescale = RescaleMode::Global;
        }
        if args.multi_horizon {
            s.multi_horizon = true;
        }
        Ok(s)
    }

    pub fn paths(&self) -> Result<RunPaths<'_>> {
        fn need<'a>(p: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
            p.as_deref()
                .ok_or_else(|| CliError::Invalid(format!("missing --{flag} (flag or config key)")))
        }
        Ok(RunPaths {
            train: need(&self.train, "train")?,
            val: need(&self.val, "val")?,
            features: need(&self.features, "features")?,
            out_dir: need(&self.out_dir, "out-dir")?,
        })
    }

    pub fn window(&self) -> Result<WindowSpec> {
        let spec = if self.multi_horizon {
            WindowSpec::multi(self.n_past, self.horizon, MULTI_HORIZON_STEPS)
        } else {
            WindowSpec::single(self.n_past, self.horizon)
        };
        Ok(spec?)
    }

    pub fn model_config(&self, image_dim: usize) -> Result<ModelConfig> {
        let config = ModelConfig {
            rnn_type: self.rnn,
            hidden_dim: self.hidden,
            num_layers: 1,
            dropout: self.dropout,
            image_dim,
            vars: self.vars.parse::<VariableSet>()?,
            horizon: if self.multi_horizon {
                HorizonMode::Multi
            } else {
                HorizonMode::Single
            },
        };
        config.validate()?;
        Ok(config)
    }

    pub fn train_config(&self, rescale: Rescale) -> TrainConfig {
        TrainConfig {
            lr: self.lr,
            batch_size: self.batch,
            max_epochs: self.epochs,
            patience: self.patience,
            rescale,
            clip_norm: self.clip_norm,
            pos_weight: self.pos_weight,
        }
    }

    /// Copy with every path removed, so identical runs in different
    /// directories share an identity.
    pub fn without_paths(&self) -> Self {
        Self {
            train: None,
            val: None,
            features: None,
            out_dir: None,
            ..self.clone()
        }
    }
}
