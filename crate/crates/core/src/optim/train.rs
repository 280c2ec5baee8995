//! Mini-batch training with Adam and validation early stopping.

use log::info;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::adam::{adam_step, AdamConfig, AdamState};
use super::backward::backward;
use super::loss::sample_loss;
use super::seed::set_seed;
use crate::data::Sample;
use crate::dataset::predict_batched;
use crate::error::{Error, Result};
use crate::features::Rescale;
use crate::rnn::{Model, ModelConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub lr: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Consecutive non-improving validation epochs tolerated.
    pub patience: usize,
    pub rescale: Rescale,
    /// Global gradient-norm clip; `None` disables clipping.
    pub clip_norm: Option<f64>,
    /// Weight of the positive-class term of the loss.
    pub pos_weight: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lr: 1e-4,
            batch_size: 64,
            max_epochs: 100,
            patience: 5,
            rescale: Rescale::Off,
            clip_norm: None,
            pos_weight: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Patience,
    MaxEpochs,
    Diverged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    pub epochs: Vec<EpochRecord>,
    /// 1-based epoch whose parameters were kept.
    pub best_epoch: usize,
    pub best_val_loss: f64,
    pub stop_reason: StopReason,
    pub seed: u64,
    pub lr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observation {
    Improved,
    Stalled,
    Stop,
}

/// Stops once the validation loss has failed to improve strictly for
/// `patience` consecutive epochs.
#[derive(Debug, Clone)]
pub struct EarlyStopping {
    patience: usize,
    best: f64,
    best_epoch: usize,
    since_best: usize,
}

impl EarlyStopping {
    pub fn new(patience: usize) -> Self {
        Self {
            patience,
            best: f64::INFINITY,
            best_epoch: 0,
            since_best: 0,
        }
    }

    pub fn observe(&mut self, epoch: usize, val_loss: f64) -> Observation {
        if val_loss < self.best {
            self.best = val_loss;
            self.best_epoch = epoch;
            self.since_best = 0;
            Observation::Improved
        } else {
            self.since_best += 1;
            if self.since_best >= self.patience {
                Observation::Stop
            } else {
                Observation::Stalled
            }
        }
    }

    pub fn best_epoch(&self) -> usize {
        self.best_epoch
    }

    pub fn best_loss(&self) -> f64 {
        self.best
    }
}

/// Mean evaluation-mode loss over a dataset, rescaled per `rescale` in
/// chunks of `batch_size`.
pub fn dataset_loss(
    model: &Model,
    samples: &[Sample],
    rescale: Rescale,
    batch_size: usize,
    pos_weight: f64,
) -> Result<f64> {
    let probs = predict_batched(model, samples, rescale, batch_size)?;
    let total: f64 = probs
        .iter()
        .zip(samples)
        .map(|(p, s)| sample_loss(p, &s.labels, pos_weight))
        .sum();
    Ok(total / samples.len() as f64)
}

/// Trains a fresh model. All randomness (initialization, shuffling, dropout)
/// derives from `seed`, so identical inputs give bit-identical results. The
/// returned model carries the parameters of the best validation epoch.
pub fn train(
    train_set: &[Sample],
    val_set: &[Sample],
    model_config: &ModelConfig,
    config: &TrainConfig,
    seed: u64,
) -> Result<(Model, TrainHistory)> {
    if train_set.is_empty() || val_set.is_empty() {
        return Err(Error::InvalidArgument(
            "training and validation sets must be non-empty".into(),
        ));
    }
    if config.batch_size == 0 || config.patience == 0 {
        return Err(Error::InvalidArgument(
            "batch size and patience must be positive".into(),
        ));
    }
    let streams = set_seed(seed);
    let mut model = Model::new(model_config.clone(), &mut streams.init())?;
    model.params.round_to_f32();
    let mut shuffle_rng = streams.shuffle();
    let mut dropout_rng = streams.dropout();
    let adam = AdamConfig {
        lr: config.lr,
        ..AdamConfig::default()
    };
    let mut state = AdamState::new(&model.params);
    let mut stopper = EarlyStopping::new(config.patience);
    let mut best = model.params.clone();
    let mut history = TrainHistory {
        epochs: Vec::new(),
        best_epoch: 0,
        best_val_loss: f64::INFINITY,
        stop_reason: StopReason::MaxEpochs,
        seed,
        lr: config.lr,
    };
    let mut order: Vec<usize> = (0..train_set.len()).collect();

    let diverged = |history: &TrainHistory, epoch: usize| Error::Diverged {
        epoch,
        history: Box::new(TrainHistory {
            stop_reason: StopReason::Diverged,
            ..history.clone()
        }),
    };

    for epoch in 1..=config.max_epochs {
        order.shuffle(&mut shuffle_rng);
        let mut loss_sum = 0.0;
        for chunk in order.chunks(config.batch_size) {
            let mut batch: Vec<Sample> = chunk.iter().map(|&i| train_set[i].clone()).collect();
            config.rescale.apply(&mut batch);
            let masks: Vec<Option<Vec<f64>>> = batch
                .iter()
                .map(|_| model.sample_mask(&mut dropout_rng))
                .collect();
            let (loss, mut grads) = match backward(&model, &batch, &masks, config.pos_weight) {
                Ok(r) => r,
                Err(Error::NonFiniteGradient(_)) => return Err(diverged(&history, epoch)),
                Err(e) => return Err(e),
            };
            if !loss.is_finite() {
                return Err(diverged(&history, epoch));
            }
            loss_sum += loss * batch.len() as f64;
            if let Some(max_norm) = config.clip_norm {
                let norm = grads.l2_norm();
                if norm > max_norm {
                    grads.scale(max_norm / norm);
                }
            }
            adam_step(&mut model.params, &grads, &mut state, &adam);
            model.params.round_to_f32();
        }
        let train_loss = loss_sum / train_set.len() as f64;
        let val_loss = dataset_loss(
            &model,
            val_set,
            config.rescale,
            config.batch_size,
            config.pos_weight,
        )?;
        history.epochs.push(EpochRecord {
            epoch,
            train_loss,
            val_loss,
        });
        if !val_loss.is_finite() {
            return Err(diverged(&history, epoch));
        }
        info!("epoch {epoch}: train {train_loss:.6} val {val_loss:.6}");
        let obs = stopper.observe(epoch, val_loss);
        if obs == Observation::Improved {
            best = model.params.clone();
        }
        if obs == Observation::Stop {
            history.stop_reason = StopReason::Patience;
            break;
        }
    }
    history.best_epoch = stopper.best_epoch();
    history.best_val_loss = stopper.best_loss();
    model.params = best;
    Ok((model, history))
}
