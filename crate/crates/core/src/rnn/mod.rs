//! Recurrent many-to-one classifier.

mod cell;
mod checkpoint;
mod config;
mod model;

pub use cell::{gru_step, lstm_step, CellParams, CellState};
pub use checkpoint::{
    is_f32_exact, Checkpoint, CheckpointMeta, CHECKPOINT_MAGIC, CHECKPOINT_VERSION,
};
pub use config::{CellKind, HorizonMode, ModelConfig, RnnType};
pub use model::{dropout_mask, model_forward, Mode, Model, Params, Trace};
