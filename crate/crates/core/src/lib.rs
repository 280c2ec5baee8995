//! Pedestrian crossing-intention prediction from per-frame image features.
//!
//! Pipeline: annotated tracks are cut into windows of `N + 1` frames
//! ([`data`]), each frame becomes an image feature vector optionally
//! concatenated with embedded categorical attributes and the box center
//! ([`features`]), a many-to-one LSTM/GRU (optionally bidirectional) reads
//! the window and a sigmoid head emits the probability of crossing `M`
//! frames later ([`rnn`]). [`optim`] trains it with Adam and early stopping;
//! [`metrics`] scores it.

pub mod data;
pub mod dataset;
mod error;
pub mod features;
pub mod linalg;
pub mod metrics;
pub mod optim;
pub mod rnn;
pub mod synth;

pub use error::{Error, Result};
pub use metrics::Metrics;
pub use rnn::{Checkpoint, Model, ModelConfig, RnnType};
