//! Loss, gradients, Adam, gradient checking and the training loop.

mod adam;
mod backward;
mod gradcheck;
mod loss;
mod seed;
mod train;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use backward::{backward, batch_loss};
pub use gradcheck::{compare_gradients, grad_check, GradCheckReport, REL_ERROR_FLOOR};
pub use loss::{bce_logit_grad, bce_loss, sample_loss, weighted_bce, PROB_CLAMP};
pub use seed::{set_seed, SeedStreams};
pub use train::{
    dataset_loss, train, EarlyStopping, EpochRecord, Observation, StopReason, TrainConfig,
    TrainHistory,
};
