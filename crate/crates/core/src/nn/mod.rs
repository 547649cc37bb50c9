//! From-scratch dense network: forward pass, reverse-mode gradients, MSE
//! loss, Adam, and the training loop behind the interpolation pipeline.
//!
//! Training mutates a private model and runs single-threaded (the
//! determinism contract); a trained model is immutable and safe to share
//! for concurrent prediction.

mod adam;
mod model;
mod train;

pub use adam::{adam_step, AdamState};
pub use model::{
    default_architecture, mse_loss, Activation, ForwardCache, Gradients, Layer, LayerGradient,
    LayerSpec, MlpModel,
};
pub use train::{train, BatchMode, TrainConfig, TrainReport};
