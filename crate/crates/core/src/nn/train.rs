//! The training loop: epochs of MSE + Adam over a normalized series.

use super::adam::{adam_step, AdamState};
use super::model::{mse_loss, MlpModel};
use crate::error::NnError;
use crate::rng;
use crate::series::TimeSeries;
use std::time::Instant;

/// How samples are grouped into optimizer steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BatchMode {
    /// One step per epoch over the whole dataset. The default: the
    /// datasets are tiny and it removes shuffle order from the picture.
    Full,
    /// Seeded-shuffle mini-batches of the given size.
    MiniBatch(usize),
}

/// Optimizer hyperparameters, epoch count, and seeding.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch: BatchMode,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub seed: u64,
    pub shuffle: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 1000,
            batch: BatchMode::Full,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-7,
            seed: 0,
            shuffle: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), NnError> {
        let bad = |reason: &str| {
            Err(NnError::InvalidConfig {
                reason: reason.to_string(),
            })
        };
        if self.epochs == 0 {
            return bad("epochs must be at least 1");
        }
        if let BatchMode::MiniBatch(0) = self.batch {
            return bad("batch size must be positive");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning rate must be positive and finite");
        }
        if !(self.beta1 > 0.0 && self.beta1 < 1.0) {
            return bad("beta1 must lie in (0, 1)");
        }
        if !(self.beta2 > 0.0 && self.beta2 < 1.0) {
            return bad("beta2 must lie in (0, 1)");
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad("epsilon must be positive and finite");
        }
        Ok(())
    }
}

/// What a training run produced: one mean loss per epoch, timing, and the
/// seed it ran under.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub loss_history: Vec<f64>,
    pub wall_time_secs: f64,
    pub final_loss: f64,
    pub seed: u64,
}

/// Runs `config.epochs` passes of MSE + Adam over the series and returns
/// the trained model with its report.
///
/// The series is expected on `[0, 1]` on both axes; training still runs
/// otherwise but logs a warning, since monomial-scale inputs stall the
/// relu stack. Runs are deterministic given the config: shuffling draws
/// from a ChaCha20 stream seeded with `config.seed`.
///
/// A non-finite epoch loss aborts with [`NnError::Diverged`] instead of
/// recording it; silent NaNs would poison every downstream derivative.
pub fn train(
    model: MlpModel,
    series: &TimeSeries,
    config: &TrainConfig,
) -> Result<(MlpModel, TrainReport), NnError> {
    config.validate()?;
    let mut model = model;
    if model.input_width() != 1 || model.output_width() != 1 {
        return Err(NnError::ShapeMismatch {
            context: format!(
                "training drives a 1->1 model, got {}->{}",
                model.input_width(),
                model.output_width()
            ),
        });
    }
    if !series.is_normalized() {
        log::warn!("training series is not normalized to [0, 1] on both axes");
    }

    let n = series.len();
    let inputs: Vec<Vec<f64>> = series.times().iter().map(|&t| vec![t]).collect();
    let targets = series.values();

    let mut params = model.parameters();
    let mut state = AdamState::new(params.len());
    let mut shuffle_stream = rng::stream(config.seed);
    let mut order: Vec<usize> = (0..n).collect();

    let batch_size = match config.batch {
        BatchMode::Full => n,
        BatchMode::MiniBatch(size) => size.min(n),
    };

    let started = Instant::now();
    let mut loss_history = Vec::with_capacity(config.epochs);
    for epoch in 1..=config.epochs {
        if config.shuffle && matches!(config.batch, BatchMode::MiniBatch(_)) {
            // Fisher-Yates over the index vector.
            for i in (1..n).rev() {
                let j = rng::index_below(&mut shuffle_stream, i + 1);
                order.swap(i, j);
            }
        }

        let mut epoch_loss = 0.0;
        let mut batches = 0.0;
        for chunk in order.chunks(batch_size) {
            let batch_inputs: Vec<Vec<f64>> = chunk.iter().map(|&i| inputs[i].clone()).collect();
            let batch_targets: Vec<f64> = chunk.iter().map(|&i| targets[i]).collect();

            let (out, cache) = model.forward(&batch_inputs)?;
            let flat: Vec<f64> = out.iter().map(|o| o[0]).collect();
            let (loss, grad) = mse_loss(&flat, &batch_targets)?;
            if !loss.is_finite() {
                // Stop before the non-finite gradients reach the optimizer.
                return Err(NnError::Diverged { epoch });
            }
            epoch_loss += loss;
            batches += 1.0;

            let grad_rows: Vec<Vec<f64>> = grad.into_iter().map(|g| vec![g]).collect();
            let grads = model.backward(&cache, &grad_rows)?.flatten();
            adam_step(&mut params, &grads, &mut state, config)?;
            model.set_parameters(&params)?;
        }

        let mean_loss = epoch_loss / batches;
        if !mean_loss.is_finite() {
            return Err(NnError::Diverged { epoch });
        }
        loss_history.push(mean_loss);
    }

    let final_loss = *loss_history.last().expect("epochs >= 1");
    let report = TrainReport {
        loss_history,
        wall_time_secs: started.elapsed().as_secs_f64(),
        final_loss,
        seed: config.seed,
    };
    Ok((model, report))
}
