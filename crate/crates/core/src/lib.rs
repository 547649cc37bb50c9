//! Interpolate and denoise noisy sensor time series by deliberately
//! overfitting a small dense network, next to the classical fits it is
//! usually compared against.
//!
//! The pipeline: validate the raw `(time, value)` samples, min-max
//! normalize both axes onto `[0, 1]`, train a width-1-in/width-1-out
//! dense relu stack with full-batch Adam on MSE, evaluate it on a dense
//! uniform grid, and rescale back. With no regularization the network
//! memorizes the signal's shape, which in practice reads as a smooth,
//! denoised interpolant whose finite-difference derivative is far better
//! behaved than the raw data's.
//!
//! Modules:
//! - [`series`]: validated samples, normalization, grids, derivatives, metrics.
//! - [`classical`]: linear least squares, exact polynomial (Vandermonde),
//!   natural cubic spline.
//! - [`nn`]: the dense network, backprop, Adam, training loop.
//! - [`bench`]: seeded synthetic signals and the method-comparison harness.
//! - [`model_io`]: deterministic `.model.json` persistence.
//! - [`csv_io`]: the `Time,Message` file format.

pub mod bench;
pub mod classical;
pub mod csv_io;
pub mod error;
pub mod model_io;
pub mod nn;
mod rng;
pub mod series;

pub use error::{BenchError, CsvError, FitError, ModelIoError, NnError, SeriesError};
pub use series::{make_dense_grid, rmse, DerivativeSeries, NormalizationParams, TimeSeries};
