//! Validated time-series samples, min-max normalization, dense prediction
//! grids, finite-difference derivatives, and error metrics.
//!
//! Everything here is pure and immutable after construction: identical
//! inputs produce bit-identical outputs, and values are shared freely
//! across threads.

use crate::error::SeriesError;
use serde::{Deserialize, Serialize};

/// Ordered `(time, value)` samples with free-form unit labels.
///
/// Construction enforces the invariants every fitting operation relies on:
/// equal nonzero lengths, finite entries, strictly increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    times: Vec<f64>,
    values: Vec<f64>,
    time_unit: String,
    value_unit: String,
}

impl TimeSeries {
    /// Validates raw samples and builds a series.
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self, SeriesError> {
        if times.len() != values.len() {
            return Err(SeriesError::LengthMismatch {
                left: times.len(),
                right: values.len(),
            });
        }
        if times.is_empty() {
            return Err(SeriesError::Empty);
        }
        for i in 0..times.len() {
            if !times[i].is_finite() || !values[i].is_finite() {
                return Err(SeriesError::NonFinite { index: i });
            }
        }
        for i in 1..times.len() {
            if times[i] <= times[i - 1] {
                return Err(SeriesError::NonIncreasingTime { index: i });
            }
        }
        Ok(Self {
            times,
            values,
            time_unit: String::new(),
            value_unit: String::new(),
        })
    }

    /// Attaches unit labels (free-form text, e.g. `"s"` and `"m"`).
    pub fn with_units(mut self, time_unit: &str, value_unit: &str) -> Self {
        self.time_unit = time_unit.to_string();
        self.value_unit = value_unit.to_string();
        self
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    /// Always false: empty series cannot be constructed.
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn time_unit(&self) -> &str {
        &self.time_unit
    }

    pub fn value_unit(&self) -> &str {
        &self.value_unit
    }

    /// Min-max rescaling of both axes onto `[0, 1]`.
    ///
    /// Times map as `(t - t_start) / (t_end - t_start)` and values as
    /// `(v - v_min) / (v_max - v_min)`, with the constants taken from this
    /// series. The first time maps to exactly 0 and the last to exactly 1.
    pub fn normalize(&self) -> Result<(TimeSeries, NormalizationParams), SeriesError> {
        let t_start = self.times[0];
        let t_end = self.times[self.times.len() - 1];
        let (v_min, v_max) = min_max(&self.values);
        let params = NormalizationParams::new(t_start, t_end, v_min, v_max)?;
        let times = self.times.iter().map(|&t| params.normalize_time(t)).collect();
        let values = self
            .values
            .iter()
            .map(|&v| params.normalize_value(v))
            .collect();
        Ok((
            TimeSeries {
                times,
                values,
                time_unit: String::new(),
                value_unit: String::new(),
            },
            params,
        ))
    }

    /// True when both axes already lie in `[0, 1]` (up to roundoff).
    pub fn is_normalized(&self) -> bool {
        const SLACK: f64 = 1e-9;
        let in_unit = |x: f64| (-SLACK..=1.0 + SLACK).contains(&x);
        self.times.iter().all(|&t| in_unit(t)) && self.values.iter().all(|&v| in_unit(v))
    }

    /// Backward difference quotients `(v[i+1] - v[i]) / (t[i+1] - t[i])`,
    /// aligned to `times[1..]`. No smoothing is applied.
    pub fn finite_diff_derivative(&self) -> Result<DerivativeSeries, SeriesError> {
        if self.len() < 2 {
            return Err(SeriesError::TooFewPoints {
                required: 2,
                actual: self.len(),
            });
        }
        let times = self.times[1..].to_vec();
        let rates = (1..self.len())
            .map(|i| (self.values[i] - self.values[i - 1]) / (self.times[i] - self.times[i - 1]))
            .collect();
        Ok(DerivativeSeries { times, rates })
    }
}

fn min_max(values: &[f64]) -> (f64, f64) {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in values {
        min = min.min(v);
        max = max.max(v);
    }
    (min, max)
}

/// The four rescale constants of a min-max normalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationParams {
    pub t_start: f64,
    pub t_end: f64,
    pub v_min: f64,
    pub v_max: f64,
}

impl NormalizationParams {
    /// Validates that both spans are finite and nonzero.
    pub fn new(t_start: f64, t_end: f64, v_min: f64, v_max: f64) -> Result<Self, SeriesError> {
        for (i, x) in [t_start, t_end, v_min, v_max].into_iter().enumerate() {
            if !x.is_finite() {
                return Err(SeriesError::NonFinite { index: i });
            }
        }
        if t_end <= t_start {
            return Err(SeriesError::DegenerateSpan { axis: "time" });
        }
        if v_max <= v_min {
            return Err(SeriesError::DegenerateSpan { axis: "value" });
        }
        Ok(Self {
            t_start,
            t_end,
            v_min,
            v_max,
        })
    }

    /// Identity constants for data that is already on `[0, 1]`.
    pub fn identity() -> Self {
        Self {
            t_start: 0.0,
            t_end: 1.0,
            v_min: 0.0,
            v_max: 1.0,
        }
    }

    pub fn normalize_time(&self, t: f64) -> f64 {
        (t - self.t_start) / (self.t_end - self.t_start)
    }

    pub fn normalize_value(&self, v: f64) -> f64 {
        (v - self.v_min) / (self.v_max - self.v_min)
    }

    /// Inverse of time normalization: `t * (t_end - t_start) + t_start`.
    pub fn denormalize_times(&self, times: &[f64]) -> Vec<f64> {
        times
            .iter()
            .map(|&t| t * (self.t_end - self.t_start) + self.t_start)
            .collect()
    }

    /// Inverse of value normalization: `v * (v_max - v_min) + v_min`.
    pub fn denormalize_values(&self, values: &[f64]) -> Vec<f64> {
        values
            .iter()
            .map(|&v| v * (self.v_max - self.v_min) + self.v_min)
            .collect()
    }
}

/// Difference quotients of a series; one entry per source point after the
/// first (the first point has no backward difference and is omitted).
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeSeries {
    times: Vec<f64>,
    rates: Vec<f64>,
}

impl DerivativeSeries {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// `n_points` uniformly spaced query times from `t0 - (t1 - t0)` to the
/// last sample time, endpoints inclusive.
///
/// The first grid point lies one sample interval BEFORE the data range, so
/// evaluating a model there is extrapolation; downstream reports flag it.
pub fn make_dense_grid(times: &[f64], n_points: usize) -> Result<Vec<f64>, SeriesError> {
    if times.len() < 2 {
        return Err(SeriesError::TooFewPoints {
            required: 2,
            actual: times.len(),
        });
    }
    if n_points < 2 {
        return Err(SeriesError::TooFewPoints {
            required: 2,
            actual: n_points,
        });
    }
    for i in 1..times.len() {
        if times[i] <= times[i - 1] {
            return Err(SeriesError::NonIncreasingTime { index: i });
        }
    }
    let start = times[0] - (times[1] - times[0]);
    let stop = times[times.len() - 1];
    let step = (stop - start) / (n_points - 1) as f64;
    let mut grid: Vec<f64> = (0..n_points).map(|i| start + i as f64 * step).collect();
    grid[n_points - 1] = stop; // pin the endpoint exactly
    Ok(grid)
}

/// Root mean squared error between two equally long sequences.
pub fn rmse(a: &[f64], b: &[f64]) -> Result<f64, SeriesError> {
    if a.len() != b.len() {
        return Err(SeriesError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(SeriesError::Empty);
    }
    let sum_sq: f64 = a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum();
    Ok((sum_sq / a.len() as f64).sqrt())
}
