//! Seeded synthetic ground-truth signals and the harness that measures
//! how each method interpolates and denoises them.
//!
//! Noise generation is pinned to a portable recipe so every
//! implementation of this format reproduces the same streams: a ChaCha20
//! generator seeded with `seed_from_u64`, uniform doubles from the top 53
//! bits of each `u64` draw, and Box-Muller pairs
//! `sqrt(-2 ln u1) * (cos, sin)(2 pi u2)` consumed in order.

use crate::classical::{LinearModel, PolynomialModel, SplineModel};
use crate::error::BenchError;
use crate::nn::{default_architecture, train, MlpModel, TrainConfig};
use crate::rng;
use crate::series::{make_dense_grid, rmse, NormalizationParams, TimeSeries};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::time::Instant;

/// Closed-form clean signals. Each variant knows its value and its exact
/// derivative, so reports can quote the analytic derivative spread.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CleanSignal {
    /// `offset + sum_i amplitude_i * sin(2 pi frequency_i t)`.
    SumOfSines {
        offset: f64,
        /// `(amplitude, frequency)` pairs; frequency in cycles per time unit.
        terms: Vec<(f64, f64)>,
    },
    /// `slope * t + amplitude * sin(2 pi frequency t)`.
    RampPlusSine {
        slope: f64,
        amplitude: f64,
        frequency: f64,
    },
    /// A linear ramp up to `split`, then a sine around the reached level:
    /// continuous, with a derivative kink at the split.
    PiecewiseSmooth {
        base: f64,
        ramp: f64,
        split: f64,
        amplitude: f64,
        frequency: f64,
    },
}

const TAU: f64 = std::f64::consts::TAU;

impl CleanSignal {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            CleanSignal::SumOfSines { offset, terms } => {
                offset
                    + terms
                        .iter()
                        .map(|&(a, f)| a * (TAU * f * t).sin())
                        .sum::<f64>()
            }
            CleanSignal::RampPlusSine {
                slope,
                amplitude,
                frequency,
            } => slope * t + amplitude * (TAU * frequency * t).sin(),
            CleanSignal::PiecewiseSmooth {
                base,
                ramp,
                split,
                amplitude,
                frequency,
            } => {
                if t <= *split {
                    base + ramp * (t - split)
                } else {
                    base + amplitude * (TAU * frequency * (t - split)).sin()
                }
            }
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            CleanSignal::SumOfSines { terms, .. } => terms
                .iter()
                .map(|&(a, f)| a * TAU * f * (TAU * f * t).cos())
                .sum(),
            CleanSignal::RampPlusSine {
                slope,
                amplitude,
                frequency,
            } => slope + amplitude * TAU * frequency * (TAU * frequency * t).cos(),
            CleanSignal::PiecewiseSmooth {
                ramp,
                split,
                amplitude,
                frequency,
                ..
            } => {
                if t <= *split {
                    *ramp
                } else {
                    amplitude * TAU * frequency * (TAU * frequency * (t - split)).cos()
                }
            }
        }
    }

    fn params_finite(&self) -> bool {
        match self {
            CleanSignal::SumOfSines { offset, terms } => {
                offset.is_finite() && terms.iter().all(|&(a, f)| a.is_finite() && f.is_finite())
            }
            CleanSignal::RampPlusSine {
                slope,
                amplitude,
                frequency,
            } => slope.is_finite() && amplitude.is_finite() && frequency.is_finite(),
            CleanSignal::PiecewiseSmooth {
                base,
                ramp,
                split,
                amplitude,
                frequency,
            } => {
                [base, ramp, split, amplitude, frequency]
                    .iter()
                    .all(|x| x.is_finite())
            }
        }
    }
}

/// A fully seeded recipe for one synthetic benchmark dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub signal: CleanSignal,
    pub n_samples: usize,
    pub span: (f64, f64),
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    /// The pinned benchmark: `0.5 + 0.3 sin(2 pi t) + 0.1 sin(6 pi t)` on
    /// `[0, 1]`, 400 samples, Gaussian noise sigma 0.05, seed 42.
    fn default() -> Self {
        Self {
            signal: CleanSignal::SumOfSines {
                offset: 0.5,
                terms: vec![(0.3, 1.0), (0.1, 3.0)],
            },
            n_samples: 400,
            span: (0.0, 1.0),
            noise_sigma: 0.05,
            seed: 42,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |reason: &str| {
            Err(BenchError::InvalidSpec {
                reason: reason.to_string(),
            })
        };
        if !self.signal.params_finite() {
            return bad("signal parameters must be finite");
        }
        if self.n_samples < 4 {
            return bad("n_samples must be at least 4");
        }
        if !(self.span.0.is_finite() && self.span.1.is_finite() && self.span.1 > self.span.0) {
            return bad("span must be finite with end > start");
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return bad("noise_sigma must be finite and non-negative");
        }
        Ok(())
    }

    fn sample_times(&self) -> Vec<f64> {
        let n = self.n_samples;
        let step = (self.span.1 - self.span.0) / (n - 1) as f64;
        let mut times: Vec<f64> = (0..n).map(|i| self.span.0 + i as f64 * step).collect();
        times[n - 1] = self.span.1;
        times
    }

    /// Sample standard deviation of the exact derivative over the sample
    /// times. A floor for what any interpolated-derivative spread can be.
    pub fn analytic_derivative_std(&self) -> f64 {
        let rates: Vec<f64> = self
            .sample_times()
            .iter()
            .map(|&t| self.signal.derivative(t))
            .collect();
        sample_std(&rates)
    }
}

/// Materializes a spec into `(noisy, clean)` series sharing the same
/// uniformly spaced times. Same spec, same bits.
pub fn generate(spec: &SyntheticSpec) -> Result<(TimeSeries, TimeSeries), BenchError> {
    spec.validate()?;
    let times = spec.sample_times();
    let clean_values: Vec<f64> = times.iter().map(|&t| spec.signal.value(t)).collect();
    let mut noise = GaussianStream::new(spec.seed);
    let noisy_values: Vec<f64> = clean_values
        .iter()
        .map(|&v| v + spec.noise_sigma * noise.next())
        .collect();
    let clean = TimeSeries::new(times.clone(), clean_values)?;
    let noisy = TimeSeries::new(times, noisy_values)?;
    Ok((noisy, clean))
}

/// Standard normal draws via Box-Muller over a seeded ChaCha20 stream.
struct GaussianStream {
    rng: rand_chacha::ChaCha20Rng,
    spare: Option<f64>,
}

impl GaussianStream {
    fn new(seed: u64) -> Self {
        Self {
            rng: rng::stream(seed),
            spare: None,
        }
    }

    fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = rng::unit_uniform_positive(&mut self.rng);
        let u2 = rng::unit_uniform(&mut self.rng);
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = TAU * u2;
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }
}

/// The methods the harness can race against each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Linear,
    Neural,
    Polynomial,
    Spline,
}

impl Method {
    pub fn all() -> [Method; 4] {
        [Method::Linear, Method::Neural, Method::Polynomial, Method::Spline]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Method::Linear => "linear",
            Method::Neural => "neural",
            Method::Polynomial => "polynomial",
            Method::Spline => "spline",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" => Ok(Method::Linear),
            "neural" => Ok(Method::Neural),
            "polynomial" => Ok(Method::Polynomial),
            "spline" => Ok(Method::Spline),
            other => Err(format!(
                "unknown method `{other}` (expected linear, neural, polynomial, or spline)"
            )),
        }
    }
}

/// One method's measurements. Metric fields are `None` exactly when the
/// method failed, in which case `error` says why.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodRow {
    pub method: Method,
    /// RMSE between the method's values at the sample times and the clean
    /// signal, in raw units.
    pub rmse_to_clean: Option<f64>,
    /// RMSE between the noisy observations and the clean signal; the bar
    /// a denoiser has to beat. Identical across rows.
    pub noisy_rmse: f64,
    /// Sample std of the difference-quotient derivative of the noisy
    /// observations. Identical across rows.
    pub derivative_std_original: f64,
    /// Sample std of the difference-quotient derivative of the method's
    /// predictions over the dense grid.
    pub derivative_std_interpolated: Option<f64>,
    pub wall_time_secs: f64,
    pub error: Option<String>,
    /// The dense-grid derivative itself, for plotting. Not part of the
    /// CSV projection.
    pub grid_derivative: Option<crate::series::DerivativeSeries>,
}

/// All rows of one comparison run, sorted by method name.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub rows: Vec<MethodRow>,
    pub grid_points: usize,
    /// Closed-form derivative spread of the clean signal, when known.
    pub clean_derivative_std: Option<f64>,
}

impl ComparisonReport {
    pub fn row(&self, method: Method) -> Option<&MethodRow> {
        self.rows.iter().find(|r| r.method == method)
    }

    /// One CSV row per method. Failed metrics are left empty and the
    /// error message lands in the last column.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "method,rmse_to_clean,noisy_rmse,derivative_std_original,derivative_std_interpolated,wall_time_secs,error\n",
        );
        for row in &self.rows {
            let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
            let err = row
                .error
                .as_deref()
                .map(csv_escape)
                .unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                row.method,
                opt(row.rmse_to_clean),
                row.noisy_rmse,
                row.derivative_std_original,
                opt(row.derivative_std_interpolated),
                row.wall_time_secs,
                err
            ));
        }
        out
    }

    /// Human-oriented table with the shared context lines underneath.
    pub fn to_pretty(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<12} {:>14} {:>12} {:>14} {:>16} {:>10}\n",
            "method", "rmse_to_clean", "noisy_rmse", "deriv_std_orig", "deriv_std_interp", "time_s"
        ));
        for row in &self.rows {
            let opt = |x: Option<f64>| x.map(|v| format!("{v:.6}")).unwrap_or_else(|| "-".into());
            out.push_str(&format!(
                "{:<12} {:>14} {:>12.6} {:>14.6} {:>16} {:>10.3}\n",
                row.method.name(),
                opt(row.rmse_to_clean),
                row.noisy_rmse,
                row.derivative_std_original,
                opt(row.derivative_std_interpolated),
                row.wall_time_secs
            ));
            if let Some(err) = &row.error {
                out.push_str(&format!("{:<12} error: {err}\n", ""));
            }
        }
        out.push_str(&format!("grid points: {}\n", self.grid_points));
        if let Some(std) = self.clean_derivative_std {
            out.push_str(&format!("clean signal derivative std (closed form): {std:.6}\n"));
        }
        out.push_str(
            "note: the first grid point lies one sample interval before the data (extrapolated)\n",
        );
        out
    }
}

fn csv_escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Fits every requested method on the noisy series and measures it
/// against the clean one.
///
/// Each method runs the same pipeline the CLI uses: normalize, fit on the
/// normalized samples, evaluate at the sample times (for RMSE against the
/// clean signal) and on the dense grid (for the derivative spread), then
/// rescale back. A failure in one method becomes an error row and never
/// aborts the others. Rows come back sorted by method name.
pub fn run_comparison(
    noisy: &TimeSeries,
    clean: &TimeSeries,
    methods: &[Method],
    grid_points: usize,
    train_config: &TrainConfig,
) -> Result<ComparisonReport, BenchError> {
    if noisy.len() != clean.len()
        || noisy
            .times()
            .iter()
            .zip(clean.times())
            .any(|(a, b)| a != b)
    {
        return Err(BenchError::TimeMismatch);
    }

    let noisy_rmse = rmse(noisy.values(), clean.values())?;
    let derivative_std_original = sample_std(noisy.finite_diff_derivative()?.rates());

    let (normalized, params) = noisy.normalize()?;
    let grid = make_dense_grid(normalized.times(), grid_points)?;
    let grid_raw = params.denormalize_times(&grid);

    let mut sorted: Vec<Method> = methods.to_vec();
    sorted.sort();
    sorted.dedup();

    let mut rows = Vec::with_capacity(sorted.len());
    for method in sorted {
        let started = Instant::now();
        let outcome = fit_and_measure(method, &normalized, &params, &grid, &grid_raw, clean, train_config);
        let wall_time_secs = started.elapsed().as_secs_f64();
        let row = match outcome {
            Ok((rmse_to_clean, derivative_std_interpolated, grid_derivative)) => MethodRow {
                method,
                rmse_to_clean: Some(rmse_to_clean),
                noisy_rmse,
                derivative_std_original,
                derivative_std_interpolated: Some(derivative_std_interpolated),
                wall_time_secs,
                error: None,
                grid_derivative: Some(grid_derivative),
            },
            Err(message) => MethodRow {
                method,
                rmse_to_clean: None,
                noisy_rmse,
                derivative_std_original,
                derivative_std_interpolated: None,
                wall_time_secs,
                error: Some(message),
                grid_derivative: None,
            },
        };
        rows.push(row);
    }

    Ok(ComparisonReport {
        rows,
        grid_points,
        clean_derivative_std: None,
    })
}

type MethodMeasurements = (f64, f64, crate::series::DerivativeSeries);

fn fit_and_measure(
    method: Method,
    normalized: &TimeSeries,
    params: &NormalizationParams,
    grid: &[f64],
    grid_raw: &[f64],
    clean: &TimeSeries,
    train_config: &TrainConfig,
) -> Result<MethodMeasurements, String> {
    let stringify = |e: &dyn fmt::Display| e.to_string();

    // Normalized predictions at the sample times and on the grid, plus
    // the subset of raw grid times the method could evaluate.
    let (at_samples, on_grid, grid_times): (Vec<f64>, Vec<f64>, Vec<f64>) = match method {
        Method::Neural => {
            let model = MlpModel::build(1, &default_architecture(), train_config.seed)
                .map_err(|e| stringify(&e))?;
            let (trained, _) = train(model, normalized, train_config).map_err(|e| stringify(&e))?;
            let s = trained.predict(normalized.times()).map_err(|e| stringify(&e))?;
            let g = trained.predict(grid).map_err(|e| stringify(&e))?;
            (s, g, grid_raw.to_vec())
        }
        Method::Linear => {
            let model = LinearModel::fit(normalized).map_err(|e| stringify(&e))?;
            let s = normalized.times().iter().map(|&t| model.eval(t)).collect();
            let g = grid.iter().map(|&t| model.eval(t)).collect();
            (s, g, grid_raw.to_vec())
        }
        Method::Polynomial => {
            let model = PolynomialModel::fit(normalized).map_err(|e| stringify(&e))?;
            let s = normalized.times().iter().map(|&t| model.eval(t)).collect();
            let g = grid.iter().map(|&t| model.eval(t)).collect();
            (s, g, grid_raw.to_vec())
        }
        Method::Spline => {
            let model = SplineModel::fit(normalized).map_err(|e| stringify(&e))?;
            let s = normalized
                .times()
                .iter()
                .map(|&t| model.eval(t))
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|e| stringify(&e))?;
            // The spline never extrapolates, so grid points ahead of the
            // first knot are skipped.
            let first = normalized.times()[0];
            let last = normalized.times()[normalized.len() - 1];
            let mut g = Vec::with_capacity(grid.len());
            let mut kept = Vec::with_capacity(grid.len());
            for (&t, &t_raw) in grid.iter().zip(grid_raw) {
                if t >= first && t <= last {
                    g.push(model.eval(t).map_err(|e| stringify(&e))?);
                    kept.push(t_raw);
                }
            }
            (s, g, kept)
        }
    };

    let predictions_raw = params.denormalize_values(&at_samples);
    let rmse_to_clean = rmse(&predictions_raw, clean.values()).map_err(|e| stringify(&e))?;

    let grid_values_raw = params.denormalize_values(&on_grid);
    let grid_series = TimeSeries::new(grid_times, grid_values_raw).map_err(|e| stringify(&e))?;
    let grid_derivative = grid_series
        .finite_diff_derivative()
        .map_err(|e| stringify(&e))?;
    let derivative_std_interpolated = sample_std(grid_derivative.rates());

    Ok((rmse_to_clean, derivative_std_interpolated, grid_derivative))
}

/// Sample standard deviation (n - 1 denominator); zero for fewer than two
/// entries.
pub fn sample_std(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    var.sqrt()
}
