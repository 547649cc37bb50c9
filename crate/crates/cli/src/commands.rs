//! Subcommand implementations.

use crate::manifest::RunManifest;
use crate::svg;
use crate::{CompareArgs, DerivativeArgs, PredictArgs, TrainArgs};
use densefit_core::bench::{self, Method, SyntheticSpec};
use densefit_core::csv_io;
use densefit_core::error::{BenchError, CsvError, FitError, ModelIoError, NnError, SeriesError};
use densefit_core::model_io::{self, GridHint, ModelFile, Provenance, SavedModel};
use densefit_core::nn::{self, Activation, BatchMode, LayerSpec, MlpModel, TrainConfig};
use densefit_core::series::{make_dense_grid, NormalizationParams, TimeSeries};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Csv(#[from] CsvError),

    #[error(transparent)]
    Series(#[from] SeriesError),

    #[error(transparent)]
    Nn(#[from] NnError),

    #[error(transparent)]
    Fit(#[from] FitError),

    #[error(transparent)]
    Bench(#[from] BenchError),

    #[error(transparent)]
    ModelIo(#[from] ModelIoError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Parses a stack description like `1L,128R,64R,32R,64R,128R,1L`.
fn parse_arch(text: &str) -> Result<Vec<LayerSpec>, CliError> {
    let mut specs = Vec::new();
    for token in text.split(',') {
        let token = token.trim();
        let (digits, act) = token.split_at(token.len().saturating_sub(1));
        let activation = match act {
            "L" | "l" => Activation::Linear,
            "R" | "r" => Activation::Relu,
            _ => {
                return Err(CliError::Config(format!(
                    "bad layer token `{token}`: expected <width>L or <width>R"
                )))
            }
        };
        let width: usize = digits.parse().map_err(|_| {
            CliError::Config(format!("bad layer width in `{token}`"))
        })?;
        if width == 0 {
            return Err(CliError::Config(format!("zero width in `{token}`")));
        }
        specs.push(LayerSpec::new(width, activation));
    }
    Ok(specs)
}

/// Parses `full` or a positive integer batch size.
fn parse_batch(text: &str) -> Result<BatchMode, CliError> {
    if text.eq_ignore_ascii_case("full") {
        return Ok(BatchMode::Full);
    }
    let size: usize = text
        .parse()
        .map_err(|_| CliError::Config(format!("bad batch `{text}`: expected `full` or a size")))?;
    if size == 0 {
        return Err(CliError::Config("batch size must be positive".into()));
    }
    Ok(BatchMode::MiniBatch(size))
}

fn parse_methods(tokens: &[String]) -> Result<Vec<Method>, CliError> {
    tokens
        .iter()
        .map(|t| t.parse::<Method>().map_err(CliError::Config))
        .collect()
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents)?;
    Ok(())
}

pub fn train(args: TrainArgs) -> Result<(), CliError> {
    let specs = parse_arch(&args.arch)?;
    let batch = parse_batch(&args.batch)?;
    let config = TrainConfig {
        epochs: args.epochs,
        batch,
        learning_rate: args.lr,
        seed: args.seed,
        ..TrainConfig::default()
    };
    config.validate()?;

    let series = csv_io::read_series_from_path(&args.input)?;
    let (normalized, params) = if args.already_normalized {
        (series, NormalizationParams::identity())
    } else {
        series.normalize()?
    };
    if normalized.len() < 2 {
        return Err(CliError::Config("need at least 2 samples to train".into()));
    }

    let model = MlpModel::build(1, &specs, config.seed)?;
    let (trained, report) = nn::train(model, &normalized, &config)?;

    fs::create_dir_all(&args.out_dir)?;
    let model_path = args.out_dir.join("model.model.json");
    let file = ModelFile {
        model: SavedModel::Mlp(trained),
        normalization: params,
        provenance: Some(Provenance {
            seed: config.seed,
            epochs: config.epochs,
            final_loss: report.final_loss,
        }),
        grid: Some(GridHint {
            second_time_normalized: normalized.times()[1],
        }),
    };
    model_io::save(&file, &model_path)?;

    let loss_path = args.out_dir.join("loss.csv");
    let mut loss_csv = String::from("epoch,loss\n");
    for (i, loss) in report.loss_history.iter().enumerate() {
        loss_csv.push_str(&format!("{},{}\n", i + 1, loss));
    }
    write_file(&loss_path, loss_csv.as_bytes())?;

    RunManifest::new(
        "train",
        &[&args.input],
        &[&model_path, &loss_path],
        serde_json::json!({
            "epochs": args.epochs,
            "seed": args.seed,
            "batch": args.batch,
            "lr": args.lr,
            "already_normalized": args.already_normalized,
            "arch": args.arch,
        }),
    )
    .write(&args.out_dir)?;

    println!(
        "trained {} epochs, final loss {:.6e}, wrote {}",
        args.epochs,
        report.final_loss,
        model_path.display()
    );
    Ok(())
}

/// Normalized query grid for a loaded model: either rebuilt from a CSV's
/// times or from the grid hint stored at training time.
fn query_grid(
    file: &ModelFile,
    csv: Option<&PathBuf>,
    points: usize,
) -> Result<Vec<f64>, CliError> {
    if let Some(path) = csv {
        let series = csv_io::read_series_from_path(path)?;
        let times: Vec<f64> = series
            .times()
            .iter()
            .map(|&t| {
                let params = &file.normalization;
                params.normalize_time(t)
            })
            .collect();
        return Ok(make_dense_grid(&times, points)?);
    }
    let hint = file.grid.as_ref().ok_or_else(|| {
        CliError::Config(
            "model file has no grid hint; pass --csv to rebuild the grid".into(),
        )
    })?;
    let second = hint.second_time_normalized;
    if second > 0.0 && second < 1.0 {
        Ok(make_dense_grid(&[0.0, second, 1.0], points)?)
    } else {
        Ok(make_dense_grid(&[0.0, 1.0], points)?)
    }
}

pub fn predict(args: PredictArgs) -> Result<(), CliError> {
    let file = model_io::load(&args.model)?;
    let grid = query_grid(&file, args.csv.as_ref(), args.points)?;

    // Evaluate in normalized coordinates. The spline cannot extrapolate,
    // so leading grid points outside its knots are dropped.
    let mut skipped = 0usize;
    let (times_norm, values_norm): (Vec<f64>, Vec<f64>) = match &file.model {
        SavedModel::Mlp(model) => (grid.clone(), model.predict(&grid)?),
        SavedModel::Linear(model) => {
            (grid.clone(), grid.iter().map(|&t| model.eval(t)).collect())
        }
        SavedModel::Polynomial(model) => {
            (grid.clone(), grid.iter().map(|&t| model.eval(t)).collect())
        }
        SavedModel::Spline(model) => {
            let lo = model.knot_times()[0];
            let hi = model.knot_times()[model.knot_times().len() - 1];
            let mut kept = Vec::with_capacity(grid.len());
            let mut values = Vec::with_capacity(grid.len());
            for &t in &grid {
                if t < lo || t > hi {
                    skipped += 1;
                    continue;
                }
                kept.push(t);
                values.push(model.eval(t)?);
            }
            (kept, values)
        }
    };

    let params = &file.normalization;
    let times = params.denormalize_times(&times_norm);
    let values = params.denormalize_values(&values_norm);

    let mut comments = vec![format!(
        "kind: {} ({} grid points requested)",
        file.model.kind(),
        args.points
    )];
    if skipped > 0 {
        comments.push(format!(
            "{skipped} grid point(s) outside the knot range were skipped (no extrapolation)"
        ));
    } else {
        comments.push(
            "first row lies one sample interval before the data range (extrapolated)".to_string(),
        );
    }

    fs::create_dir_all(&args.out_dir)?;
    let out_path = args.out_dir.join("interpolated.csv");
    let mut buffer = Vec::new();
    csv_io::write_series(&mut buffer, &times, &values, &comments)?;
    write_file(&out_path, &buffer)?;

    RunManifest::new(
        "predict",
        &[&args.model],
        &[&out_path],
        serde_json::json!({
            "points": args.points,
            "csv": args.csv.as_ref().map(|p| p.display().to_string()),
        }),
    )
    .write(&args.out_dir)?;

    println!("wrote {} ({} rows)", out_path.display(), times.len());
    Ok(())
}

pub fn derivative(args: DerivativeArgs) -> Result<(), CliError> {
    let series = csv_io::read_series_from_path(&args.input)?;
    let derivative = series.finite_diff_derivative()?;

    fs::create_dir_all(&args.out_dir)?;
    let out_path = args.out_dir.join("derivative.csv");
    let mut buffer = Vec::new();
    csv_io::write_derivative(&mut buffer, &derivative)?;
    write_file(&out_path, &buffer)?;

    RunManifest::new(
        "derivative",
        &[&args.input],
        &[&out_path],
        serde_json::json!({}),
    )
    .write(&args.out_dir)?;

    println!("wrote {} ({} rows)", out_path.display(), derivative.len());
    Ok(())
}

pub fn compare(args: CompareArgs) -> Result<(), CliError> {
    let methods = parse_methods(&args.methods)?;
    let batch = parse_batch(&args.batch)?;
    let config = TrainConfig {
        epochs: args.epochs,
        batch,
        learning_rate: args.lr,
        seed: args.seed,
        ..TrainConfig::default()
    };
    config.validate()?;

    // Benchmark source: a synthetic spec with a known clean signal, or a
    // real capture measured against itself.
    let (noisy, clean, spec): (TimeSeries, TimeSeries, Option<SyntheticSpec>) =
        if let Some(source) = &args.source.synthetic {
            let spec = if source == "default" {
                SyntheticSpec::default()
            } else {
                let text = fs::read_to_string(source)?;
                toml::from_str(&text)
                    .map_err(|e| CliError::Config(format!("bad spec file {source}: {e}")))?
            };
            let (noisy, clean) = bench::generate(&spec)?;
            (noisy, clean, Some(spec))
        } else {
            let path = args.source.csv.as_ref().expect("clap enforces the group");
            let series = csv_io::read_series_from_path(path)?;
            (series.clone(), series, None)
        };

    let mut report = bench::run_comparison(&noisy, &clean, &methods, args.points, &config)?;
    report.clean_derivative_std = spec.as_ref().map(|s| s.analytic_derivative_std());

    fs::create_dir_all(&args.out_dir)?;
    let csv_path = args.out_dir.join("report.csv");
    write_file(&csv_path, report.to_csv().as_bytes())?;
    let text_path = args.out_dir.join("report.txt");
    write_file(&text_path, report.to_pretty().as_bytes())?;

    // The derivative scatter: raw observations against the best
    // interpolant's dense grid (the neural row when present).
    let svg_path = args.out_dir.join("compare.svg");
    let original = noisy.finite_diff_derivative()?;
    let interpolated = report
        .row(Method::Neural)
        .and_then(|r| r.grid_derivative.as_ref())
        .or_else(|| {
            report
                .rows
                .iter()
                .find_map(|r| r.grid_derivative.as_ref())
        });
    let mut series_list = vec![svg::Series {
        label: "Derivative on Original Data",
        color: "steelblue",
        radius: 3.0,
        xs: original.times(),
        ys: original.rates(),
    }];
    if let Some(d) = interpolated {
        series_list.push(svg::Series {
            label: "Derivative on Interpolated Data",
            color: "red",
            radius: 1.5,
            xs: d.times(),
            ys: d.rates(),
        });
    }
    write_file(
        &svg_path,
        svg::scatter("", "Time", "Message", &series_list).as_bytes(),
    )?;

    let mut inputs: Vec<&Path> = Vec::new();
    if let Some(path) = args.source.csv.as_ref() {
        inputs.push(path);
    }
    let spec_json = match &spec {
        Some(s) => serde_json::to_value(s).unwrap_or(serde_json::Value::Null),
        None => serde_json::Value::Null,
    };
    RunManifest::new(
        "compare",
        &inputs,
        &[&csv_path, &text_path, &svg_path],
        serde_json::json!({
            "synthetic": args.source.synthetic,
            "spec": spec_json,
            "methods": methods.iter().map(|m| m.name()).collect::<Vec<_>>(),
            "points": args.points,
            "epochs": args.epochs,
            "seed": args.seed,
            "batch": args.batch,
            "lr": args.lr,
        }),
    )
    .write(&args.out_dir)?;

    let mut stdout = std::io::stdout().lock();
    write!(stdout, "{}", report.to_pretty())?;
    Ok(())
}
