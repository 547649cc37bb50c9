//! End-to-end subcommand tests against the built binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn densefit(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_densefit"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn write_csv(dir: &Path, name: &str, rows: &[(f64, f64)]) -> PathBuf {
    let mut text = String::from("Time,Message\n");
    for (t, v) in rows {
        text.push_str(&format!("{t},{v}\n"));
    }
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn sensor_rows() -> Vec<(f64, f64)> {
    (0..12)
        .map(|i| {
            let t = 100.0 + i as f64 * 0.5;
            (t, 33.0 + 6.0 * i as f64 + if i % 2 == 0 { 1.5 } else { -1.5 })
        })
        .collect()
}

#[test]
fn train_writes_model_loss_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_csv(dir.path(), "in.csv", &sensor_rows());
    let out = dir.path().join("run");
    let result = densefit(
        &[
            "train",
            input.to_str().unwrap(),
            "--epochs",
            "5",
            "--arch",
            "1L,8R,1L",
            "-o",
            out.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(result.status.success(), "{result:?}");

    let model_path = out.join("model.model.json");
    let file = densefit_core::model_io::load(&model_path).unwrap();
    assert_eq!(file.model.kind(), "mlp");
    assert_eq!(file.provenance.as_ref().unwrap().epochs, 5);
    assert!(file.grid.is_some());

    let loss = fs::read_to_string(out.join("loss.csv")).unwrap();
    assert_eq!(loss.lines().count(), 6);
    assert!(loss.starts_with("epoch,loss"));

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "train");
    assert_eq!(manifest["config"]["epochs"], 5);
}

#[test]
fn train_rejects_zero_epochs() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_csv(dir.path(), "in.csv", &sensor_rows());
    let result = densefit(
        &["train", input.to_str().unwrap(), "--epochs", "0"],
        dir.path(),
    );
    assert!(!result.status.success());
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("\"error\""), "{stderr}");
}

#[test]
fn predict_default_grid_has_requested_points_at_the_right_ends() {
    let dir = tempfile::tempdir().unwrap();
    let rows = sensor_rows();
    let input = write_csv(dir.path(), "in.csv", &rows);
    let out = dir.path().join("run");
    assert!(densefit(
        &[
            "train",
            input.to_str().unwrap(),
            "--epochs",
            "3",
            "--arch",
            "1L,8R,1L",
            "-o",
            out.to_str().unwrap(),
        ],
        dir.path(),
    )
    .status
    .success());

    let model = out.join("model.model.json");
    let pred_out = dir.path().join("pred");
    let result = densefit(
        &[
            "predict",
            model.to_str().unwrap(),
            "--points",
            "2",
            "-o",
            pred_out.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(result.status.success(), "{result:?}");

    let text = fs::read_to_string(pred_out.join("interpolated.csv")).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data.len(), 3); // header + 2 rows
    let first_time: f64 = data[1].split(',').next().unwrap().parse().unwrap();
    let last_time: f64 = data[2].split(',').next().unwrap().parse().unwrap();
    // One sample interval ahead of the data, then the final sample time.
    assert!((first_time - (rows[0].0 - (rows[1].0 - rows[0].0))).abs() < 1e-9);
    assert!((last_time - rows.last().unwrap().0).abs() < 1e-9);
    assert!(text.contains("extrapolated"));

    // A denser grid keeps the row count contract.
    let pred_out2 = dir.path().join("pred2");
    assert!(densefit(
        &[
            "predict",
            model.to_str().unwrap(),
            "--points",
            "500",
            "-o",
            pred_out2.to_str().unwrap(),
        ],
        dir.path(),
    )
    .status
    .success());
    let text = fs::read_to_string(pred_out2.join("interpolated.csv")).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 501);
}

#[test]
fn predict_can_rebuild_the_grid_from_a_csv() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_csv(dir.path(), "in.csv", &sensor_rows());
    let out = dir.path().join("run");
    assert!(densefit(
        &[
            "train",
            input.to_str().unwrap(),
            "--epochs",
            "3",
            "--arch",
            "1L,8R,1L",
            "-o",
            out.to_str().unwrap(),
        ],
        dir.path(),
    )
    .status
    .success());
    let pred_out = dir.path().join("pred");
    let result = densefit(
        &[
            "predict",
            out.join("model.model.json").to_str().unwrap(),
            "--points",
            "40",
            "--csv",
            input.to_str().unwrap(),
            "-o",
            pred_out.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(result.status.success(), "{result:?}");
    let text = fs::read_to_string(pred_out.join("interpolated.csv")).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 41);
}

#[test]
fn derivative_matches_hand_arithmetic() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_csv(dir.path(), "in.csv", &[(0.0, 0.0), (1.0, 1.0), (2.0, 4.0)]);
    let out = dir.path().join("d");
    let result = densefit(
        &["derivative", input.to_str().unwrap(), "-o", out.to_str().unwrap()],
        dir.path(),
    );
    assert!(result.status.success());
    let text = fs::read_to_string(out.join("derivative.csv")).unwrap();
    assert_eq!(text, "Time,Rate\n1,1\n2,3\n");
}

#[test]
fn derivative_rejects_bad_rows_with_machine_readable_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    fs::write(&path, "Time,Message\n0,1\nnope,2\n").unwrap();
    let result = densefit(
        &["derivative", path.to_str().unwrap(), "-o", dir.path().to_str().unwrap()],
        dir.path(),
    );
    assert!(!result.status.success());
    let stderr = String::from_utf8_lossy(&result.stderr);
    let line = stderr.lines().next().unwrap();
    let parsed: serde_json::Value = serde_json::from_str(line).unwrap();
    assert!(parsed["error"].as_str().unwrap().contains("line 3"));
}

#[test]
fn compare_emits_report_table_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cmp");
    let result = densefit(
        &[
            "compare",
            "--synthetic",
            "default",
            "--methods",
            "linear,spline",
            "--points",
            "150",
            "-o",
            out.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(result.status.success(), "{result:?}");

    let report = fs::read_to_string(out.join("report.csv")).unwrap();
    let lines: Vec<&str> = report.trim_end().lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("linear,"));
    assert!(lines[2].starts_with("spline,"));

    let svg = fs::read_to_string(out.join("compare.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("Derivative on Original Data"));
    assert!(svg.contains("Derivative on Interpolated Data"));
    assert!(svg.contains(">Time<"));
    assert!(svg.contains(">Message<"));

    assert!(out.join("report.txt").exists());
    let stdout = String::from_utf8_lossy(&result.stdout);
    assert!(stdout.contains("noisy_rmse"));
}

#[test]
fn compare_single_method_gives_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cmp");
    let result = densefit(
        &[
            "compare",
            "--synthetic",
            "default",
            "--methods",
            "linear",
            "--points",
            "64",
            "-o",
            out.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(result.status.success());
    let report = fs::read_to_string(out.join("report.csv")).unwrap();
    assert_eq!(report.trim_end().lines().count(), 2);
}

#[test]
fn compare_accepts_a_spec_file_and_a_raw_csv() {
    let dir = tempfile::tempdir().unwrap();
    let spec_path = dir.path().join("spec.toml");
    fs::write(
        &spec_path,
        "n_samples = 30\nspan = [0.0, 1.0]\nnoise_sigma = 0.01\nseed = 3\n\n[signal]\nkind = \"sum-of-sines\"\noffset = 0.5\nterms = [[0.2, 1.0]]\n",
    )
    .unwrap();
    let out = dir.path().join("cmp");
    let result = densefit(
        &[
            "compare",
            "--synthetic",
            spec_path.to_str().unwrap(),
            "--methods",
            "spline",
            "--points",
            "50",
            "-o",
            out.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(result.status.success(), "{result:?}");

    // Real-capture mode: the series doubles as its own reference.
    let csv_path = write_csv(dir.path(), "cap.csv", &sensor_rows());
    let out2 = dir.path().join("cmp2");
    let result = densefit(
        &[
            "compare",
            "--csv",
            csv_path.to_str().unwrap(),
            "--methods",
            "spline,polynomial",
            "--points",
            "50",
            "-o",
            out2.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(result.status.success(), "{result:?}");
    let report = fs::read_to_string(out2.join("report.csv")).unwrap();
    assert_eq!(report.trim_end().lines().count(), 3);
}

#[test]
fn compare_rejects_unknown_methods_and_missing_sources() {
    let dir = tempfile::tempdir().unwrap();
    let result = densefit(
        &["compare", "--synthetic", "default", "--methods", "bogus"],
        dir.path(),
    );
    assert!(!result.status.success());
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("bogus"), "{stderr}");

    // Neither --synthetic nor --csv: clap usage error, nonzero exit.
    let result = densefit(&["compare", "--methods", "linear"], dir.path());
    assert!(!result.status.success());
}

#[test]
fn isolated_method_failure_still_exits_zero() {
    // 400 default samples exceed the polynomial cap; the harness records
    // the failure in the row and the run still succeeds.
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cmp");
    let result = densefit(
        &[
            "compare",
            "--synthetic",
            "default",
            "--methods",
            "polynomial,linear",
            "--points",
            "64",
            "-o",
            out.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(result.status.success());
    let report = fs::read_to_string(out.join("report.csv")).unwrap();
    let poly_line = report
        .lines()
        .find(|l| l.starts_with("polynomial,"))
        .unwrap();
    assert!(poly_line.contains("exceed"), "{poly_line}");
}

#[test]
fn predict_output_renormalizes_back_to_raw_model_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_csv(dir.path(), "in.csv", &sensor_rows());
    let out = dir.path().join("run");
    assert!(densefit(
        &[
            "train",
            input.to_str().unwrap(),
            "--epochs",
            "4",
            "--arch",
            "1L,6R,1L",
            "-o",
            out.to_str().unwrap(),
        ],
        dir.path(),
    )
    .status
    .success());
    let pred_out = dir.path().join("pred");
    assert!(densefit(
        &[
            "predict",
            out.join("model.model.json").to_str().unwrap(),
            "--points",
            "64",
            "-o",
            pred_out.to_str().unwrap(),
        ],
        dir.path(),
    )
    .status
    .success());

    // Re-normalizing the emitted values with the stored params must land
    // back on the raw model outputs.
    let file = densefit_core::model_io::load(&out.join("model.model.json")).unwrap();
    let densefit_core::model_io::SavedModel::Mlp(model) = &file.model else {
        panic!("expected mlp");
    };
    let hint = file.grid.unwrap().second_time_normalized;
    let grid = densefit_core::series::make_dense_grid(&[0.0, hint, 1.0], 64).unwrap();
    let raw_outputs = model.predict(&grid).unwrap();

    let text = fs::read_to_string(pred_out.join("interpolated.csv")).unwrap();
    let params = &file.normalization;
    for (line, raw) in text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .zip(&raw_outputs)
    {
        let value: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        let renormalized = (value - params.v_min) / (params.v_max - params.v_min);
        assert!(
            (renormalized - raw).abs() <= 1e-12 * raw.abs().max(1.0),
            "{renormalized} vs {raw}"
        );
    }
}

#[test]
fn predict_supports_classical_model_files() {
    use densefit_core::classical::SplineModel;
    use densefit_core::model_io::{save, ModelFile, SavedModel};
    use densefit_core::series::{NormalizationParams, TimeSeries};

    let dir = tempfile::tempdir().unwrap();
    let series = TimeSeries::new(
        vec![0.0, 0.2, 0.5, 0.8, 1.0],
        vec![0.1, 0.9, 0.3, 0.6, 0.2],
    )
    .unwrap();
    let file = ModelFile {
        model: SavedModel::Spline(SplineModel::fit(&series).unwrap()),
        normalization: NormalizationParams::identity(),
        provenance: None,
        grid: None,
    };
    let model_path = dir.path().join("spline.model.json");
    save(&file, &model_path).unwrap();

    // Without a grid hint the CLI needs the CSV to rebuild the grid.
    let result = densefit(
        &["predict", model_path.to_str().unwrap(), "--points", "10"],
        dir.path(),
    );
    assert!(!result.status.success());
    assert!(String::from_utf8_lossy(&result.stderr).contains("grid"));

    let csv = write_csv(
        dir.path(),
        "knots.csv",
        &[(0.0, 0.1), (0.2, 0.9), (0.5, 0.3), (0.8, 0.6), (1.0, 0.2)],
    );
    let out = dir.path().join("pred");
    let result = densefit(
        &[
            "predict",
            model_path.to_str().unwrap(),
            "--points",
            "10",
            "--csv",
            csv.to_str().unwrap(),
            "-o",
            out.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(result.status.success(), "{result:?}");
    let text = fs::read_to_string(out.join("interpolated.csv")).unwrap();
    // Grid runs from -0.2 to 1.0 in steps of 1.2/9; the two points below
    // the first knot are skipped.
    assert!(text.contains("2 grid point(s)"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 9);
}
