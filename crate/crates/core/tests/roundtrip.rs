//! Property tests for the round-trip and structural invariants.

use densefit_core::classical::SplineModel;
use densefit_core::model_io::{self, ModelFile, Provenance, SavedModel};
use densefit_core::nn::{Activation, LayerSpec, MlpModel};
use densefit_core::series::{make_dense_grid, NormalizationParams, TimeSeries};
use proptest::prelude::*;

/// Strictly increasing times with spans that stay well away from zero.
fn arb_times(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    (2..=max_len, -1e3f64..1e3)
        .prop_flat_map(|(n, start)| {
            (
                Just(start),
                prop::collection::vec(1e-3f64..10.0, n),
            )
        })
        .prop_map(|(start, steps)| {
            let mut t = start;
            steps
                .into_iter()
                .map(|dt| {
                    t += dt;
                    t
                })
                .collect()
        })
}

fn arb_series(max_len: usize) -> impl Strategy<Value = TimeSeries> {
    arb_times(max_len)
        .prop_flat_map(|times| {
            let n = times.len();
            (Just(times), prop::collection::vec(-1e3f64..1e3, n))
        })
        .prop_filter_map("degenerate value span", |(times, values)| {
            let spread = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - values.iter().cloned().fold(f64::INFINITY, f64::min);
            if spread > 1e-6 {
                TimeSeries::new(times, values).ok()
            } else {
                None
            }
        })
}

proptest! {
    #[test]
    fn normalization_round_trips_both_axes(series in arb_series(64)) {
        let (normalized, params) = series.normalize().unwrap();
        prop_assert_eq!(normalized.times()[0], 0.0);
        prop_assert_eq!(normalized.times()[normalized.len() - 1], 1.0);
        prop_assert!(normalized.is_normalized());

        let times_back = params.denormalize_times(normalized.times());
        let values_back = params.denormalize_values(normalized.values());
        for (back, orig) in times_back.iter().zip(series.times()) {
            prop_assert!((back - orig).abs() <= 1e-12 * orig.abs().max(1.0));
        }
        for (back, orig) in values_back.iter().zip(series.values()) {
            prop_assert!((back - orig).abs() <= 1e-12 * orig.abs().max(1.0));
        }
    }

    #[test]
    fn dense_grid_is_strictly_increasing_and_even(
        series in arb_series(32),
        n_points in 2usize..2000,
    ) {
        // Grids are built on normalized times in the pipeline; at raw
        // POSIX magnitudes the positions themselves cannot resolve a
        // span-relative spacing bound.
        let (normalized, _) = series.normalize().unwrap();
        let times = normalized.times();
        let grid = make_dense_grid(times, n_points).unwrap();
        prop_assert_eq!(grid.len(), n_points);
        prop_assert_eq!(grid[0], times[0] - (times[1] - times[0]));
        prop_assert_eq!(grid[n_points - 1], times[times.len() - 1]);

        let span = grid[n_points - 1] - grid[0];
        let mean_step = span / (n_points - 1) as f64;
        for pair in grid.windows(2) {
            let step = pair[1] - pair[0];
            prop_assert!(step > 0.0);
            prop_assert!((step - mean_step).abs() <= 4.0 * span * f64::EPSILON);
        }
    }

    #[test]
    fn spline_reproduces_random_affine_functions(
        times in arb_times(24),
        intercept in -10.0f64..10.0,
        slope in prop::sample::select(vec![-3.0, -0.5, 0.25, 1.0, 7.5]),
        queries in prop::collection::vec(0.0f64..1.0, 20),
    ) {
        prop_assume!(times.len() >= 3);
        let values: Vec<f64> = times.iter().map(|&t| intercept + slope * t).collect();
        let series = TimeSeries::new(times.clone(), values).unwrap();
        let spline = SplineModel::fit(&series).unwrap();
        let lo = times[0];
        let hi = times[times.len() - 1];
        for q in queries {
            let x = lo + q * (hi - lo);
            let expected = intercept + slope * x;
            let got = spline.eval(x).unwrap();
            prop_assert!(
                (got - expected).abs() <= 1e-10 * expected.abs().max(1.0),
                "x={}, got={}, expected={}", x, got, expected
            );
        }
    }
}

fn arb_mlp() -> impl Strategy<Value = MlpModel> {
    let layer = (1usize..6, prop::bool::ANY).prop_map(|(w, relu)| {
        LayerSpec::new(w, if relu { Activation::Relu } else { Activation::Linear })
    });
    (prop::collection::vec(layer, 1..4), any::<u64>(), 1usize..4).prop_map(
        |(mut specs, seed, input_width)| {
            specs.push(LayerSpec::new(1, Activation::Linear));
            MlpModel::build(input_width, &specs, seed).unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn model_files_round_trip_bit_exactly(model in arb_mlp(), seed in any::<u64>()) {
        let file = ModelFile {
            model: SavedModel::Mlp(model),
            normalization: NormalizationParams::new(0.0, 5.0, -2.0, 2.0).unwrap(),
            provenance: Some(Provenance { seed, epochs: 3, final_loss: 0.5 }),
            grid: None,
        };
        let bytes = model_io::to_json_bytes(&file).unwrap();
        prop_assert_eq!(&bytes, &model_io::to_json_bytes(&file).unwrap());
        let loaded = model_io::from_json_bytes(&bytes).unwrap();
        prop_assert_eq!(loaded, file);
    }

    #[test]
    fn spline_files_round_trip_bit_exactly(series in arb_series(16)) {
        prop_assume!(series.len() >= 3);
        let spline = SplineModel::fit(&series).unwrap();
        let file = ModelFile {
            model: SavedModel::Spline(spline),
            normalization: NormalizationParams::identity(),
            provenance: None,
            grid: None,
        };
        let bytes = model_io::to_json_bytes(&file).unwrap();
        let loaded = model_io::from_json_bytes(&bytes).unwrap();
        prop_assert_eq!(loaded, file);
    }
}
