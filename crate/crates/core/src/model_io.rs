//! Deterministic `.model.json` serialization of fitted models.
//!
//! The container is plain JSON with sorted keys and shortest round-trip
//! float encoding, so the same model always serializes to the same bytes
//! and `load(save(m))` reproduces `m` bit for bit. Layout:
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "kind": "mlp" | "linear" | "polynomial" | "spline",
//!   "architecture": { ... per-kind metadata ... },
//!   "parameter_count": 21155,
//!   "parameters": [ ... flat array, documented order ... ],
//!   "normalization": { "t_start": ..., "t_end": ..., "v_min": ..., "v_max": ... },
//!   "provenance": { "seed": ..., "epochs": ..., "final_loss": ... },
//!   "grid": { "second_time_normalized": ... }
//! }
//! ```
//!
//! Parameter order per kind:
//! - `mlp`: per layer, row-major weights then biases;
//!   `architecture = {"input_width", "layers": [{"width", "activation"}]}`.
//! - `linear`: `[intercept, slope]`; `architecture = {}`.
//! - `polynomial`: coefficients in ascending degree;
//!   `architecture = {"degree"}`.
//! - `spline`: knot times, then knot values, then per-knot second
//!   derivatives; `architecture = {"knots", "boundary": "natural"}`.
//!
//! `provenance` and `grid` are optional; `grid.second_time_normalized`
//! (the second training timestamp after normalization) lets `predict`
//! rebuild the dense query grid without re-reading the training CSV.

use crate::classical::{LinearModel, PolynomialModel, SplineModel};
use crate::error::ModelIoError;
use crate::nn::{LayerSpec, MlpModel};
use crate::series::NormalizationParams;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

pub const FORMAT_VERSION: u32 = 1;

/// Any model the pipeline can persist.
#[derive(Debug, Clone, PartialEq)]
pub enum SavedModel {
    Mlp(MlpModel),
    Linear(LinearModel),
    Polynomial(PolynomialModel),
    Spline(SplineModel),
}

impl SavedModel {
    pub fn kind(&self) -> &'static str {
        match self {
            SavedModel::Mlp(_) => "mlp",
            SavedModel::Linear(_) => "linear",
            SavedModel::Polynomial(_) => "polynomial",
            SavedModel::Spline(_) => "spline",
        }
    }
}

/// How a trained model came to be.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub epochs: usize,
    pub final_loss: f64,
}

/// Grid metadata recorded at training time (see the module docs).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridHint {
    pub second_time_normalized: f64,
}

/// A model plus everything needed to use it on raw data.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub model: SavedModel,
    pub normalization: NormalizationParams,
    pub provenance: Option<Provenance>,
    pub grid: Option<GridHint>,
}

#[derive(Serialize, Deserialize)]
struct FileRepr {
    format_version: u32,
    kind: String,
    architecture: serde_json::Value,
    parameter_count: usize,
    parameters: Vec<f64>,
    normalization: NormalizationParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    provenance: Option<Provenance>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<GridHint>,
}

#[derive(Serialize, Deserialize)]
struct MlpArchitecture {
    input_width: usize,
    layers: Vec<LayerSpec>,
}

#[derive(Serialize, Deserialize)]
struct PolynomialArchitecture {
    degree: usize,
}

#[derive(Serialize, Deserialize)]
struct SplineArchitecture {
    knots: usize,
    boundary: String,
}

/// Serializes any value to pretty JSON with lexicographically sorted keys.
/// Same value, same bytes.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<String, serde_json::Error> {
    // Round-tripping through Value sorts the keys (its map is a BTreeMap).
    let tree = serde_json::to_value(value)?;
    let mut text = serde_json::to_string_pretty(&tree)?;
    text.push('\n');
    Ok(text)
}

/// Canonical serialization of a model file.
pub fn to_json_bytes(file: &ModelFile) -> Result<Vec<u8>, ModelIoError> {
    let (architecture, parameters) = match &file.model {
        SavedModel::Mlp(model) => {
            let arch = MlpArchitecture {
                input_width: model.input_width(),
                layers: model.specs(),
            };
            (to_value(&arch)?, model.parameters())
        }
        SavedModel::Linear(model) => (
            serde_json::Value::Object(serde_json::Map::new()),
            vec![model.intercept, model.slope],
        ),
        SavedModel::Polynomial(model) => {
            let arch = PolynomialArchitecture {
                degree: model.degree(),
            };
            (to_value(&arch)?, model.coefficients().to_vec())
        }
        SavedModel::Spline(model) => {
            let arch = SplineArchitecture {
                knots: model.knot_times().len(),
                boundary: "natural".to_string(),
            };
            let mut params = model.knot_times().to_vec();
            params.extend_from_slice(model.knot_values());
            params.extend_from_slice(model.second_derivs());
            (to_value(&arch)?, params)
        }
    };
    let repr = FileRepr {
        format_version: FORMAT_VERSION,
        kind: file.model.kind().to_string(),
        architecture,
        parameter_count: parameters.len(),
        parameters,
        normalization: file.normalization,
        provenance: file.provenance.clone(),
        grid: file.grid,
    };
    let text = canonical_json(&repr).map_err(|e| ModelIoError::Corrupt {
        reason: e.to_string(),
    })?;
    Ok(text.into_bytes())
}

fn to_value<T: Serialize>(value: &T) -> Result<serde_json::Value, ModelIoError> {
    serde_json::to_value(value).map_err(|e| ModelIoError::Corrupt {
        reason: e.to_string(),
    })
}

/// Parses and validates a model file. The version gate runs before full
/// parsing so future layouts fail with `UnknownVersion`, not `Corrupt`.
pub fn from_json_bytes(bytes: &[u8]) -> Result<ModelFile, ModelIoError> {
    let corrupt = |reason: String| ModelIoError::Corrupt { reason };
    let tree: serde_json::Value =
        serde_json::from_slice(bytes).map_err(|e| corrupt(e.to_string()))?;
    let version = tree
        .get("format_version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| corrupt("missing format_version".into()))?;
    if version != FORMAT_VERSION as u64 {
        return Err(ModelIoError::UnknownVersion {
            found: version,
            supported: FORMAT_VERSION,
        });
    }
    let repr: FileRepr = serde_json::from_value(tree).map_err(|e| corrupt(e.to_string()))?;
    if repr.parameter_count != repr.parameters.len() {
        return Err(ModelIoError::CountMismatch {
            expected: repr.parameter_count,
            found: repr.parameters.len(),
        });
    }
    if repr.parameters.iter().any(|p| !p.is_finite()) {
        return Err(corrupt("non-finite parameter".into()));
    }

    let model = match repr.kind.as_str() {
        "mlp" => {
            let arch: MlpArchitecture = serde_json::from_value(repr.architecture)
                .map_err(|e| corrupt(format!("bad mlp architecture: {e}")))?;
            let expected: usize = {
                let mut fan_in = arch.input_width;
                let mut total = 0;
                for layer in &arch.layers {
                    total += fan_in * layer.width + layer.width;
                    fan_in = layer.width;
                }
                total
            };
            if expected != repr.parameters.len() {
                return Err(ModelIoError::CountMismatch {
                    expected,
                    found: repr.parameters.len(),
                });
            }
            let model = MlpModel::from_parameters(arch.input_width, &arch.layers, &repr.parameters)
                .map_err(|e| corrupt(e.to_string()))?;
            SavedModel::Mlp(model)
        }
        "linear" => {
            if repr.parameters.len() != 2 {
                return Err(ModelIoError::CountMismatch {
                    expected: 2,
                    found: repr.parameters.len(),
                });
            }
            SavedModel::Linear(LinearModel {
                intercept: repr.parameters[0],
                slope: repr.parameters[1],
            })
        }
        "polynomial" => {
            let arch: PolynomialArchitecture = serde_json::from_value(repr.architecture)
                .map_err(|e| corrupt(format!("bad polynomial architecture: {e}")))?;
            if arch.degree + 1 != repr.parameters.len() {
                return Err(ModelIoError::CountMismatch {
                    expected: arch.degree + 1,
                    found: repr.parameters.len(),
                });
            }
            let model =
                PolynomialModel::new(repr.parameters.clone()).map_err(|e| corrupt(e.to_string()))?;
            SavedModel::Polynomial(model)
        }
        "spline" => {
            let arch: SplineArchitecture = serde_json::from_value(repr.architecture)
                .map_err(|e| corrupt(format!("bad spline architecture: {e}")))?;
            if arch.boundary != "natural" {
                return Err(corrupt(format!("unknown boundary `{}`", arch.boundary)));
            }
            if arch.knots * 3 != repr.parameters.len() {
                return Err(ModelIoError::CountMismatch {
                    expected: arch.knots * 3,
                    found: repr.parameters.len(),
                });
            }
            let n = arch.knots;
            let model = SplineModel::from_knots_and_curvatures(
                repr.parameters[..n].to_vec(),
                repr.parameters[n..2 * n].to_vec(),
                repr.parameters[2 * n..].to_vec(),
            )
            .map_err(|e| corrupt(e.to_string()))?;
            SavedModel::Spline(model)
        }
        other => return Err(corrupt(format!("unknown model kind `{other}`"))),
    };

    Ok(ModelFile {
        model,
        normalization: repr.normalization,
        provenance: repr.provenance,
        grid: repr.grid,
    })
}

pub fn save(file: &ModelFile, path: &Path) -> Result<(), ModelIoError> {
    let bytes = to_json_bytes(file)?;
    fs::write(path, bytes)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<ModelFile, ModelIoError> {
    let bytes = fs::read(path)?;
    from_json_bytes(&bytes)
}
