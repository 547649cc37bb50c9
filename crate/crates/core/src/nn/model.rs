//! Dense feed-forward model: construction, forward pass, loss, and
//! reverse-mode gradients.

use crate::error::NnError;
use crate::rng;
use serde::{Deserialize, Serialize};

/// Per-unit nonlinearity of a dense layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Linear,
    Relu,
}

impl Activation {
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Linear => z,
            Activation::Relu => z.max(0.0),
        }
    }

    /// Subgradient; relu at exactly zero is defined as 0 so gradient
    /// checks are reproducible.
    pub fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Linear => 1.0,
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Width and activation of one dense layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub width: usize,
    pub activation: Activation,
}

impl LayerSpec {
    pub fn new(width: usize, activation: Activation) -> Self {
        Self { width, activation }
    }
}

/// The default interpolator stack: a width-1 linear layer, a relu body
/// narrowing to 32 units and widening back, and a width-1 linear head.
pub fn default_architecture() -> Vec<LayerSpec> {
    use Activation::{Linear, Relu};
    vec![
        LayerSpec::new(1, Linear),
        LayerSpec::new(128, Relu),
        LayerSpec::new(64, Relu),
        LayerSpec::new(32, Relu),
        LayerSpec::new(64, Relu),
        LayerSpec::new(128, Relu),
        LayerSpec::new(1, Linear),
    ]
}

/// One dense layer: row-major weights (`fan_out` rows by `fan_in`
/// columns), one bias per output unit, and an activation.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    weights: Vec<f64>,
    biases: Vec<f64>,
    activation: Activation,
    fan_in: usize,
    fan_out: usize,
}

impl Layer {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn fan_in(&self) -> usize {
        self.fan_in
    }

    pub fn fan_out(&self) -> usize {
        self.fan_out
    }

    /// Pre-activation `z = W x + b`.
    fn affine(&self, input: &[f64]) -> Vec<f64> {
        (0..self.fan_out)
            .map(|j| {
                let row = &self.weights[j * self.fan_in..(j + 1) * self.fan_in];
                let dot: f64 = row.iter().zip(input).map(|(w, x)| w * x).sum();
                dot + self.biases[j]
            })
            .collect()
    }
}

/// An ordered stack of dense layers acting on fixed-width inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    input_width: usize,
    layers: Vec<Layer>,
}

impl MlpModel {
    /// Builds a model with seeded uniform weights on
    /// `[-sqrt(6/(fan_in+fan_out)), sqrt(6/(fan_in+fan_out)))` and zero
    /// biases. Weights are drawn layer by layer in row-major order from a
    /// single ChaCha20 stream, so the same seed rebuilds the same model
    /// bit for bit.
    pub fn build(input_width: usize, specs: &[LayerSpec], seed: u64) -> Result<Self, NnError> {
        if specs.is_empty() {
            return Err(NnError::EmptyArchitecture);
        }
        if input_width == 0 || specs.iter().any(|s| s.width == 0) {
            return Err(NnError::ShapeMismatch {
                context: "layer widths must be positive".into(),
            });
        }
        let mut stream = rng::stream(seed);
        let mut fan_in = input_width;
        let mut layers = Vec::with_capacity(specs.len());
        for spec in specs {
            let fan_out = spec.width;
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let weights = (0..fan_in * fan_out)
                .map(|_| (2.0 * rng::unit_uniform(&mut stream) - 1.0) * limit)
                .collect();
            layers.push(Layer {
                weights,
                biases: vec![0.0; fan_out],
                activation: spec.activation,
                fan_in,
                fan_out,
            });
            fan_in = fan_out;
        }
        Ok(Self {
            input_width,
            layers,
        })
    }

    /// Rebuilds a model from a flat parameter vector in the canonical
    /// order (per layer: row-major weights, then biases).
    pub fn from_parameters(
        input_width: usize,
        specs: &[LayerSpec],
        params: &[f64],
    ) -> Result<Self, NnError> {
        let mut model = Self::build(input_width, specs, 0)?;
        model.set_parameters(params)?;
        Ok(model)
    }

    pub fn input_width(&self) -> usize {
        self.input_width
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn specs(&self) -> Vec<LayerSpec> {
        self.layers
            .iter()
            .map(|l| LayerSpec::new(l.fan_out, l.activation))
            .collect()
    }

    pub fn output_width(&self) -> usize {
        self.layers.last().map(|l| l.fan_out).expect("nonempty")
    }

    /// Total number of weights and biases.
    pub fn parameter_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.fan_in * l.fan_out + l.fan_out)
            .sum()
    }

    /// Flattens all parameters in the canonical order.
    pub fn parameters(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.parameter_count());
        for layer in &self.layers {
            out.extend_from_slice(&layer.weights);
            out.extend_from_slice(&layer.biases);
        }
        out
    }

    /// Overwrites all parameters from a flat vector in the canonical order.
    pub fn set_parameters(&mut self, params: &[f64]) -> Result<(), NnError> {
        if params.len() != self.parameter_count() {
            return Err(NnError::ShapeMismatch {
                context: format!(
                    "expected {} parameters, got {}",
                    self.parameter_count(),
                    params.len()
                ),
            });
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(NnError::ShapeMismatch {
                context: "non-finite parameter".into(),
            });
        }
        let mut offset = 0;
        for layer in &mut self.layers {
            let w = layer.fan_in * layer.fan_out;
            layer.weights.copy_from_slice(&params[offset..offset + w]);
            offset += w;
            layer
                .biases
                .copy_from_slice(&params[offset..offset + layer.fan_out]);
            offset += layer.fan_out;
        }
        Ok(())
    }

    /// Runs the whole batch, recording pre- and post-activations for the
    /// backward pass.
    pub fn forward(&self, batch: &[Vec<f64>]) -> Result<(Vec<Vec<f64>>, ForwardCache), NnError> {
        for (i, sample) in batch.iter().enumerate() {
            if sample.len() != self.input_width {
                return Err(NnError::ShapeMismatch {
                    context: format!(
                        "sample {i} has width {}, model expects {}",
                        sample.len(),
                        self.input_width
                    ),
                });
            }
        }
        let mut pre = Vec::with_capacity(self.layers.len());
        let mut post = Vec::with_capacity(self.layers.len());
        let mut current: Vec<Vec<f64>> = batch.to_vec();
        for layer in &self.layers {
            let z_batch: Vec<Vec<f64>> = current.iter().map(|x| layer.affine(x)).collect();
            let a_batch: Vec<Vec<f64>> = z_batch
                .iter()
                .map(|z| z.iter().map(|&zi| layer.activation.apply(zi)).collect())
                .collect();
            pre.push(z_batch);
            post.push(a_batch.clone());
            current = a_batch;
        }
        Ok((
            current,
            ForwardCache {
                inputs: batch.to_vec(),
                pre,
                post,
            },
        ))
    }

    /// Forward pass for a single sample without caching. Arithmetic is
    /// identical to `forward` (same `affine` + activation path).
    fn eval_one(&self, input: &[f64]) -> Vec<f64> {
        let mut current = input.to_vec();
        for layer in &self.layers {
            current = layer
                .affine(&current)
                .into_iter()
                .map(|z| layer.activation.apply(z))
                .collect();
        }
        current
    }

    /// Scalar time-to-value inference used by the interpolation pipeline.
    /// Requires a width-1 input and width-1 output.
    pub fn predict(&self, times: &[f64]) -> Result<Vec<f64>, NnError> {
        if self.input_width != 1 || self.output_width() != 1 {
            return Err(NnError::ShapeMismatch {
                context: format!(
                    "predict needs a 1->1 model, got {}->{}",
                    self.input_width,
                    self.output_width()
                ),
            });
        }
        Ok(times.iter().map(|&t| self.eval_one(&[t])[0]).collect())
    }

    /// Reverse-mode gradients of whatever scalar produced
    /// `output_gradient` (one row per sample, `d scalar / d output`).
    pub fn backward(
        &self,
        cache: &ForwardCache,
        output_gradient: &[Vec<f64>],
    ) -> Result<Gradients, NnError> {
        let depth = self.layers.len();
        if cache.pre.len() != depth || cache.post.len() != depth {
            return Err(NnError::CacheMismatch {
                context: format!("cache depth {} vs model depth {depth}", cache.pre.len()),
            });
        }
        let batch_len = cache.inputs.len();
        if output_gradient.len() != batch_len {
            return Err(NnError::CacheMismatch {
                context: format!(
                    "gradient batch {} vs cached batch {batch_len}",
                    output_gradient.len()
                ),
            });
        }
        let out_width = self.output_width();
        if output_gradient.iter().any(|g| g.len() != out_width) {
            return Err(NnError::CacheMismatch {
                context: format!("gradient width differs from output width {out_width}"),
            });
        }
        for (l, layer) in self.layers.iter().enumerate() {
            if cache.pre[l].len() != batch_len
                || cache.pre[l].iter().any(|z| z.len() != layer.fan_out)
            {
                return Err(NnError::CacheMismatch {
                    context: format!("cached layer {l} does not match the model"),
                });
            }
        }

        let mut grads: Vec<LayerGradient> = self
            .layers
            .iter()
            .map(|l| LayerGradient {
                weights: vec![0.0; l.fan_in * l.fan_out],
                biases: vec![0.0; l.fan_out],
            })
            .collect();

        let mut upstream: Vec<Vec<f64>> = output_gradient.to_vec();
        for l in (0..depth).rev() {
            let layer = &self.layers[l];
            let mut downstream = vec![vec![0.0; layer.fan_in]; batch_len];
            for s in 0..batch_len {
                let z = &cache.pre[l][s];
                let prev = if l == 0 {
                    &cache.inputs[s]
                } else {
                    &cache.post[l - 1][s]
                };
                for j in 0..layer.fan_out {
                    let delta = upstream[s][j] * layer.activation.derivative(z[j]);
                    if delta == 0.0 {
                        continue;
                    }
                    grads[l].biases[j] += delta;
                    let w_row = &layer.weights[j * layer.fan_in..(j + 1) * layer.fan_in];
                    let g_row = &mut grads[l].weights[j * layer.fan_in..(j + 1) * layer.fan_in];
                    for k in 0..layer.fan_in {
                        g_row[k] += delta * prev[k];
                        downstream[s][k] += w_row[k] * delta;
                    }
                }
            }
            upstream = downstream;
        }
        Ok(Gradients { layers: grads })
    }
}

/// Per-layer records of one forward pass, enough to run `backward`.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    inputs: Vec<Vec<f64>>,
    pre: Vec<Vec<Vec<f64>>>,
    post: Vec<Vec<Vec<f64>>>,
}

impl ForwardCache {
    pub fn batch_len(&self) -> usize {
        self.inputs.len()
    }
}

/// Gradient of one layer's parameters, shaped exactly like the layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGradient {
    pub weights: Vec<f64>,
    pub biases: Vec<f64>,
}

/// Gradients for every parameter of a model.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<LayerGradient>,
}

impl Gradients {
    /// Flattens in the same canonical order as `MlpModel::parameters`.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for layer in &self.layers {
            out.extend_from_slice(&layer.weights);
            out.extend_from_slice(&layer.biases);
        }
        out
    }
}

/// Mean squared error and its gradient with respect to the predictions:
/// `loss = mean((p - y)^2)`, `grad = 2 (p - y) / n`.
pub fn mse_loss(predictions: &[f64], targets: &[f64]) -> Result<(f64, Vec<f64>), NnError> {
    if predictions.len() != targets.len() {
        return Err(NnError::LengthMismatch {
            left: predictions.len(),
            right: targets.len(),
        });
    }
    if predictions.is_empty() {
        return Err(NnError::Empty);
    }
    let n = predictions.len() as f64;
    let mut loss = 0.0;
    let mut grad = Vec::with_capacity(predictions.len());
    for (&p, &y) in predictions.iter().zip(targets) {
        let d = p - y;
        loss += d * d;
        grad.push(2.0 * d / n);
    }
    Ok((loss / n, grad))
}
