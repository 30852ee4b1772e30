//! From-scratch stacked-LSTM regressor.
//!
//! Per timestep a cell computes
//!
//! ```text
//! i = σ(W_i·[x_t, h_{t-1}] + b_i)      f = σ(W_f·[x_t, h_{t-1}] + b_f)
//! o = σ(W_o·[x_t, h_{t-1}] + b_o)      c_t = f ⊙ c_{t-1} + i ⊙ tanh(W_c·[x_t, h_{t-1}] + b_c)
//! h_t = o ⊙ tanh(c_t)
//! ```
//!
//! Layer 0 consumes the scaled sample stepwise from zero states; each
//! non-final layer feeds its full output sequence to the next (with
//! inverted dropout at train time); the final layer's last hidden state
//! goes through a linear dense head to a single unclamped value. Training
//! runs full-sequence BPTT with Adam, gradient-norm clipping, and
//! validation-based early stopping, all deterministic for a given seed.

mod bptt;
mod checkpoint;
mod train;

pub use bptt::{backward_batch, Gradients};
pub use checkpoint::{load_checkpoint, save_checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use train::{evaluate, train, write_loss_log, DropoutMasks};

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::Rng;

use crate::cluster::ClusterModel;
use crate::dataset::{Sample, ScalerParams, NUM_FEATURES, TARGET_DIM};
use crate::error::{Error, Result};

/// Gate weights over the concatenated `[x_t, h_{t-1}]`, plus biases.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmLayerParams {
    pub w_i: Array2<f64>,
    pub w_f: Array2<f64>,
    pub w_o: Array2<f64>,
    pub w_c: Array2<f64>,
    pub b_i: Array1<f64>,
    pub b_f: Array1<f64>,
    pub b_o: Array1<f64>,
    pub b_c: Array1<f64>,
}

impl LstmLayerParams {
    pub fn zeros(input_dim: usize, width: usize) -> Self {
        let cols = input_dim + width;
        LstmLayerParams {
            w_i: Array2::zeros((width, cols)),
            w_f: Array2::zeros((width, cols)),
            w_o: Array2::zeros((width, cols)),
            w_c: Array2::zeros((width, cols)),
            b_i: Array1::zeros(width),
            b_f: Array1::zeros(width),
            b_o: Array1::zeros(width),
            b_c: Array1::zeros(width),
        }
    }

    pub fn width(&self) -> usize {
        self.w_i.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.w_i.ncols() - self.width()
    }
}

/// Full model: stacked LSTM layers plus the scalar dense head.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub layers: Vec<LstmLayerParams>,
    pub dense_w: Array1<f64>,
    pub dense_b: f64,
    pub width: usize,
    pub seq_len: usize,
    pub input_dim: usize,
}

impl ModelParams {
    pub fn zeros(input_dim: usize, width: usize, num_layers: usize, seq_len: usize) -> Self {
        let layers = (0..num_layers)
            .map(|l| LstmLayerParams::zeros(if l == 0 { input_dim } else { width }, width))
            .collect();
        ModelParams {
            layers,
            dense_w: Array1::zeros(width),
            dense_b: 0.0,
            width,
            seq_len,
            input_dim,
        }
    }

    /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, forget-gate bias +1.
    pub fn init<R: Rng>(
        input_dim: usize,
        width: usize,
        num_layers: usize,
        seq_len: usize,
        rng: &mut R,
    ) -> Self {
        let mut params = Self::zeros(input_dim, width, num_layers, seq_len);
        for layer in &mut params.layers {
            let bound = 1.0 / (layer.w_i.ncols() as f64).sqrt();
            for w in [&mut layer.w_i, &mut layer.w_f, &mut layer.w_o, &mut layer.w_c] {
                w.mapv_inplace(|_| rng.random_range(-bound..bound));
            }
            layer.b_f.fill(1.0);
        }
        let bound = 1.0 / (width as f64).sqrt();
        params.dense_w.mapv_inplace(|_| rng.random_range(-bound..bound));
        params
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    /// All parameters in a fixed flat order (layers in order, each
    /// W_i,W_f,W_o,W_c,b_i,b_f,b_o,b_c row-major, then dense).
    pub fn iter_params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.layers
            .iter_mut()
            .flat_map(|l| {
                l.w_i
                    .iter_mut()
                    .chain(l.w_f.iter_mut())
                    .chain(l.w_o.iter_mut())
                    .chain(l.w_c.iter_mut())
                    .chain(l.b_i.iter_mut())
                    .chain(l.b_f.iter_mut())
                    .chain(l.b_o.iter_mut())
                    .chain(l.b_c.iter_mut())
            })
            .chain(self.dense_w.iter_mut())
            .chain(std::iter::once(&mut self.dense_b))
    }

    pub fn iter_params(&self) -> impl Iterator<Item = &f64> {
        self.layers
            .iter()
            .flat_map(|l| {
                l.w_i
                    .iter()
                    .chain(l.w_f.iter())
                    .chain(l.w_o.iter())
                    .chain(l.w_c.iter())
                    .chain(l.b_i.iter())
                    .chain(l.b_f.iter())
                    .chain(l.b_o.iter())
                    .chain(l.b_c.iter())
            })
            .chain(self.dense_w.iter())
            .chain(std::iter::once(&self.dense_b))
    }

    pub fn param_count(&self) -> usize {
        self.iter_params().count()
    }
}

/// Training hyperparameters; randomness flows from `seed` alone.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub dropout: f64,
    pub seed: u64,
    /// Epochs without validation improvement before stopping; 0 disables.
    pub patience: usize,
    pub width: usize,
    pub layers: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 1000,
            learning_rate: 0.001,
            batch_size: 32,
            dropout: 0.2,
            seed: 42,
            patience: 20,
            width: 256,
            layers: 2,
        }
    }
}

/// One row of the training log.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_mse: f64,
    pub val_mse: f64,
}

/// Everything needed to reuse a trained model: weights, scaler, cluster
/// model, the config it was trained with, and the per-epoch loss history.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub params: ModelParams,
    pub scaler: ScalerParams,
    pub cluster_model: ClusterModel,
    pub config: TrainConfig,
    pub history: Vec<EpochStats>,
}

fn sigmoid(u: f64) -> f64 {
    1.0 / (1.0 + (-u).exp())
}

/// Cached activations of one cell step over a batch.
pub(crate) struct CellCache {
    pub concat: Array2<f64>,
    pub i: Array2<f64>,
    pub f: Array2<f64>,
    pub o: Array2<f64>,
    pub g: Array2<f64>,
    pub c_prev: Array2<f64>,
    pub tanh_c: Array2<f64>,
}

/// One batched cell step; returns (h_t, c_t) plus the cache.
pub(crate) fn cell_step(
    layer: &LstmLayerParams,
    concat: Array2<f64>,
    c_prev: Array2<f64>,
) -> (Array2<f64>, Array2<f64>, CellCache) {
    let i = (concat.dot(&layer.w_i.t()) + &layer.b_i).mapv(sigmoid);
    let f = (concat.dot(&layer.w_f.t()) + &layer.b_f).mapv(sigmoid);
    let o = (concat.dot(&layer.w_o.t()) + &layer.b_o).mapv(sigmoid);
    let g = (concat.dot(&layer.w_c.t()) + &layer.b_c).mapv(f64::tanh);
    let c = &f * &c_prev + &i * &g;
    let tanh_c = c.mapv(f64::tanh);
    let h = &o * &tanh_c;
    let cache = CellCache {
        concat,
        i,
        f,
        o,
        g,
        c_prev,
        tanh_c,
    };
    (h, c, cache)
}

fn concat_inputs(x: &Array2<f64>, h: &Array2<f64>) -> Array2<f64> {
    ndarray::concatenate(Axis(1), &[x.view(), h.view()]).expect("matching batch dims")
}

/// Single LSTM cell step on vectors, exactly the batched math with B = 1.
pub fn lstm_cell_forward(
    layer: &LstmLayerParams,
    x_t: ArrayView1<f64>,
    h_prev: ArrayView1<f64>,
    c_prev: ArrayView1<f64>,
) -> Result<(Array1<f64>, Array1<f64>)> {
    let width = layer.width();
    if x_t.len() != layer.input_dim() || h_prev.len() != width || c_prev.len() != width {
        return Err(Error::invalid(format!(
            "cell dims mismatch: x {} (want {}), h {} / c {} (want {width})",
            x_t.len(),
            layer.input_dim(),
            h_prev.len(),
            c_prev.len(),
        )));
    }
    let x = x_t.insert_axis(Axis(0)).to_owned();
    let h = h_prev.insert_axis(Axis(0)).to_owned();
    let c = c_prev.insert_axis(Axis(0)).to_owned();
    let (h_t, c_t, _) = cell_step(layer, concat_inputs(&x, &h), c);
    Ok((h_t.row(0).to_owned(), c_t.row(0).to_owned()))
}

/// Forward state cached for the backward pass.
pub(crate) struct ForwardCache {
    /// `cells[layer][t]`
    pub cells: Vec<Vec<CellCache>>,
    /// `masks[layer][t]` for non-final layers; empty when dropout is off.
    pub masks: Vec<Vec<Array2<f64>>>,
    pub last_h: Array2<f64>,
    pub preds: Array1<f64>,
}

/// Batched forward pass over per-timestep inputs `(B, input_dim)`.
pub(crate) fn forward_batch(
    params: &ModelParams,
    inputs: &[Array2<f64>],
    dropout_masks: Option<&DropoutMasks>,
) -> ForwardCache {
    let batch = inputs[0].nrows();
    let width = params.width;
    let mut cells: Vec<Vec<CellCache>> = Vec::with_capacity(params.num_layers());
    let mut masks: Vec<Vec<Array2<f64>>> = Vec::new();
    let mut layer_inputs: Vec<Array2<f64>> = inputs.to_vec();
    let mut last_h = Array2::zeros((batch, width));

    for (l, layer) in params.layers.iter().enumerate() {
        let mut h = Array2::zeros((batch, width));
        let mut c = Array2::zeros((batch, width));
        let mut layer_cells = Vec::with_capacity(layer_inputs.len());
        let mut outputs = Vec::with_capacity(layer_inputs.len());
        for x in &layer_inputs {
            let (h_t, c_t, cache) = cell_step(layer, concat_inputs(x, &h), c);
            layer_cells.push(cache);
            outputs.push(h_t.clone());
            h = h_t;
            c = c_t;
        }
        cells.push(layer_cells);
        if l + 1 < params.num_layers() {
            if let Some(dm) = dropout_masks {
                let layer_masks = &dm.masks[l];
                for (out, mask) in outputs.iter_mut().zip(layer_masks) {
                    *out *= mask;
                }
                masks.push(layer_masks.clone());
            }
            layer_inputs = outputs;
        } else {
            last_h = h;
        }
    }

    let preds = last_h.dot(&params.dense_w) + params.dense_b;
    ForwardCache {
        cells,
        masks,
        last_h,
        preds,
    }
}

/// Builds per-timestep input matrices from a slice of samples.
pub(crate) fn batch_inputs(samples: &[Sample], seq_len: usize) -> Vec<Array2<f64>> {
    (0..seq_len)
        .map(|t| {
            Array2::from_shape_fn((samples.len(), NUM_FEATURES), |(b, d)| {
                samples[b].features[t * NUM_FEATURES + d] as f64
            })
        })
        .collect()
}

pub(crate) fn batch_targets(samples: &[Sample]) -> Array1<f64> {
    samples.iter().map(|s| s.target as f64).collect()
}

/// Scaled sample rows as an `(seq_len, 6)` matrix.
pub fn sample_matrix(sample: &Sample, seq_len: usize) -> Array2<f64> {
    Array2::from_shape_fn((seq_len, NUM_FEATURES), |(t, d)| {
        sample.features[t * NUM_FEATURES + d] as f64
    })
}

/// Runs one scaled sample through the model; linear (unclamped) output.
pub fn model_forward(
    params: &ModelParams,
    sample: ArrayView2<f64>,
    dropout_masks: Option<&DropoutMasks>,
) -> Result<f64> {
    if sample.nrows() != params.seq_len || sample.ncols() != params.input_dim {
        return Err(Error::invalid(format!(
            "sample shape ({}, {}) does not match model ({}, {})",
            sample.nrows(),
            sample.ncols(),
            params.seq_len,
            params.input_dim
        )));
    }
    let inputs: Vec<Array2<f64>> = (0..params.seq_len)
        .map(|t| sample.row(t).insert_axis(Axis(0)).to_owned())
        .collect();
    let cache = forward_batch(params, &inputs, dropout_masks);
    Ok(cache.preds[0])
}

/// Squared error for one prediction.
pub fn loss(pred: f64, target: f64) -> f64 {
    let d = pred - target;
    d * d
}

/// Mean squared error over a batch.
pub fn batch_loss(preds: &Array1<f64>, targets: &Array1<f64>) -> f64 {
    debug_assert_eq!(preds.len(), targets.len());
    preds
        .iter()
        .zip(targets.iter())
        .map(|(&p, &t)| loss(p, t))
        .sum::<f64>()
        / preds.len() as f64
}

/// Decodes a model output into a forward reuse distance.
///
/// The raw value unscales against the target dimension; decoded values
/// below 0.5 mean `∞` (finite distances are >= 1 and `∞` encodes as 0),
/// anything else rounds to the nearest integer >= 1.
pub fn predict_frd(checkpoint: &Checkpoint, sample: ArrayView2<f64>) -> Result<Option<u64>> {
    let raw = model_forward(&checkpoint.params, sample, None)?;
    Ok(decode_frd(&checkpoint.scaler, raw))
}

/// The `predict_frd` decode step, separated so tests can drive it directly.
pub fn decode_frd(scaler: &ScalerParams, raw: f64) -> Option<u64> {
    let decoded = scaler.unscale(TARGET_DIM, raw);
    if decoded < 0.5 {
        None
    } else {
        Some((decoded.round() as u64).max(1))
    }
}
