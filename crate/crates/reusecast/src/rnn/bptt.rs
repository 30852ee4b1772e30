//! Backpropagation through time over the full sequence length.

use ndarray::{s, Array1, Array2, Axis};

use super::{forward_batch, DropoutMasks, ForwardCache, LstmLayerParams, ModelParams};

/// Loss gradients, shaped exactly like the parameters they refer to.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: Vec<LstmLayerParams>,
    pub dense_w: Array1<f64>,
    pub dense_b: f64,
}

impl Gradients {
    pub fn zeros_like(params: &ModelParams) -> Gradients {
        Gradients {
            layers: params
                .layers
                .iter()
                .map(|l| LstmLayerParams::zeros(l.input_dim(), l.width()))
                .collect(),
            dense_w: Array1::zeros(params.dense_w.len()),
            dense_b: 0.0,
        }
    }

    /// Same flat order as `ModelParams::iter_params`.
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

    pub fn global_norm(&self) -> f64 {
        self.iter_params().map(|g| g * g).sum::<f64>().sqrt()
    }

    pub fn scale(&mut self, factor: f64) {
        for g in self.iter_params_mut() {
            *g *= factor;
        }
    }
}

/// Exact gradients of the batch-mean squared error via BPTT.
///
/// Returns the batch loss together with gradients for every parameter.
pub fn backward_batch(
    params: &ModelParams,
    inputs: &[Array2<f64>],
    targets: &Array1<f64>,
    dropout_masks: Option<&DropoutMasks>,
) -> (f64, Gradients) {
    let cache = forward_batch(params, inputs, dropout_masks);
    let loss = super::batch_loss(&cache.preds, targets);
    let grads = backward_from_cache(params, inputs, targets, &cache);
    (loss, grads)
}

pub(crate) fn backward_from_cache(
    params: &ModelParams,
    inputs: &[Array2<f64>],
    targets: &Array1<f64>,
    cache: &ForwardCache,
) -> Gradients {
    let batch = targets.len();
    let seq_len = inputs.len();
    let width = params.width;
    let num_layers = params.num_layers();
    let mut grads = Gradients::zeros_like(params);

    // d(mean squared error)/d(pred)
    let dpred = (&cache.preds - targets) * (2.0 / batch as f64);

    grads.dense_w = cache.last_h.t().dot(&dpred);
    grads.dense_b = dpred.sum();

    // gradient injected into each layer's output sequence, top layer first:
    // only the last step of the final layer feeds the dense head
    let mut inject: Vec<Array2<f64>> = (0..seq_len).map(|_| Array2::zeros((batch, width))).collect();
    let dh_last = dpred.view().insert_axis(Axis(1)).to_owned() * &params.dense_w;
    inject[seq_len - 1] = dh_last;

    for l in (0..num_layers).rev() {
        let layer = &params.layers[l];
        let in_dim = layer.input_dim();
        let lg = &mut grads.layers[l];
        let mut carry_h: Array2<f64> = Array2::zeros((batch, width));
        let mut carry_c: Array2<f64> = Array2::zeros((batch, width));
        let mut dx_seq: Vec<Array2<f64>> = vec![Array2::zeros((0, 0)); seq_len];

        for t in (0..seq_len).rev() {
            let cell = &cache.cells[l][t];
            let dh = &inject[t] + &carry_h;
            let do_pre = &dh * &cell.tanh_c * &cell.o * (1.0 - &cell.o);
            let dc = &dh * &cell.o * (1.0 - &cell.tanh_c * &cell.tanh_c) + &carry_c;
            let di_pre = &dc * &cell.g * &cell.i * (1.0 - &cell.i);
            let df_pre = &dc * &cell.c_prev * &cell.f * (1.0 - &cell.f);
            let dg_pre = &dc * &cell.i * (1.0 - &cell.g * &cell.g);
            carry_c = &dc * &cell.f;

            lg.w_i += &di_pre.t().dot(&cell.concat);
            lg.w_f += &df_pre.t().dot(&cell.concat);
            lg.w_o += &do_pre.t().dot(&cell.concat);
            lg.w_c += &dg_pre.t().dot(&cell.concat);
            lg.b_i += &di_pre.sum_axis(Axis(0));
            lg.b_f += &df_pre.sum_axis(Axis(0));
            lg.b_o += &do_pre.sum_axis(Axis(0));
            lg.b_c += &dg_pre.sum_axis(Axis(0));

            let dconcat = di_pre.dot(&layer.w_i)
                + df_pre.dot(&layer.w_f)
                + do_pre.dot(&layer.w_o)
                + dg_pre.dot(&layer.w_c);
            dx_seq[t] = dconcat.slice(s![.., ..in_dim]).to_owned();
            carry_h = dconcat.slice(s![.., in_dim..]).to_owned();
        }

        if l > 0 {
            // gradient w.r.t. the layer below's (possibly dropped-out) outputs
            if let Some(layer_masks) = cache.masks.get(l - 1) {
                for (dx, mask) in dx_seq.iter_mut().zip(layer_masks) {
                    *dx *= mask;
                }
            }
            inject = dx_seq;
        }
    }
    grads
}
