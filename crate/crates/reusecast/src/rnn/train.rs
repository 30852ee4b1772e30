//! Adam training loop with early stopping.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    backward_batch, batch_inputs, batch_loss, batch_targets, forward_batch, Checkpoint,
    EpochStats, Gradients, ModelParams, TrainConfig,
};
use crate::dataset::{Dataset, NUM_FEATURES};
use crate::error::{Error, Result};

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;
const GRAD_CLIP_NORM: f64 = 5.0;

/// Inverted-dropout masks for the inter-layer hidden sequences:
/// `masks[layer][t]` multiplies layer `layer`'s output at step `t` before
/// the next layer consumes it (non-final layers only).
#[derive(Debug, Clone)]
pub struct DropoutMasks {
    pub masks: Vec<Vec<Array2<f64>>>,
}

impl DropoutMasks {
    pub fn sample<R: Rng>(
        rng: &mut R,
        dropout: f64,
        num_layers: usize,
        seq_len: usize,
        batch: usize,
        width: usize,
    ) -> DropoutMasks {
        let keep = 1.0 - dropout;
        let masks = (0..num_layers.saturating_sub(1))
            .map(|_| {
                (0..seq_len)
                    .map(|_| {
                        Array2::from_shape_fn((batch, width), |_| {
                            if rng.random::<f64>() < dropout {
                                0.0
                            } else {
                                1.0 / keep
                            }
                        })
                    })
                    .collect()
            })
            .collect();
        DropoutMasks { masks }
    }
}

struct Adam {
    m: Gradients,
    v: Gradients,
    step: u64,
    lr: f64,
}

impl Adam {
    fn new(params: &ModelParams, lr: f64) -> Adam {
        Adam {
            m: Gradients::zeros_like(params),
            v: Gradients::zeros_like(params),
            step: 0,
            lr,
        }
    }

    fn update(&mut self, params: &mut ModelParams, grads: &Gradients) {
        self.step += 1;
        let bias1 = 1.0 - ADAM_BETA1.powi(self.step as i32);
        let bias2 = 1.0 - ADAM_BETA2.powi(self.step as i32);
        for (((p, &g), m), v) in params
            .iter_params_mut()
            .zip(grads.iter_params())
            .zip(self.m.iter_params_mut())
            .zip(self.v.iter_params_mut())
        {
            *m = ADAM_BETA1 * *m + (1.0 - ADAM_BETA1) * g;
            *v = ADAM_BETA2 * *v + (1.0 - ADAM_BETA2) * g * g;
            let m_hat = *m / bias1;
            let v_hat = *v / bias2;
            *p -= self.lr * m_hat / (v_hat.sqrt() + ADAM_EPS);
        }
    }
}

fn clip_gradients(grads: &mut Gradients) {
    let norm = grads.global_norm();
    if norm > GRAD_CLIP_NORM {
        grads.scale(GRAD_CLIP_NORM / norm);
    }
}

fn validate_config(config: &TrainConfig) -> Result<()> {
    if !(0.0..1.0).contains(&config.dropout) {
        return Err(Error::invalid("dropout must be in [0, 1)"));
    }
    if config.learning_rate < 0.0 || !config.learning_rate.is_finite() {
        return Err(Error::invalid("learning_rate must be finite and >= 0"));
    }
    if config.batch_size == 0 {
        return Err(Error::invalid("batch_size must be >= 1"));
    }
    if config.width == 0 || config.layers == 0 {
        return Err(Error::invalid("width and layers must be >= 1"));
    }
    Ok(())
}

/// Evaluates mean squared error over a dataset without dropout.
pub fn evaluate(params: &ModelParams, dataset: &Dataset, batch_size: usize) -> f64 {
    let mut total = 0.0;
    for chunk in dataset.samples.chunks(batch_size.max(1)) {
        let inputs = batch_inputs(chunk, dataset.sequence_length);
        let targets = batch_targets(chunk);
        let cache = forward_batch(params, &inputs, None);
        total += batch_loss(&cache.preds, &targets) * chunk.len() as f64;
    }
    total / dataset.len() as f64
}

/// Trains on the split datasets and returns the best-validation checkpoint.
///
/// Mini-batches run in fixed order each epoch; inverted dropout applies to
/// inter-layer activations at train time only; training stops early after
/// `patience` epochs without validation improvement. Fully deterministic
/// for a given seed.
pub fn train(train_set: &Dataset, val_set: &Dataset, config: &TrainConfig) -> Result<Checkpoint> {
    if train_set.is_empty() || val_set.is_empty() {
        return Err(Error::invalid("train and validation sets must be non-empty"));
    }
    validate_config(config)?;
    let seq_len = train_set.sequence_length;
    if val_set.sequence_length != seq_len {
        return Err(Error::invalid("train/validation sequence_length mismatch"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut params = ModelParams::init(NUM_FEATURES, config.width, config.layers, seq_len, &mut rng);
    let mut adam = Adam::new(&params, config.learning_rate);

    let mut history = Vec::new();
    let mut best_val = f64::INFINITY;
    let mut best_params = params.clone();
    let mut epochs_since_best = 0usize;

    for epoch in 0..config.epochs {
        let mut train_loss_sum = 0.0;
        for chunk in train_set.samples.chunks(config.batch_size) {
            let inputs = batch_inputs(chunk, seq_len);
            let targets = batch_targets(chunk);
            let masks = if config.dropout > 0.0 && config.layers > 1 {
                Some(DropoutMasks::sample(
                    &mut rng,
                    config.dropout,
                    config.layers,
                    seq_len,
                    chunk.len(),
                    config.width,
                ))
            } else {
                None
            };
            let (loss, mut grads) = backward_batch(&params, &inputs, &targets, masks.as_ref());
            if !loss.is_finite() {
                return Err(Error::Training(format!(
                    "non-finite training loss at epoch {epoch}"
                )));
            }
            train_loss_sum += loss * chunk.len() as f64;
            clip_gradients(&mut grads);
            adam.update(&mut params, &grads);
        }
        let train_mse = train_loss_sum / train_set.len() as f64;
        let val_mse = evaluate(&params, val_set, config.batch_size);
        if !val_mse.is_finite() {
            return Err(Error::Training(format!(
                "non-finite validation loss at epoch {epoch}"
            )));
        }
        history.push(EpochStats {
            epoch,
            train_mse,
            val_mse,
        });

        if val_mse < best_val {
            best_val = val_mse;
            best_params = params.clone();
            epochs_since_best = 0;
        } else {
            epochs_since_best += 1;
            if config.patience > 0 && epochs_since_best >= config.patience {
                break;
            }
        }
    }

    Ok(Checkpoint {
        params: best_params,
        scaler: train_set.scaler.clone(),
        cluster_model: train_set.cluster_model.clone(),
        config: config.clone(),
        history,
    })
}

/// Writes the per-epoch `epoch,train_mse,val_mse` CSV log.
pub fn write_loss_log<W: std::io::Write>(history: &[EpochStats], mut writer: W) -> Result<()> {
    writeln!(writer, "epoch,train_mse,val_mse")?;
    for row in history {
        writeln!(writer, "{},{},{}", row.epoch, row.train_mse, row.val_mse)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster;
    use crate::dataset::{build_feature_matrix, make_samples, split};
    use crate::locality::{address_deltas, forward_rd};
    use crate::trace::Trace;

    fn cyclic_dataset(period: u64, n: usize, seq_len: usize) -> (Dataset, Dataset) {
        let trace = Trace::from_blocks((0..n).map(|i| (i as u64) % period), 4096);
        let cluster = cluster::kmeans(&address_deltas(&trace), 2, 0, 100, 1e-6).unwrap();
        let features = build_feature_matrix(&trace, 100, 50, &cluster).unwrap();
        let targets = forward_rd(&trace);
        let dataset = make_samples(&features, &targets, seq_len, cluster, 0.8).unwrap();
        let pool = (dataset.len() as f64 * 0.8).floor() as usize;
        split(&dataset, 0.8, pool.min(128), (dataset.len() - pool).min(64)).unwrap()
    }

    fn tiny_config(seed: u64) -> TrainConfig {
        TrainConfig {
            epochs: 3,
            learning_rate: 0.001,
            batch_size: 16,
            dropout: 0.2,
            seed,
            patience: 0,
            width: 8,
            layers: 2,
        }
    }

    #[test]
    fn zero_learning_rate_leaves_parameters_at_init() {
        let (train_set, val_set) = cyclic_dataset(3, 400, 6);
        let mut config = tiny_config(9);
        config.learning_rate = 0.0;
        config.dropout = 0.0;
        let checkpoint = train(&train_set, &val_set, &config).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let init = ModelParams::init(NUM_FEATURES, 8, 2, 6, &mut rng);
        assert_eq!(checkpoint.params, init);
    }

    #[test]
    fn same_seed_same_checkpoint() {
        let (train_set, val_set) = cyclic_dataset(3, 400, 6);
        let config = tiny_config(1234);
        let a = train(&train_set, &val_set, &config).unwrap();
        let b = train(&train_set, &val_set, &config).unwrap();
        assert_eq!(a, b); // bitwise-equal params and history
    }

    #[test]
    fn different_seed_different_checkpoint() {
        let (train_set, val_set) = cyclic_dataset(3, 400, 6);
        let a = train(&train_set, &val_set, &tiny_config(1)).unwrap();
        let b = train(&train_set, &val_set, &tiny_config(2)).unwrap();
        assert_ne!(a.params, b.params);
    }

    #[test]
    fn repeated_single_batch_loss_non_increasing_over_first_steps() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let seq_len = 5;
        let chunk: Vec<crate::dataset::Sample> = (0..16)
            .map(|b| crate::dataset::Sample {
                features: (0..seq_len * NUM_FEATURES)
                    .map(|_| rng.random_range(-1.0f32..1.0))
                    .collect(),
                target: rng.random_range(-1.0f32..1.0),
                origin_time: b as u64,
            })
            .collect();
        let inputs = batch_inputs(&chunk, seq_len);
        let targets = batch_targets(&chunk);
        for lr in [1e-3, 1e-4] {
            let mut params = ModelParams::init(NUM_FEATURES, 6, 2, seq_len, &mut rng);
            let mut adam = Adam::new(&params, lr);
            let mut last = f64::INFINITY;
            for _ in 0..10 {
                let (loss, mut grads) = backward_batch(&params, &inputs, &targets, None);
                assert!(loss <= last + 1e-12, "lr {lr}: loss rose: {loss} > {last}");
                last = loss;
                clip_gradients(&mut grads);
                adam.update(&mut params, &grads);
            }
        }
    }

    #[test]
    fn early_stopping_respects_patience() {
        let (train_set, val_set) = cyclic_dataset(3, 300, 4);
        let mut config = tiny_config(3);
        config.epochs = 200;
        config.learning_rate = 0.0; // validation loss can never improve after epoch 0
        config.dropout = 0.0;
        config.patience = 4;
        let checkpoint = train(&train_set, &val_set, &config).unwrap();
        assert_eq!(checkpoint.history.len(), 5); // epoch 0 improves, then 4 stalls
    }

    #[test]
    fn rejects_empty_split_and_bad_config() {
        let (train_set, val_set) = cyclic_dataset(3, 300, 4);
        let empty = Dataset {
            samples: Vec::new(),
            ..train_set.clone()
        };
        assert!(train(&empty, &val_set, &tiny_config(0)).is_err());
        let mut bad = tiny_config(0);
        bad.dropout = 1.0;
        assert!(train(&train_set, &val_set, &bad).is_err());
    }

    #[test]
    fn loss_log_format() {
        let history = vec![
            EpochStats { epoch: 0, train_mse: 0.5, val_mse: 0.25 },
            EpochStats { epoch: 1, train_mse: 0.125, val_mse: 0.0625 },
        ];
        let mut out = Vec::new();
        write_loss_log(&history, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, "epoch,train_mse,val_mse\n0,0.5,0.25\n1,0.125,0.0625\n");
    }
}
