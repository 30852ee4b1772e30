//! Train the stacked-LSTM regressor on a cyclic trace and decode its
//! forward-reuse-distance predictions.
//!
//! ```bash
//! cargo run -p reusecast --example train_predictor
//! ```
//!
//! The workload cycles through 5 blocks, so the true forward reuse
//! distance is 5 almost everywhere; a few epochs suffice.

use reusecast::cluster::auto_partition;
use reusecast::dataset;
use reusecast::locality::{address_deltas, forward_rd};
use reusecast::rnn::{predict_frd, sample_matrix, save_checkpoint, train, TrainConfig};
use reusecast::synth;

fn main() -> reusecast::Result<()> {
    let trace = synth::cyclic(5, 2500);
    let sequence_length = 8;

    let deltas = address_deltas(&trace);
    let cluster_model = auto_partition(&deltas, 2..=4, 3)?;
    let features = dataset::build_feature_matrix(&trace, 100, 50, &cluster_model)?;
    let targets = forward_rd(&trace);
    let data = dataset::make_samples(&features, &targets, sequence_length, cluster_model, 0.8)?;
    let pool = (data.len() as f64 * 0.8).floor() as usize;
    let (train_set, val_set) = dataset::split(&data, 0.8, pool.min(256), 128)?;

    let config = TrainConfig {
        epochs: 8,
        learning_rate: 0.001,
        batch_size: 32,
        dropout: 0.2,
        seed: 42,
        patience: 0,
        width: 32,
        layers: 2,
    };
    println!(
        "training width={} layers={} on {} samples...",
        config.width,
        config.layers,
        train_set.len()
    );
    let checkpoint = train(&train_set, &val_set, &config)?;
    for row in &checkpoint.history {
        println!(
            "epoch {:>2}  train mse {:.6}  val mse {:.6}",
            row.epoch, row.train_mse, row.val_mse
        );
    }

    let mut correct = 0usize;
    let shown = 5usize;
    println!("\nfirst {shown} validation predictions:");
    for (i, sample) in val_set.samples.iter().enumerate() {
        let predicted = predict_frd(&checkpoint, sample_matrix(sample, sequence_length).view())?;
        let truth = targets[sample.origin_time as usize];
        if predicted == truth {
            correct += 1;
        }
        if i < shown {
            println!("  t={:<5} predicted {predicted:?}, truth {truth:?}", sample.origin_time);
        }
    }
    println!(
        "decoded accuracy: {}/{} validation accesses",
        correct,
        val_set.len()
    );

    let path = std::env::temp_dir().join("reusecast-example.rlck");
    save_checkpoint(&checkpoint, &path)?;
    println!("checkpoint: {}", path.display());
    Ok(())
}
