//! The whole pipeline end to end: trace -> features -> clusters -> dataset
//! -> trained LSTM -> pOPT simulation against the baselines.
//!
//! ```bash
//! cargo run -p reusecast --example popt_pipeline
//! ```

use reusecast::cluster::auto_partition;
use reusecast::dataset;
use reusecast::locality::{address_deltas, forward_rd, FeatureParams};
use reusecast::policies::{
    simulate_arc, simulate_lru, simulate_opt, simulate_popt, LstmPredictor,
};
use reusecast::rnn::{train, TrainConfig};
use reusecast::synth;

fn main() -> reusecast::Result<()> {
    // a reusable working set plus a polluting scan
    let trace = synth::periodic_then_scan(12, 6000, 3000);
    let sequence_length = 8;
    let feature_params = FeatureParams { k_avg: 100, k_freq: 50 };

    println!("preparing dataset...");
    let deltas = address_deltas(&trace);
    let cluster_model = auto_partition(&deltas, 2..=6, 11)?;
    let features = dataset::build_feature_matrix(
        &trace,
        feature_params.k_avg,
        feature_params.k_freq,
        &cluster_model,
    )?;
    let targets = forward_rd(&trace);
    let data = dataset::make_samples(&features, &targets, sequence_length, cluster_model, 0.8)?;
    let pool = (data.len() as f64 * 0.8).floor() as usize;
    let (train_set, val_set) = dataset::split(&data, 0.8, pool.min(1024), 256)?;

    println!("training on {} samples...", train_set.len());
    let config = TrainConfig {
        epochs: 12,
        learning_rate: 0.001,
        batch_size: 64,
        dropout: 0.2,
        seed: 11,
        patience: 4,
        width: 24,
        layers: 2,
    };
    let checkpoint = train(&train_set, &val_set, &config)?;
    let best = checkpoint
        .history
        .iter()
        .map(|e| e.val_mse)
        .fold(f64::INFINITY, f64::min);
    println!("best validation mse {best:.5} after {} epochs", checkpoint.history.len());

    println!("\n{:>6} {:>10} {:>10} {:>10} {:>10}", "C", "lru", "arc", "popt", "opt");
    for cache_size in [4usize, 8, 16, 32] {
        let lru = simulate_lru(&trace, cache_size)?;
        let arc = simulate_arc(&trace, cache_size)?;
        let opt = simulate_opt(&trace, cache_size)?;
        let mut predictor = LstmPredictor::new(&checkpoint);
        let popt = simulate_popt(
            &trace,
            cache_size,
            &mut predictor,
            feature_params,
            sequence_length,
            &checkpoint.cluster_model,
            &checkpoint.scaler,
        )?;
        println!(
            "{cache_size:>6} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
            lru.miss_ratio(),
            arc.miss_ratio(),
            popt.miss_ratio(),
            opt.miss_ratio()
        );
    }
    Ok(())
}
