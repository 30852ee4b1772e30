//! Turn a trace into scaled training samples and round-trip them on disk.
//!
//! ```bash
//! cargo run -p reusecast --example build_dataset
//! ```
//!
//! Shows the full offline path: address-delta clustering, the six-feature
//! matrix, windowed samples targeted at forward reuse distance, the
//! contiguous 8:2 split, and the binary dataset container.

use reusecast::cluster::auto_partition;
use reusecast::dataset::{self, NUM_FEATURES};
use reusecast::locality::{address_deltas, forward_rd};
use reusecast::synth;

fn main() -> reusecast::Result<()> {
    // irregular reuse makes the scaled rows show some spread
    let trace = synth::random(7, 3000, 48);
    let sequence_length = 8;

    let deltas = address_deltas(&trace);
    let cluster_model = auto_partition(&deltas, 2..=6, 42)?;
    let features = dataset::build_feature_matrix(&trace, 100, 50, &cluster_model)?;
    let targets = forward_rd(&trace);
    let data = dataset::make_samples(&features, &targets, sequence_length, cluster_model, 0.8)?;

    println!(
        "dataset: {} samples of shape ({sequence_length}, {NUM_FEATURES})",
        data.len()
    );
    let sample = &data.samples[40];
    println!("sample at trace time {} (scaled rows):", sample.origin_time);
    for step in 0..sequence_length {
        let row = &sample.features[step * NUM_FEATURES..(step + 1) * NUM_FEATURES];
        println!(
            "  [{}]",
            row.iter().map(|v| format!("{v:+.3}")).collect::<Vec<_>>().join(", ")
        );
    }
    println!("  target (scaled forward rd): {:+.3}", sample.target);

    let pool = (data.len() as f64 * 0.8).floor() as usize;
    let (train, val) = dataset::split(&data, 0.8, pool, data.len() - pool)?;
    println!("split: {} train / {} validation", train.len(), val.len());

    let path = std::env::temp_dir().join("reusecast-example.rlds");
    dataset::save(&data, &path)?;
    let loaded = dataset::load(&path)?;
    assert_eq!(loaded, data);
    println!("round-tripped through {}", path.display());
    Ok(())
}
