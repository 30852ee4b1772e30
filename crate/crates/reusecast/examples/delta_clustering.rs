//! Cluster address deltas with K-means and the auto-partition selector.
//!
//! ```bash
//! cargo run -p reusecast --example delta_clustering
//! ```

use reusecast::cluster::{auto_partition, kmeans};
use reusecast::locality::address_deltas;

fn main() -> reusecast::Result<()> {
    // equal-mass runs of three stride populations: +1, +64, +4096
    let mut blocks: Vec<u64> = Vec::new();
    let mut base = 0u64;
    for round in 0..20 {
        for (stride, len) in [(1u64, 50usize), (64, 50), (4096, 50)] {
            blocks.extend((0..len as u64).map(|i| base + stride * i));
            base += stride * len as u64 + 7 + round;
        }
    }
    let trace = reusecast::trace::Trace::from_blocks(blocks, 4096);
    let deltas = address_deltas(&trace);

    let fixed = kmeans(&deltas, 4, 7, 100, 1e-6)?;
    println!("fixed k=4 centroids: {:?}", fixed.centroids());

    let model = auto_partition(&deltas, 2..=8, 7)?;
    println!("auto-partition chose k = {}", model.k());
    let mut populations = vec![0u64; model.k()];
    for &d in &deltas {
        populations[model.assign(d)] += 1;
    }
    println!("{:>4} {:>16} {:>10}", "id", "centroid", "accesses");
    for (i, (&c, &n)) in model.centroids().iter().zip(&populations).enumerate() {
        println!("{i:>4} {c:>16.1} {n:>10}");
    }
    Ok(())
}
