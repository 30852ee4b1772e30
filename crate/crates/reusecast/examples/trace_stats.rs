//! Parse a trace and print its summary counters.
//!
//! ```bash
//! cargo run -p reusecast --example trace_stats [-- path/to/trace.txt]
//! ```
//!
//! Without an argument a small synthetic workload is analyzed instead.

use std::fs::File;
use std::io::BufReader;

use reusecast::synth;
use reusecast::trace::{parse_plain, trace_stats, Trace};

fn main() -> reusecast::Result<()> {
    let trace: Trace = match std::env::args().nth(1) {
        Some(path) => parse_plain(BufReader::new(File::open(path)?))?.0,
        None => synth::periodic_then_scan(16, 4000, 1000),
    };
    let stats = trace_stats(&trace)?;
    println!("accesses              {}", stats.length);
    println!("unique blocks         {}", stats.unique_blocks);
    println!("accesses per block    {:.2}", stats.mean_accesses_per_block);
    println!("unique address deltas {}", stats.unique_deltas);
    println!(
        "delta compression     {:+.2}%  (negative = deltas shrink the vocabulary)",
        stats.delta_compression_ratio * 100.0
    );
    Ok(())
}
