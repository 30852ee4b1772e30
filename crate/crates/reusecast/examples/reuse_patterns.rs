//! Export the reuse-distance time series of a trace for pattern plots.
//!
//! ```bash
//! cargo run -p reusecast --example reuse_patterns
//! ```
//!
//! Writes `rd_timeseries.csv` (`time,rd`, with 0 standing in for ∞) and a
//! scatter SVG into a temp directory. Phased workloads show up as visible
//! structure: horizontal lines for fixed periods, a bottom line of cold
//! misses during scans.

use std::fs;

use reusecast::locality::{backward_rd, export_rd_timeseries};
use reusecast::plot::scatter_svg;
use reusecast::trace::{Trace, DEFAULT_BLOCK_SIZE};

fn main() -> reusecast::Result<()> {
    // periodic phase, then a scan, then a tighter periodic phase
    let blocks = (0..3000)
        .map(|i| i % 24)
        .chain(100_000..101_500)
        .chain((0..1500).map(|i| 200_000 + i % 6));
    let trace = Trace::from_blocks(blocks, DEFAULT_BLOCK_SIZE);

    let out_dir = std::env::temp_dir().join("reusecast-reuse-patterns");
    fs::create_dir_all(&out_dir)?;

    let csv_path = out_dir.join("rd_timeseries.csv");
    let mut csv = Vec::new();
    let rows = export_rd_timeseries(&trace, &mut csv)?;
    fs::write(&csv_path, csv)?;

    let points: Vec<(f64, f64)> = backward_rd(&trace)
        .iter()
        .enumerate()
        .map(|(t, d)| (t as f64, d.map(|v| v as f64).unwrap_or(0.0)))
        .collect();
    let svg_path = out_dir.join("patterns.svg");
    fs::write(
        &svg_path,
        scatter_svg(&points, "reuse distance over time", "time", "rd"),
    )?;

    println!("{rows} accesses");
    println!("csv: {}", csv_path.display());
    println!("svg: {}", svg_path.display());
    Ok(())
}
