//! Sweep the replacement policies over cache sizes and chart the curves.
//!
//! ```bash
//! cargo run -p reusecast --example compare_policies
//! ```
//!
//! pOPT runs with the ground-truth oracle here, so its curve overlays OPT
//! exactly; see `popt_pipeline` for the trained-model version.

use std::fs;

use reusecast::cluster::ClusterModel;
use reusecast::dataset::ScalerParams;
use reusecast::locality::FeatureParams;
use reusecast::plot::line_chart_svg;
use reusecast::policies::{mrc, popt_mrc, Mrc, OraclePredictor, PolicySpec};
use reusecast::synth;

fn main() -> reusecast::Result<()> {
    let trace = synth::periodic_then_scan(24, 6000, 2000);
    let sizes = [4usize, 8, 16, 32, 64];

    let mut curves: Vec<Mrc> = Vec::new();
    for policy in [
        PolicySpec::Lru,
        PolicySpec::Lfu,
        PolicySpec::TwoQ { kin_frac: 0.25, kout_frac: 0.5 },
        PolicySpec::Arc,
        PolicySpec::Opt,
    ] {
        curves.push(mrc(&trace, policy, &sizes)?);
    }
    let mut oracle = OraclePredictor::new(&trace);
    curves.push(popt_mrc(
        &trace,
        &sizes,
        &mut oracle,
        FeatureParams::default(),
        8,
        &ClusterModel::trivial(),
        &ScalerParams::fit(std::iter::empty(), std::iter::empty()),
    )?);

    print!("{:>12}", "cache size");
    for &s in &sizes {
        print!("{s:>12}");
    }
    println!();
    for curve in &curves {
        print!("{:>12}", curve.policy);
        for r in &curve.ratios {
            print!("{r:>12.4}");
        }
        println!();
    }

    let series: Vec<(String, Vec<(f64, f64)>)> = curves
        .iter()
        .map(|c| {
            (
                c.policy.clone(),
                c.sizes.iter().zip(&c.ratios).map(|(&s, &r)| (s as f64, r)).collect(),
            )
        })
        .collect();
    let path = std::env::temp_dir().join("reusecast-mrc.svg");
    fs::write(
        &path,
        line_chart_svg(&series, "miss ratio curves", "cache size (blocks)", "miss ratio"),
    )?;
    println!("\nchart: {}", path.display());
    Ok(())
}
