//! The pipeline behind the CLI subcommands. Each command is deterministic
//! for a given (config, seed) and writes only inside the output directory.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;

use crate::cluster;
use crate::config::{RunConfig, TraceFormat};
use crate::dataset::{self, Dataset};
use crate::error::{Error, Result};
use crate::locality::{self, FeatureParams};
use crate::plot;
use crate::policies::{
    self, popt_sweep, LstmPredictor, Mrc, PolicySpec, SimResult, DEFAULT_KIN_FRAC,
    DEFAULT_KOUT_FRAC,
};
use crate::rnn::{self, Checkpoint};
use crate::trace::{self, Trace, TraceStats};

fn load_trace(config: &RunConfig) -> Result<Trace> {
    if config.trace.as_os_str().is_empty() {
        return Err(Error::Config("no trace path configured".into()));
    }
    let file = File::open(&config.trace).map_err(|e| {
        Error::Config(format!("cannot open trace {}: {e}", config.trace.display()))
    })?;
    let reader = BufReader::new(file);
    match config.format {
        TraceFormat::Plain => Ok(trace::parse_plain(reader)?.0),
        TraceFormat::Msr => {
            trace::parse_msr_csv(reader, config.block_size, config.expand_multiblock)
        }
    }
}

fn ensure_out_dir(config: &RunConfig) -> Result<()> {
    fs::create_dir_all(&config.out_dir)?;
    Ok(())
}

fn out_file(config: &RunConfig, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(config.out_dir.join(name))?))
}

/// `stats`: trace summary counters, printed and written as CSV.
pub fn cmd_stats(config: &RunConfig) -> Result<TraceStats> {
    ensure_out_dir(config)?;
    let trace = load_trace(config)?;
    let stats = trace::trace_stats(&trace)?;
    println!("length                {}", stats.length);
    println!("unique blocks         {}", stats.unique_blocks);
    println!("accesses per block    {:.2}", stats.mean_accesses_per_block);
    println!("unique deltas         {}", stats.unique_deltas);
    println!(
        "delta compression     {:+.2}%",
        stats.delta_compression_ratio * 100.0
    );
    let mut w = out_file(config, "stats.csv")?;
    writeln!(
        w,
        "length,unique_blocks,mean_accesses_per_block,unique_deltas,delta_compression_ratio"
    )?;
    writeln!(
        w,
        "{},{},{},{},{}",
        stats.length,
        stats.unique_blocks,
        stats.mean_accesses_per_block,
        stats.unique_deltas,
        stats.delta_compression_ratio
    )?;
    Ok(stats)
}

/// `patterns`: the reuse-distance time series as CSV (plus scatter SVG).
pub fn cmd_patterns(config: &RunConfig) -> Result<u64> {
    ensure_out_dir(config)?;
    let trace = load_trace(config)?;
    let mut w = out_file(config, "rd_timeseries.csv")?;
    let rows = locality::export_rd_timeseries(&trace, &mut w)?;
    w.flush()?;
    if config.emit_svg {
        let rd = locality::backward_rd(&trace);
        let points: Vec<(f64, f64)> = rd
            .iter()
            .enumerate()
            .map(|(t, d)| (t as f64, d.map(|v| v as f64).unwrap_or(0.0)))
            .collect();
        let svg = plot::scatter_svg(&points, "reuse distance over time", "time", "rd");
        fs::write(config.out_dir.join("patterns.svg"), svg)?;
    }
    println!("wrote {rows} rows");
    Ok(rows)
}

/// `prepare`: trace -> clusters -> features -> scaled samples on disk.
pub fn cmd_prepare(config: &RunConfig) -> Result<PathBuf> {
    ensure_out_dir(config)?;
    let trace = load_trace(config)?;
    let deltas = locality::address_deltas(&trace);
    let cluster_model = cluster::auto_partition(
        &deltas,
        config.cluster_k_min..=config.cluster_k_max,
        config.seed,
    )?;
    let features =
        dataset::build_feature_matrix(&trace, config.k_avg, config.k_freq, &cluster_model)?;
    let targets = locality::forward_rd(&trace);
    let data = dataset::make_samples(
        &features,
        &targets,
        config.sequence_length,
        cluster_model,
        config.split_ratio,
    )?;
    let path = config.dataset_path();
    dataset::save(&data, &path)?;
    println!(
        "{} samples of shape ({}, 6), {} clusters -> {}",
        data.len(),
        data.sequence_length,
        data.cluster_model.k(),
        path.display()
    );
    Ok(path)
}

fn split_for_config(config: &RunConfig, data: &Dataset) -> Result<(Dataset, Dataset)> {
    let pool = (data.len() as f64 * config.split_ratio).floor() as usize;
    let val_pool = data.len() - pool;
    let train_take = config.train_take.unwrap_or(pool).min(pool);
    let val_take = config.val_take.unwrap_or(val_pool).min(val_pool);
    dataset::split(data, config.split_ratio, train_take, val_take)
}

/// `train`: dataset -> best-validation checkpoint + loss log.
pub fn cmd_train(config: &RunConfig) -> Result<PathBuf> {
    ensure_out_dir(config)?;
    let data = dataset::load(config.dataset_path())?;
    let (train_set, val_set) = split_for_config(config, &data)?;
    let checkpoint = rnn::train(&train_set, &val_set, &config.train_config())?;
    let mut w = out_file(config, "loss_log.csv")?;
    rnn::write_loss_log(&checkpoint.history, &mut w)?;
    w.flush()?;
    let path = config.checkpoint_path();
    rnn::save_checkpoint(&checkpoint, &path)?;
    let best = checkpoint
        .history
        .iter()
        .map(|e| e.val_mse)
        .fold(f64::INFINITY, f64::min);
    println!(
        "{} epochs, best validation mse {best:.6} -> {}",
        checkpoint.history.len(),
        path.display()
    );
    Ok(path)
}

fn parse_policy(name: &str) -> Result<Option<PolicySpec>> {
    match name {
        "lru" => Ok(Some(PolicySpec::Lru)),
        "lfu" => Ok(Some(PolicySpec::Lfu)),
        "2q" => Ok(Some(PolicySpec::TwoQ {
            kin_frac: DEFAULT_KIN_FRAC,
            kout_frac: DEFAULT_KOUT_FRAC,
        })),
        "arc" => Ok(Some(PolicySpec::Arc)),
        "opt" => Ok(Some(PolicySpec::Opt)),
        "popt" => Ok(None),
        other => Err(Error::Config(format!("unknown policy {other:?}"))),
    }
}

fn run_sweeps(config: &RunConfig, trace: &Trace) -> Result<Vec<SimResult>> {
    if config.cache_sizes.is_empty() {
        return Err(Error::Config("cache_sizes is empty".into()));
    }
    let mut results = Vec::new();
    for name in &config.policies {
        match parse_policy(name)? {
            Some(policy) => {
                results.extend(policies::mrc_results(trace, policy, &config.cache_sizes)?)
            }
            None => {
                let checkpoint = rnn::load_checkpoint(config.checkpoint_path())?;
                results.extend(popt_results(config, trace, &checkpoint)?);
            }
        }
    }
    Ok(results)
}

/// pOPT sweep driven by a trained checkpoint, reported under the plain
/// `popt` policy name.
fn popt_results(
    config: &RunConfig,
    trace: &Trace,
    checkpoint: &Checkpoint,
) -> Result<Vec<SimResult>> {
    let mut predictor = LstmPredictor::new(checkpoint);
    let feature_params = FeatureParams {
        k_avg: config.k_avg,
        k_freq: config.k_freq,
    };
    let mut results = popt_sweep(
        trace,
        &config.cache_sizes,
        &mut predictor,
        feature_params,
        checkpoint.params.seq_len,
        &checkpoint.cluster_model,
        &checkpoint.scaler,
    )?;
    for r in &mut results {
        r.policy = "popt".into();
    }
    Ok(results)
}

fn curves_from_results(results: &[SimResult], sizes: &[usize]) -> Vec<Mrc> {
    let mut curves: Vec<Mrc> = Vec::new();
    for result in results {
        match curves.iter_mut().find(|c| c.policy == result.policy) {
            Some(curve) => ratios_push(curve, result),
            None => {
                let mut curve = Mrc {
                    policy: result.policy.clone(),
                    sizes: sizes.to_vec(),
                    ratios: Vec::new(),
                };
                ratios_push(&mut curve, result);
                curves.push(curve);
            }
        }
    }
    curves
}

fn ratios_push(curve: &mut Mrc, result: &SimResult) {
    curve.ratios.push(result.miss_ratio());
}

/// `simulate`: per-policy sweeps as CSV plus the MRC chart.
pub fn cmd_simulate(config: &RunConfig) -> Result<Vec<SimResult>> {
    ensure_out_dir(config)?;
    let trace = load_trace(config)?;
    let results = run_sweeps(config, &trace)?;
    let mut w = out_file(config, "sim_results.csv")?;
    policies::write_results_csv(&results, &mut w)?;
    w.flush()?;

    let curves = curves_from_results(&results, &config.cache_sizes);
    let series: Vec<(String, Vec<(f64, f64)>)> = curves
        .iter()
        .map(|c| {
            (
                c.policy.clone(),
                c.sizes
                    .iter()
                    .zip(&c.ratios)
                    .map(|(&s, &r)| (s as f64, r))
                    .collect(),
            )
        })
        .collect();
    let svg = plot::line_chart_svg(&series, "miss ratio curves", "cache size (blocks)", "miss ratio");
    fs::write(config.out_dir.join("mrc.svg"), svg)?;
    for result in &results {
        println!(
            "{:5}  C={:<6} misses={:<8} ratio={:.4}",
            result.policy,
            result.cache_size,
            result.misses,
            result.miss_ratio()
        );
    }
    Ok(results)
}

/// One row of the `compare` summary.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub policy: String,
    pub avg_miss_ratio: f64,
    /// Percentage points above OPT's average miss ratio.
    pub delta_vs_opt_pp: f64,
    /// Percentage points relative to LRU's average miss ratio.
    pub delta_vs_lru_pp: f64,
}

/// `compare`: per-policy average miss ratios and deltas vs OPT and LRU.
///
/// OPT and LRU are always simulated as baselines even when absent from the
/// configured policy list.
pub fn cmd_compare(config: &RunConfig) -> Result<Vec<CompareRow>> {
    ensure_out_dir(config)?;
    let trace = load_trace(config)?;
    let mut results = run_sweeps(config, &trace)?;
    for baseline in ["lru", "opt"] {
        if !results.iter().any(|r| r.policy == baseline) {
            let policy = parse_policy(baseline)?.expect("baseline is predictor-free");
            results.extend(policies::mrc_results(&trace, policy, &config.cache_sizes)?);
        }
    }
    let curves = curves_from_results(&results, &config.cache_sizes);
    let avg = |name: &str| -> f64 {
        let curve = curves.iter().find(|c| c.policy == name).expect("baseline present");
        curve.ratios.iter().sum::<f64>() / curve.ratios.len() as f64
    };
    let opt_avg = avg("opt");
    let lru_avg = avg("lru");

    let rows: Vec<CompareRow> = curves
        .iter()
        .map(|curve| {
            let mean = curve.ratios.iter().sum::<f64>() / curve.ratios.len() as f64;
            CompareRow {
                policy: curve.policy.clone(),
                avg_miss_ratio: mean,
                delta_vs_opt_pp: (mean - opt_avg) * 100.0,
                delta_vs_lru_pp: (mean - lru_avg) * 100.0,
            }
        })
        .collect();

    let mut w = out_file(config, "compare.csv")?;
    writeln!(w, "policy,avg_miss_ratio,delta_vs_opt_pp,delta_vs_lru_pp")?;
    println!(
        "{:<8} {:>14} {:>14} {:>14}",
        "policy", "avg miss ratio", "vs opt (pp)", "vs lru (pp)"
    );
    for row in &rows {
        writeln!(
            w,
            "{},{},{},{}",
            row.policy, row.avg_miss_ratio, row.delta_vs_opt_pp, row.delta_vs_lru_pp
        )?;
        println!(
            "{:<8} {:>14.4} {:>+14.2} {:>+14.2}",
            row.policy, row.avg_miss_ratio, row.delta_vs_opt_pp, row.delta_vs_lru_pp
        );
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Read;

    fn worked_trace_file(dir: &std::path::Path) -> PathBuf {
        let path = dir.join("worked.trace");
        fs::write(&path, "a\na\na\nb\na\nb\na\nb\nc\na\n").unwrap();
        path
    }

    fn base_config(dir: &std::path::Path) -> RunConfig {
        let mut config = RunConfig::default();
        config.trace = worked_trace_file(dir);
        config.out_dir = dir.join("out");
        config.sequence_length = 4;
        config.cluster_k_min = 2;
        config.cluster_k_max = 3;
        config.cache_sizes = vec![1, 2];
        config.policies = vec!["lru".into(), "opt".into()];
        config
    }

    #[test]
    fn stats_command_prints_and_round_trips_csv() {
        let dir = tempfile::tempdir().unwrap();
        let config = base_config(dir.path());
        let stats = cmd_stats(&config).unwrap();
        assert_eq!(stats.length, 10);
        assert_eq!(stats.unique_blocks, 3);
        assert!((stats.mean_accesses_per_block - 10.0 / 3.0).abs() < 1e-9);

        let mut text = String::new();
        File::open(config.out_dir.join("stats.csv"))
            .unwrap()
            .read_to_string(&mut text)
            .unwrap();
        let data_line = text.lines().nth(1).unwrap();
        let fields: Vec<&str> = data_line.split(',').collect();
        assert_eq!(fields[0].parse::<u64>().unwrap(), stats.length);
        assert_eq!(fields[1].parse::<u64>().unwrap(), stats.unique_blocks);
        assert_eq!(
            fields[2].parse::<f64>().unwrap(),
            stats.mean_accesses_per_block
        );
        assert_eq!(fields[3].parse::<u64>().unwrap(), stats.unique_deltas);
        assert_eq!(
            fields[4].parse::<f64>().unwrap(),
            stats.delta_compression_ratio
        );
    }

    #[test]
    fn stats_command_fails_on_missing_file() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = base_config(dir.path());
        config.trace = dir.path().join("nope.trace");
        assert!(cmd_stats(&config).is_err());
    }

    #[test]
    fn patterns_command_writes_rows_and_markers() {
        let dir = tempfile::tempdir().unwrap();
        let config = base_config(dir.path());
        assert_eq!(cmd_patterns(&config).unwrap(), 10);
        let csv = fs::read_to_string(config.out_dir.join("rd_timeseries.csv")).unwrap();
        assert_eq!(csv.lines().count(), 11);
        assert!(csv.lines().nth(1).unwrap().ends_with(",0")); // first access ∞ -> 0
        let svg = fs::read_to_string(config.out_dir.join("patterns.svg")).unwrap();
        assert_eq!(svg.matches("<circle").count(), 10);
    }

    #[test]
    fn prepare_command_builds_expected_sample_count() {
        let dir = tempfile::tempdir().unwrap();
        let config = base_config(dir.path());
        let path = cmd_prepare(&config).unwrap();
        let data = dataset::load(path).unwrap();
        assert_eq!(data.len(), 7);
        assert_eq!(data.sequence_length, 4);
    }

    #[test]
    fn prepare_rejects_overlong_sequence() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = base_config(dir.path());
        config.sequence_length = 11;
        assert!(cmd_prepare(&config).is_err());
    }

    #[test]
    fn simulate_command_reports_all_policies_and_opt_is_minimal() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = base_config(dir.path());
        config.policies = vec!["lru".into(), "lfu".into(), "arc".into(), "opt".into()];
        let results = cmd_simulate(&config).unwrap();
        for name in ["lru", "lfu", "arc", "opt"] {
            assert!(results.iter().any(|r| r.policy == name));
        }
        for &size in &config.cache_sizes {
            let opt = results
                .iter()
                .find(|r| r.policy == "opt" && r.cache_size == size)
                .unwrap()
                .misses;
            for r in results.iter().filter(|r| r.cache_size == size) {
                assert!(opt <= r.misses);
            }
        }
        let csv = fs::read_to_string(config.out_dir.join("sim_results.csv")).unwrap();
        assert_eq!(csv.lines().count(), 1 + results.len());
        assert!(config.out_dir.join("mrc.svg").exists());
    }

    #[test]
    fn compare_zero_deltas_for_identical_policies_and_hand_mean() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = base_config(dir.path());
        config.policies = vec!["lru".into(), "opt".into()];
        let rows = cmd_compare(&config).unwrap();
        let lru = rows.iter().find(|r| r.policy == "lru").unwrap();
        assert!((lru.delta_vs_lru_pp).abs() < 1e-12);
        let opt = rows.iter().find(|r| r.policy == "opt").unwrap();
        assert!((opt.delta_vs_opt_pp).abs() < 1e-12);

        // spreadsheet oracle: recompute the averages from the CSV
        let csv = fs::read_to_string(config.out_dir.join("compare.csv")).unwrap();
        for line in csv.lines().skip(1) {
            let fields: Vec<&str> = line.split(',').collect();
            let row = rows.iter().find(|r| r.policy == fields[0]).unwrap();
            assert_eq!(fields[1].parse::<f64>().unwrap(), row.avg_miss_ratio);
        }
        // and against direct simulation
        let trace = load_trace(&config).unwrap();
        for row in &rows {
            let policy = parse_policy(&row.policy).unwrap().unwrap();
            let hand: f64 = config
                .cache_sizes
                .iter()
                .map(|&s| policy.simulate(&trace, s).unwrap().miss_ratio())
                .sum::<f64>()
                / config.cache_sizes.len() as f64;
            assert!((hand - row.avg_miss_ratio).abs() < 1e-15);
        }
    }

    #[test]
    fn compare_rejects_empty_sweep() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = base_config(dir.path());
        config.cache_sizes.clear();
        assert!(cmd_compare(&config).is_err());
    }
}
