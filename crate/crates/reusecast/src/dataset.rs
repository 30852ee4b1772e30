//! Sample and dataset generation.
//!
//! A sample is a `(sequence_length, 6)` window of scaled feature rows whose
//! target is the scaled forward reuse distance at the window's last access.
//! All dimensions (six features plus the target) are min-max scaled to
//! [-1, 1]; `∞` distances are encoded as 0 *before* scaling, so with a
//! minimum of 0 they land exactly at -1. Scaler bounds are fitted on the
//! training pool only and then applied everywhere, clamping out-of-range
//! values on encode.
//!
//! Datasets serialize to a little-endian binary container (magic `RLDS`)
//! with the scaler, the cluster model, sample dimensions, row-major f32
//! payload, and a trailing CRC32.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::binio::{self, CrcReader, CrcWriter};
use crate::cluster::ClusterModel;
use crate::error::{Error, Result};
use crate::locality::{encode_rd, FeatureExtractor, FeatureParams, FeatureVector, RdSeries};
use crate::trace::Trace;

pub const NUM_FEATURES: usize = 6;
/// Scaled dimensions: the six features plus the target.
pub const NUM_DIMS: usize = 7;
pub const TARGET_DIM: usize = 6;

pub const DATASET_MAGIC: &[u8; 4] = b"RLDS";
pub const DATASET_VERSION: u16 = 1;

/// Default train fraction of the contiguous 8:2 split.
pub const DEFAULT_TRAIN_FRAC: f64 = 0.8;

/// Per-dimension min/max bounds for the linear map to [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalerParams {
    mins: [f64; NUM_DIMS],
    maxs: [f64; NUM_DIMS],
}

impl ScalerParams {
    /// Fits bounds over encoded feature rows and target values.
    pub fn fit<'a, R, T>(rows: R, targets: T) -> ScalerParams
    where
        R: IntoIterator<Item = &'a [f64; NUM_FEATURES]>,
        T: IntoIterator<Item = f64>,
    {
        let mut mins = [f64::INFINITY; NUM_DIMS];
        let mut maxs = [f64::NEG_INFINITY; NUM_DIMS];
        for row in rows {
            for (dim, &v) in row.iter().enumerate() {
                mins[dim] = mins[dim].min(v);
                maxs[dim] = maxs[dim].max(v);
            }
        }
        for t in targets {
            mins[TARGET_DIM] = mins[TARGET_DIM].min(t);
            maxs[TARGET_DIM] = maxs[TARGET_DIM].max(t);
        }
        // an unfitted dimension degenerates to the constant map
        for dim in 0..NUM_DIMS {
            if mins[dim] > maxs[dim] {
                mins[dim] = 0.0;
                maxs[dim] = 0.0;
            }
        }
        ScalerParams { mins, maxs }
    }

    pub fn from_bounds(mins: [f64; NUM_DIMS], maxs: [f64; NUM_DIMS]) -> Result<ScalerParams> {
        for dim in 0..NUM_DIMS {
            if maxs[dim] < mins[dim] {
                return Err(Error::invalid(format!("dimension {dim}: max < min")));
            }
        }
        Ok(ScalerParams { mins, maxs })
    }

    pub fn min(&self, dim: usize) -> f64 {
        self.mins[dim]
    }

    pub fn max(&self, dim: usize) -> f64 {
        self.maxs[dim]
    }

    /// Linear map onto [-1, 1], clamped; a degenerate dimension maps to 0.
    pub fn scale(&self, dim: usize, value: f64) -> f64 {
        let (n, m) = (self.mins[dim], self.maxs[dim]);
        if m == n {
            return 0.0;
        }
        (-1.0 + 2.0 / (m - n) * (value - n)).clamp(-1.0, 1.0)
    }

    /// Inverse of `scale` on the fitted range.
    pub fn unscale(&self, dim: usize, scaled: f64) -> f64 {
        let (n, m) = (self.mins[dim], self.maxs[dim]);
        n + (scaled + 1.0) * (m - n) / 2.0
    }

    /// Scales an encoded feature row in place order.
    pub fn scale_row(&self, row: &[f64; NUM_FEATURES]) -> [f64; NUM_FEATURES] {
        let mut out = [0.0; NUM_FEATURES];
        for dim in 0..NUM_FEATURES {
            out[dim] = self.scale(dim, row[dim]);
        }
        out
    }
}

/// One scaled training sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    /// Row-major `sequence_length x 6` scaled features.
    pub features: Vec<f32>,
    pub target: f32,
    /// Trace index of the window's last access.
    pub origin_time: u64,
}

/// Scaled samples plus everything needed to rebuild model inputs online.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub samples: Vec<Sample>,
    pub sequence_length: usize,
    pub scaler: ScalerParams,
    pub cluster_model: ClusterModel,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Assembles the per-access feature vectors for a whole trace.
pub fn build_feature_matrix(
    trace: &Trace,
    k_avg: usize,
    k_freq: usize,
    cluster_model: &ClusterModel,
) -> Result<Vec<FeatureVector>> {
    let params = FeatureParams { k_avg, k_freq };
    let mut extractor = FeatureExtractor::new(params, cluster_model)?;
    Ok(trace.blocks().map(|b| extractor.push(b)).collect())
}

/// Windows the feature rows into samples targeted at forward reuse distance.
///
/// One sample per `t` in `[sequence_length-1, n-1]`; the scaler is fitted
/// over the rows and targets covered by the leading `train_frac` of samples
/// (all of them when that pool is empty), then applied to every sample.
pub fn make_samples(
    features: &[FeatureVector],
    targets: &RdSeries,
    sequence_length: usize,
    cluster_model: ClusterModel,
    train_frac: f64,
) -> Result<Dataset> {
    let n = features.len();
    if targets.len() != n {
        return Err(Error::invalid(format!(
            "features ({n}) and targets ({}) differ in length",
            targets.len()
        )));
    }
    if sequence_length == 0 {
        return Err(Error::invalid("sequence_length must be >= 1"));
    }
    if sequence_length > n {
        return Err(Error::invalid(format!(
            "sequence_length {sequence_length} exceeds trace length {n}"
        )));
    }
    if !(0.0..=1.0).contains(&train_frac) {
        return Err(Error::invalid("train_frac must be in [0, 1]"));
    }

    let encoded: Vec<[f64; NUM_FEATURES]> = features.iter().map(|f| f.encoded()).collect();
    let encoded_targets: Vec<f64> = targets.iter().map(|&t| encode_rd(t)).collect();

    let num_samples = n - sequence_length + 1;
    let train_pool = (num_samples as f64 * train_frac).floor() as usize;
    // rows covered by the training-pool windows: 0 ..= origin of its last sample
    let fit_rows_end = if train_pool > 0 {
        sequence_length - 1 + train_pool
    } else {
        n
    };
    let fit_targets = if train_pool > 0 {
        &encoded_targets[sequence_length - 1..sequence_length - 1 + train_pool]
    } else {
        &encoded_targets[..]
    };
    let scaler = ScalerParams::fit(
        encoded[..fit_rows_end].iter(),
        fit_targets.iter().copied(),
    );

    let mut samples = Vec::with_capacity(num_samples);
    for t in sequence_length - 1..n {
        let mut rows = Vec::with_capacity(sequence_length * NUM_FEATURES);
        for row in &encoded[t + 1 - sequence_length..=t] {
            for (dim, &v) in row.iter().enumerate() {
                rows.push(scaler.scale(dim, v) as f32);
            }
        }
        samples.push(Sample {
            features: rows,
            target: scaler.scale(TARGET_DIM, encoded_targets[t]) as f32,
            origin_time: t as u64,
        });
    }
    Ok(Dataset {
        samples,
        sequence_length,
        scaler,
        cluster_model,
    })
}

/// Contiguous split: the first `ratio` of samples forms the train pool and
/// the rest the validation pool; train takes the *last* `train_take` of its
/// pool, validation the *first* `val_take` of its own.
pub fn split(
    dataset: &Dataset,
    ratio: f64,
    train_take: usize,
    val_take: usize,
) -> Result<(Dataset, Dataset)> {
    if !(0.0..=1.0).contains(&ratio) {
        return Err(Error::invalid("split ratio must be in [0, 1]"));
    }
    let n = dataset.len();
    let pool = (n as f64 * ratio).floor() as usize;
    let val_pool = n - pool;
    if train_take > pool {
        return Err(Error::invalid(format!(
            "train_take {train_take} exceeds the {pool}-sample training pool"
        )));
    }
    if val_take > val_pool {
        return Err(Error::invalid(format!(
            "val_take {val_take} exceeds the {val_pool}-sample validation pool"
        )));
    }
    let train = Dataset {
        samples: dataset.samples[pool - train_take..pool].to_vec(),
        sequence_length: dataset.sequence_length,
        scaler: dataset.scaler.clone(),
        cluster_model: dataset.cluster_model.clone(),
    };
    let val = Dataset {
        samples: dataset.samples[pool..pool + val_take].to_vec(),
        sequence_length: dataset.sequence_length,
        scaler: dataset.scaler.clone(),
        cluster_model: dataset.cluster_model.clone(),
    };
    Ok((train, val))
}

pub(crate) fn write_scaler<W: Write>(w: &mut W, scaler: &ScalerParams) -> Result<()> {
    for dim in 0..NUM_DIMS {
        w.write_f64::<LittleEndian>(scaler.mins[dim])?;
        w.write_f64::<LittleEndian>(scaler.maxs[dim])?;
    }
    Ok(())
}

pub(crate) fn read_scaler<R: Read>(r: &mut R) -> Result<ScalerParams> {
    let mut mins = [0.0; NUM_DIMS];
    let mut maxs = [0.0; NUM_DIMS];
    for dim in 0..NUM_DIMS {
        mins[dim] = r.read_f64::<LittleEndian>()?;
        maxs[dim] = r.read_f64::<LittleEndian>()?;
    }
    ScalerParams::from_bounds(mins, maxs)
}

pub(crate) fn write_cluster<W: Write>(w: &mut W, model: &ClusterModel) -> Result<()> {
    w.write_u64::<LittleEndian>(model.seed())?;
    binio::write_f64_slice(w, model.centroids())?;
    Ok(())
}

pub(crate) fn read_cluster<R: Read>(r: &mut R) -> Result<ClusterModel> {
    let seed = r.read_u64::<LittleEndian>()?;
    let centroids = binio::read_f64_slice(r)?;
    if centroids.is_empty() {
        return Err(Error::Format("cluster model has no centroids".into()));
    }
    Ok(ClusterModel::from_parts(centroids, seed))
}

/// Writes the `RLDS` container.
pub fn save<P: AsRef<Path>>(dataset: &Dataset, path: P) -> Result<()> {
    let file = File::create(path)?;
    let mut w = CrcWriter::new(BufWriter::new(file));
    binio::write_magic(&mut w, DATASET_MAGIC, DATASET_VERSION)?;
    write_scaler(&mut w, &dataset.scaler)?;
    write_cluster(&mut w, &dataset.cluster_model)?;
    w.write_u32::<LittleEndian>(dataset.sequence_length as u32)?;
    w.write_u64::<LittleEndian>(dataset.samples.len() as u64)?;
    for sample in &dataset.samples {
        w.write_u64::<LittleEndian>(sample.origin_time)?;
        w.write_f32::<LittleEndian>(sample.target)?;
        for &v in &sample.features {
            w.write_f32::<LittleEndian>(v)?;
        }
    }
    w.finish()
}

/// Reads an `RLDS` container, verifying version and checksum.
pub fn load<P: AsRef<Path>>(path: P) -> Result<Dataset> {
    let file = File::open(path)?;
    let mut r = CrcReader::new(BufReader::new(file));
    binio::read_magic(&mut r, DATASET_MAGIC, DATASET_VERSION)?;
    let scaler = read_scaler(&mut r)?;
    let cluster_model = read_cluster(&mut r)?;
    let sequence_length = r.read_u32::<LittleEndian>()? as usize;
    let count = r.read_u64::<LittleEndian>()? as usize;
    let row_len = sequence_length * NUM_FEATURES;
    let mut samples = Vec::with_capacity(count);
    for _ in 0..count {
        let origin_time = r.read_u64::<LittleEndian>()?;
        let target = r.read_f32::<LittleEndian>()?;
        let mut features = Vec::with_capacity(row_len);
        for _ in 0..row_len {
            features.push(r.read_f32::<LittleEndian>()?);
        }
        samples.push(Sample {
            features,
            target,
            origin_time,
        });
    }
    r.verify()?;
    Ok(Dataset {
        samples,
        sequence_length,
        scaler,
        cluster_model,
    })
}

/// Debug exporter: one CSV row per (sample, step) with origin indices.
pub fn export_debug_csv<W: Write>(dataset: &Dataset, mut writer: W) -> Result<()> {
    writeln!(
        writer,
        "sample,origin_time,step,delta,rd,penult_rd,win_avg_rd,win_freq,cluster_id,target"
    )?;
    for (i, sample) in dataset.samples.iter().enumerate() {
        for step in 0..dataset.sequence_length {
            let row = &sample.features[step * NUM_FEATURES..(step + 1) * NUM_FEATURES];
            writeln!(
                writer,
                "{},{},{},{},{},{},{},{},{},{}",
                i,
                sample.origin_time,
                step,
                row[0],
                row[1],
                row[2],
                row[3],
                row[4],
                row[5],
                sample.target
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster;
    use crate::locality::{address_deltas, forward_rd};
    use crate::trace::{parse_plain, DEFAULT_BLOCK_SIZE};
    use proptest::prelude::*;
    use std::io::Cursor;

    fn worked_trace() -> Trace {
        parse_plain(Cursor::new("a\na\na\nb\na\nb\na\nb\nc\na\n")).unwrap().0
    }

    fn worked_dataset(sequence_length: usize) -> Dataset {
        let trace = worked_trace();
        let cluster = cluster::kmeans(&address_deltas(&trace), 2, 0, 100, 1e-6).unwrap();
        let features = build_feature_matrix(&trace, 4, 4, &cluster).unwrap();
        let targets = forward_rd(&trace);
        make_samples(&features, &targets, sequence_length, cluster, DEFAULT_TRAIN_FRAC).unwrap()
    }

    #[test]
    fn feature_matrix_worked_example_rows() {
        let trace = worked_trace();
        let cluster = cluster::kmeans(&address_deltas(&trace), 2, 0, 100, 1e-6).unwrap();
        let features = build_feature_matrix(&trace, 4, 4, &cluster).unwrap();
        // t=7 is (b, 2, 2, 2, 2, .)
        assert_eq!(features[7].rd, Some(2));
        assert_eq!(features[7].penult_rd, Some(2));
        assert!((features[7].win_avg_rd - 2.0).abs() < 1e-12);
        assert_eq!(features[7].win_freq, 2);
        // t=4 is (a, 2, 1, 1.33, 3, .)
        assert_eq!(features[4].rd, Some(2));
        assert_eq!(features[4].penult_rd, Some(1));
        assert!((features[4].win_avg_rd - 4.0 / 3.0).abs() < 0.01);
        assert_eq!(features[4].win_freq, 3);
    }

    #[test]
    fn feature_matrix_single_access() {
        let trace = Trace::from_blocks([9], DEFAULT_BLOCK_SIZE);
        let cluster = ClusterModel::trivial();
        let features = build_feature_matrix(&trace, 100, 50, &cluster).unwrap();
        assert_eq!(features.len(), 1);
        let f = &features[0];
        assert_eq!(f.addr_delta, 0);
        assert_eq!(f.rd, None);
        assert_eq!(f.penult_rd, None);
        assert_eq!(f.win_avg_rd, 0.0);
        assert_eq!(f.win_freq, 1);
        assert_eq!(f.encoded()[1], 0.0); // ∞ encodes to 0
    }

    #[test]
    fn scale_midpoint_endpoints_and_inf() {
        let mut mins = [0.0; NUM_DIMS];
        let mut maxs = [100.0; NUM_DIMS];
        mins[TARGET_DIM] = 0.0;
        maxs[TARGET_DIM] = 100.0;
        let scaler = ScalerParams::from_bounds(mins, maxs).unwrap();
        assert_eq!(scaler.scale(TARGET_DIM, 50.0), 0.0);
        assert_eq!(scaler.scale(TARGET_DIM, 0.0), -1.0);
        assert_eq!(scaler.scale(TARGET_DIM, 100.0), 1.0);
        // ∞ encodes to 0 first, and with N = 0 lands at -1
        assert_eq!(scaler.scale(TARGET_DIM, encode_rd(None)), -1.0);
        // out-of-range values clamp
        assert_eq!(scaler.scale(TARGET_DIM, 1e9), 1.0);
        assert_eq!(scaler.scale(TARGET_DIM, -5.0), -1.0);
    }

    #[test]
    fn unscale_inverts_scale() {
        let mins = [-3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0];
        let maxs = [12.0, 10.0, 10.0, 8.5, 6.0, 3.0, 40.0];
        let scaler = ScalerParams::from_bounds(mins, maxs).unwrap();
        for dim in 0..NUM_DIMS {
            for i in 0..=20 {
                let x = mins[dim] + (maxs[dim] - mins[dim]) * i as f64 / 20.0;
                let back = scaler.unscale(dim, scaler.scale(dim, x));
                let tol = 1e-9 * x.abs().max(1.0);
                assert!((back - x).abs() <= tol, "dim {dim} x {x} back {back}");
            }
        }
    }

    #[test]
    fn degenerate_dimension_scales_to_zero() {
        let scaler = ScalerParams::from_bounds([5.0; NUM_DIMS], [5.0; NUM_DIMS]).unwrap();
        assert_eq!(scaler.scale(0, 5.0), 0.0);
        assert_eq!(scaler.scale(0, 123.0), 0.0);
        assert_eq!(scaler.unscale(0, 0.0), 5.0);
    }

    #[test]
    fn worked_example_sample_count_and_window_rows() {
        let dataset = worked_dataset(4);
        assert_eq!(dataset.len(), 7);
        // the t=7 sample covers rows t=4..=7
        let sample = &dataset.samples[4];
        assert_eq!(sample.origin_time, 7);
        let trace = worked_trace();
        let cluster = dataset.cluster_model.clone();
        let features = build_feature_matrix(&trace, 4, 4, &cluster).unwrap();
        for (step, t) in (4..=7).enumerate() {
            let expected = dataset.scaler.scale_row(&features[t].encoded());
            let row = &sample.features[step * NUM_FEATURES..(step + 1) * NUM_FEATURES];
            for dim in 0..NUM_FEATURES {
                assert_eq!(row[dim], expected[dim] as f32);
            }
        }
    }

    #[test]
    fn sample_count_formula_and_full_window_slicing() {
        let trace = {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(123);
            Trace::from_blocks((0..500).map(|_| rng.random_range(0..40u64)), DEFAULT_BLOCK_SIZE)
        };
        let cluster = cluster::kmeans(&address_deltas(&trace), 4, 0, 100, 1e-6).unwrap();
        let features = build_feature_matrix(&trace, 100, 50, &cluster).unwrap();
        let targets = forward_rd(&trace);
        let dataset =
            make_samples(&features, &targets, 16, cluster, DEFAULT_TRAIN_FRAC).unwrap();
        assert_eq!(dataset.len(), 485);
        // index-arithmetic oracle: sample i holds rows i .. i+15
        for (i, sample) in dataset.samples.iter().enumerate() {
            assert_eq!(sample.origin_time as usize, i + 15);
            let expected = dataset.scaler.scale_row(&features[i].encoded());
            for dim in 0..NUM_FEATURES {
                assert_eq!(sample.features[dim], expected[dim] as f32);
            }
        }
        // every scaled entry is in [-1, 1]
        for sample in &dataset.samples {
            assert!(sample.features.iter().all(|v| (-1.0..=1.0).contains(v)));
            assert!((-1.0..=1.0).contains(&sample.target));
        }
    }

    #[test]
    fn sequence_length_equal_to_n_gives_one_sample() {
        let dataset = worked_dataset(10);
        assert_eq!(dataset.len(), 1);
        assert_eq!(dataset.samples[0].origin_time, 9);
    }

    #[test]
    fn sequence_length_longer_than_trace_is_rejected() {
        let trace = worked_trace();
        let cluster = ClusterModel::trivial();
        let features = build_feature_matrix(&trace, 4, 4, &cluster).unwrap();
        let targets = forward_rd(&trace);
        assert!(make_samples(&features, &targets, 11, cluster, 0.8).is_err());
    }

    #[test]
    fn scaler_fits_on_training_pool_only() {
        // Targets explode in the tail; the fitted max must not see them.
        let blocks: Vec<u64> = (0..100).map(|i| i % 5).chain(200..240).collect();
        let trace = Trace::from_blocks(blocks, DEFAULT_BLOCK_SIZE);
        let cluster = cluster::kmeans(&address_deltas(&trace), 2, 0, 100, 1e-6).unwrap();
        let features = build_feature_matrix(&trace, 10, 10, &cluster).unwrap();
        let targets = forward_rd(&trace);
        let dataset = make_samples(&features, &targets, 4, cluster, 0.8).unwrap();
        let n_samples = trace.len() - 3;
        let pool = (n_samples as f64 * 0.8).floor() as usize;
        let max_train_target = (3..3 + pool)
            .map(|t| encode_rd(targets[t]))
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(dataset.scaler.max(TARGET_DIM), max_train_target);
    }

    #[test]
    fn split_takes_from_pool_edges() {
        let dataset = {
            let mut d = worked_dataset(4);
            // inflate to 100 samples by repetition for easy index math
            let sample = d.samples[0].clone();
            d.samples = (0..100)
                .map(|i| Sample {
                    origin_time: i as u64,
                    ..sample.clone()
                })
                .collect();
            d
        };
        let (train, val) = split(&dataset, 0.8, 10, 5).unwrap();
        let train_times: Vec<u64> = train.samples.iter().map(|s| s.origin_time).collect();
        let val_times: Vec<u64> = val.samples.iter().map(|s| s.origin_time).collect();
        assert_eq!(train_times, (70..80).collect::<Vec<_>>());
        assert_eq!(val_times, (80..85).collect::<Vec<_>>());

        // full takes give the contiguous 80/20 partition
        let (train, val) = split(&dataset, 0.8, 80, 20).unwrap();
        assert_eq!(train.samples[0].origin_time, 0);
        assert_eq!(train.len(), 80);
        assert_eq!(val.samples[0].origin_time, 80);
        assert_eq!(val.len(), 20);

        // takes that exceed their pools fail
        assert!(split(&dataset, 0.8, 81, 5).is_err());
        assert!(split(&dataset, 0.8, 5, 21).is_err());
    }

    #[test]
    fn save_load_round_trip() {
        let dataset = worked_dataset(4);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("worked.rlds");
        save(&dataset, &path).unwrap();
        let loaded = load(&path).unwrap();
        assert_eq!(loaded, dataset);
    }

    #[test]
    fn truncated_file_fails_checksum() {
        let dataset = worked_dataset(4);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("worked.rlds");
        save(&dataset, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
        assert!(load(&path).is_err());
    }

    #[test]
    fn newer_version_is_rejected() {
        let dataset = worked_dataset(4);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("worked.rlds");
        save(&dataset, &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[4] = 0xFF; // bump the version field
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(load(&path), Err(Error::Version { .. })));
    }

    #[test]
    fn debug_csv_has_one_row_per_sample_step() {
        let dataset = worked_dataset(4);
        let mut out = Vec::new();
        export_debug_csv(&dataset, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 1 + dataset.len() * 4);
    }

    proptest! {
        #[test]
        fn prop_scale_unscale_round_trip(
            lo in -1000.0f64..1000.0,
            span in 0.001f64..5000.0,
            frac in 0.0f64..1.0,
        ) {
            let mut mins = [0.0; NUM_DIMS];
            let mut maxs = [1.0; NUM_DIMS];
            mins[0] = lo;
            maxs[0] = lo + span;
            let scaler = ScalerParams::from_bounds(mins, maxs).unwrap();
            let x = lo + span * frac;
            let back = scaler.unscale(0, scaler.scale(0, x));
            prop_assert!((back - x).abs() <= 1e-9 * x.abs().max(1.0));
        }
    }
}
