//! 1-D K-means over address deltas with an auto-selected cluster count.
//!
//! Lloyd's algorithm with k-means++ seeding runs over the *distinct* delta
//! values, each weighted by its occurrence count; at convergence this yields
//! the same centroids as running over the full multiset. Centroids are kept
//! sorted ascending so assignments and serialized models are canonical.
//! `auto_partition` picks the cluster count whose populations (accesses per
//! cluster) are most even, measured by coefficient of variation.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const DEFAULT_K_RANGE: RangeInclusive<usize> = 2..=16;
pub const DEFAULT_MAX_ITERS: usize = 100;
pub const DEFAULT_TOL: f64 = 1e-6;

/// A trained 1-D K-means model over address-delta space.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterModel {
    centroids: Vec<f64>,
    seed: u64,
}

impl ClusterModel {
    pub(crate) fn from_parts(mut centroids: Vec<f64>, seed: u64) -> ClusterModel {
        centroids.sort_by(|a, b| a.partial_cmp(b).expect("finite centroids"));
        ClusterModel { centroids, seed }
    }

    /// A single-cluster model centered at 0, for pipelines that skip clustering.
    pub fn trivial() -> ClusterModel {
        ClusterModel {
            centroids: vec![0.0],
            seed: 0,
        }
    }

    pub fn k(&self) -> usize {
        self.centroids.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn centroids(&self) -> &[f64] {
        &self.centroids
    }

    /// Index of the nearest centroid; ties go to the lower index.
    pub fn assign(&self, delta: i64) -> usize {
        let x = delta as f64;
        let mut best = 0usize;
        let mut best_dist = f64::INFINITY;
        for (i, &c) in self.centroids.iter().enumerate() {
            let d = (x - c).abs();
            if d < best_dist {
                best_dist = d;
                best = i;
            }
        }
        best
    }

    /// Weighted within-cluster sum of squared distances over a delta multiset.
    pub fn inertia(&self, deltas: &[i64]) -> f64 {
        deltas
            .iter()
            .map(|&d| {
                let c = self.centroids[self.assign(d)];
                let diff = d as f64 - c;
                diff * diff
            })
            .sum()
    }
}

/// Distinct delta values with occurrence counts, in ascending value order.
fn weighted_distinct(deltas: &[i64]) -> Vec<(f64, f64)> {
    let mut counts: BTreeMap<i64, u64> = BTreeMap::new();
    for &d in deltas {
        *counts.entry(d).or_insert(0) += 1;
    }
    counts.into_iter().map(|(v, c)| (v as f64, c as f64)).collect()
}

/// Weighted sample: index drawn with probability `weights[i] / sum`.
fn sample_index(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    debug_assert!(total > 0.0);
    let mut u = rng.random::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        u -= w;
        if u <= 0.0 {
            return i;
        }
    }
    weights.len() - 1
}

fn kmeans_plus_plus_init(points: &[(f64, f64)], k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut centroids = Vec::with_capacity(k);
    let weights: Vec<f64> = points.iter().map(|&(_, w)| w).collect();
    centroids.push(points[sample_index(rng, &weights)].0);
    let mut dist2: Vec<f64> = points
        .iter()
        .map(|&(v, _)| (v - centroids[0]) * (v - centroids[0]))
        .collect();
    while centroids.len() < k {
        let scores: Vec<f64> = points
            .iter()
            .zip(&dist2)
            .map(|(&(_, w), &d2)| w * d2)
            .collect();
        let idx = sample_index(rng, &scores);
        let c = points[idx].0;
        centroids.push(c);
        for (i, &(v, _)) in points.iter().enumerate() {
            let d2 = (v - c) * (v - c);
            if d2 < dist2[i] {
                dist2[i] = d2;
            }
        }
    }
    centroids
}

/// Lloyd's K-means over distinct delta values weighted by occurrence count.
///
/// Iterates until the largest centroid movement drops below `tol` or
/// `max_iters` is reached; deterministic for a given seed.
pub fn kmeans(deltas: &[i64], k: usize, seed: u64, max_iters: usize, tol: f64) -> Result<ClusterModel> {
    if deltas.is_empty() {
        return Err(Error::invalid("kmeans requires a non-empty delta list"));
    }
    if k == 0 {
        return Err(Error::invalid("k must be >= 1"));
    }
    let points = weighted_distinct(deltas);
    if k > points.len() {
        return Err(Error::invalid(format!(
            "k = {k} exceeds the {} distinct delta values",
            points.len()
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = kmeans_plus_plus_init(&points, k, &mut rng);

    for _ in 0..max_iters {
        // assignment step: ties to the lower centroid index
        let mut sums = vec![0.0f64; k];
        let mut mass = vec![0.0f64; k];
        for &(v, w) in &points {
            let mut best = 0usize;
            let mut best_dist = f64::INFINITY;
            for (i, &c) in centroids.iter().enumerate() {
                let d = (v - c).abs();
                if d < best_dist {
                    best_dist = d;
                    best = i;
                }
            }
            sums[best] += w * v;
            mass[best] += w;
        }
        // update step: an empty cluster keeps its centroid
        let mut movement = 0.0f64;
        for i in 0..k {
            if mass[i] > 0.0 {
                let next = sums[i] / mass[i];
                movement = movement.max((next - centroids[i]).abs());
                centroids[i] = next;
            }
        }
        if movement < tol {
            break;
        }
    }
    Ok(ClusterModel::from_parts(centroids, seed))
}

/// Cluster populations (accesses per cluster) for a candidate model.
fn populations(model: &ClusterModel, deltas: &[i64]) -> Vec<u64> {
    let mut counts = vec![0u64; model.k()];
    for &d in deltas {
        counts[model.assign(d)] += 1;
    }
    counts
}

/// Coefficient of variation of cluster populations; lower is more even.
fn population_cv(counts: &[u64]) -> f64 {
    let k = counts.len() as f64;
    let mean = counts.iter().sum::<u64>() as f64 / k;
    if mean == 0.0 {
        return 0.0;
    }
    let var = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - mean;
            d * d
        })
        .sum::<f64>()
        / k;
    var.sqrt() / mean
}

/// Runs `kmeans` across `k_range` and keeps the count whose cluster
/// populations are most evenly distributed (ties to the smaller k).
///
/// The range is clamped to the number of distinct delta values; an empty
/// feasible range is an error.
pub fn auto_partition(
    deltas: &[i64],
    k_range: RangeInclusive<usize>,
    seed: u64,
) -> Result<ClusterModel> {
    if deltas.is_empty() {
        return Err(Error::invalid("auto_partition requires a non-empty delta list"));
    }
    let distinct = weighted_distinct(deltas).len();
    let lo = (*k_range.start()).max(1);
    let hi = (*k_range.end()).min(distinct);
    if lo > hi {
        return Err(Error::invalid(format!(
            "no feasible cluster count in {:?} for {distinct} distinct deltas",
            k_range
        )));
    }
    let mut best: Option<(f64, ClusterModel)> = None;
    for k in lo..=hi {
        let model = kmeans(deltas, k, seed, DEFAULT_MAX_ITERS, DEFAULT_TOL)?;
        let cv = population_cv(&populations(&model, deltas));
        match &best {
            Some((best_cv, _)) if cv >= *best_cv => {}
            _ => best = Some((cv, model)),
        }
    }
    Ok(best.expect("non-empty feasible range").1)
}
