//! Trace-driven cache replacement simulators.
//!
//! All simulators count misses over block IDs with a whole-trace sweep; no
//! sizes, associativity, or write behavior — one block is one cache slot.
//! Wherever a policy must pick among equally ranked victims the tie breaks
//! to the lowest block ID, so runs are deterministic and the pOPT/OPT
//! equivalence holds exactly.

mod arc;
mod brute;
mod lfu;
mod lru;
mod opt;
mod popt;
mod twoq;

pub use arc::simulate_arc;
pub use brute::brute_force_min_misses;
pub use lfu::simulate_lfu;
pub use lru::simulate_lru;
pub use opt::simulate_opt;
pub use popt::{
    popt_mrc, popt_sweep, predict_all, simulate_popt, ConstantPredictor, LstmPredictor,
    OraclePredictor, Predictor,
};
pub use twoq::{simulate_2q, DEFAULT_KIN_FRAC, DEFAULT_KOUT_FRAC, MIN_2Q_CACHE};

use std::io::Write;

use crate::error::{Error, Result};
use crate::trace::Trace;

/// Outcome of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub policy: String,
    pub cache_size: usize,
    pub accesses: u64,
    pub misses: u64,
}

impl SimResult {
    pub fn new(policy: &str, cache_size: usize, accesses: u64, misses: u64) -> SimResult {
        SimResult {
            policy: policy.to_string(),
            cache_size,
            accesses,
            misses,
        }
    }

    pub fn miss_ratio(&self) -> f64 {
        if self.accesses == 0 {
            0.0
        } else {
            self.misses as f64 / self.accesses as f64
        }
    }
}

/// A miss-ratio curve: one ratio per (strictly ascending) cache size.
#[derive(Debug, Clone, PartialEq)]
pub struct Mrc {
    pub policy: String,
    pub sizes: Vec<usize>,
    pub ratios: Vec<f64>,
}

/// The baseline policies runnable without a predictor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolicySpec {
    Lru,
    Lfu,
    TwoQ { kin_frac: f64, kout_frac: f64 },
    Arc,
    Opt,
}

impl PolicySpec {
    pub fn name(&self) -> &'static str {
        match self {
            PolicySpec::Lru => "lru",
            PolicySpec::Lfu => "lfu",
            PolicySpec::TwoQ { .. } => "2q",
            PolicySpec::Arc => "arc",
            PolicySpec::Opt => "opt",
        }
    }

    pub fn simulate(&self, trace: &Trace, cache_size: usize) -> Result<SimResult> {
        match *self {
            PolicySpec::Lru => simulate_lru(trace, cache_size),
            PolicySpec::Lfu => simulate_lfu(trace, cache_size),
            PolicySpec::TwoQ {
                kin_frac,
                kout_frac,
            } => simulate_2q(trace, cache_size, kin_frac, kout_frac),
            PolicySpec::Arc => simulate_arc(trace, cache_size),
            PolicySpec::Opt => simulate_opt(trace, cache_size),
        }
    }
}

pub(crate) fn check_cache_size(cache_size: usize) -> Result<()> {
    if cache_size == 0 {
        return Err(Error::invalid("cache size must be >= 1 block"));
    }
    Ok(())
}

pub(crate) fn validate_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.is_empty() {
        return Err(Error::invalid("cache size sweep is empty"));
    }
    if !sizes.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::invalid("cache sizes must be strictly ascending"));
    }
    Ok(())
}

/// One independent simulation per size of the sweep.
///
/// LRU and OPT have the stack-inclusion property, so their curves must be
/// non-increasing in size; that is asserted here.
pub fn mrc_results(trace: &Trace, policy: PolicySpec, sizes: &[usize]) -> Result<Vec<SimResult>> {
    validate_sizes(sizes)?;
    let results = sizes
        .iter()
        .map(|&size| policy.simulate(trace, size))
        .collect::<Result<Vec<_>>>()?;
    if matches!(policy, PolicySpec::Lru | PolicySpec::Opt) {
        assert!(
            results.windows(2).all(|w| w[1].misses <= w[0].misses),
            "{} miss-ratio curve is not non-increasing",
            policy.name()
        );
    }
    Ok(results)
}

/// Sweeps one policy across cache sizes into a miss-ratio curve.
pub fn mrc(trace: &Trace, policy: PolicySpec, sizes: &[usize]) -> Result<Mrc> {
    let results = mrc_results(trace, policy, sizes)?;
    Ok(Mrc {
        policy: policy.name().to_string(),
        sizes: sizes.to_vec(),
        ratios: results.iter().map(|r| r.miss_ratio()).collect(),
    })
}

/// Writes `policy,cache_size_blocks,accesses,misses,miss_ratio` rows.
pub fn write_results_csv<W: Write>(results: &[SimResult], mut writer: W) -> Result<()> {
    writeln!(writer, "policy,cache_size_blocks,accesses,misses,miss_ratio")?;
    for r in results {
        writeln!(
            writer,
            "{},{},{},{},{}",
            r.policy,
            r.cache_size,
            r.accesses,
            r.misses,
            r.miss_ratio()
        )?;
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod testutil {
    use crate::trace::{Trace, DEFAULT_BLOCK_SIZE};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub fn trace_of(blocks: &[u64]) -> Trace {
        Trace::from_blocks(blocks.iter().copied(), DEFAULT_BLOCK_SIZE)
    }

    pub fn random_trace(seed: u64, n: usize, alphabet: u64) -> Trace {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Trace::from_blocks(
            (0..n).map(|_| rng.random_range(0..alphabet)),
            DEFAULT_BLOCK_SIZE,
        )
    }
}
