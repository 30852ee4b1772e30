//! Reuse-distance computation and the per-access locality features.
//!
//! Reuse distance here counts *all* accesses between two consecutive
//! accesses to the same block (not unique ones). The backward distance
//! looks at the previous access of the current block, the forward distance
//! at the next one; first/last accesses carry the `∞` sentinel, represented
//! as `None` throughout and converted to an encoded value only at
//! export/encoding boundaries.
//!
//! Five locality features are derived per access: address delta, reuse
//! distance, penultimate reuse distance, windowed average reuse distance,
//! and windowed access frequency. Together with a cluster ID over address
//! deltas they form the 6-wide feature vector. Both window features count
//! the current access as part of its own window.

use std::collections::{HashMap, VecDeque};
use std::io::Write;

use crate::cluster::ClusterModel;
use crate::error::{Error, Result};
use crate::trace::{BlockId, Trace};

/// Per-access distance; `None` is the `∞` sentinel.
pub type ReuseDist = Option<u64>;

/// One distance per access, aligned with trace time.
pub type RdSeries = Vec<ReuseDist>;

/// Encodes a distance for plotting/model input: `∞` becomes 0.
pub fn encode_rd(rd: ReuseDist) -> f64 {
    rd.map(|d| d as f64).unwrap_or(0.0)
}

/// Backward reuse distance for every access, one pass over a last-access map.
pub fn backward_rd(trace: &Trace) -> RdSeries {
    let mut last: HashMap<BlockId, u64> = HashMap::new();
    let mut out = Vec::with_capacity(trace.len());
    for access in trace.accesses() {
        out.push(last.get(&access.block).map(|&prev| access.time - prev));
        last.insert(access.block, access.time);
    }
    out
}

/// Forward reuse distance for every access, one backward pass over a
/// next-access map.
pub fn forward_rd(trace: &Trace) -> RdSeries {
    let mut next: HashMap<BlockId, u64> = HashMap::new();
    let mut out = vec![None; trace.len()];
    for access in trace.accesses().iter().rev() {
        out[access.time as usize] = next.get(&access.block).map(|&nxt| nxt - access.time);
        next.insert(access.block, access.time);
    }
    out
}

/// Signed block-ID differences between consecutive accesses; the first is 0.
///
/// The subtraction is two's-complement, exact whenever the true difference
/// fits an `i64` (always the case for packed disk/offset keys on one disk).
pub fn address_deltas(trace: &Trace) -> Vec<i64> {
    let mut out = Vec::with_capacity(trace.len());
    let mut prev: Option<BlockId> = None;
    for block in trace.blocks() {
        out.push(match prev {
            Some(p) => block.wrapping_sub(p) as i64,
            None => 0,
        });
        prev = Some(block);
    }
    out
}

/// Copies each block's previous reuse distance onto the current access.
///
/// `rd` must be `backward_rd(trace)`.
pub fn penultimate_rd(trace: &Trace, rd: &RdSeries) -> RdSeries {
    let mut last_rd: HashMap<BlockId, ReuseDist> = HashMap::new();
    let mut out = Vec::with_capacity(trace.len());
    for access in trace.accesses() {
        let t = access.time as usize;
        out.push(last_rd.get(&access.block).copied().flatten());
        last_rd.insert(access.block, rd[t]);
    }
    out
}

/// Average of the current block's finite reuse distances within the last
/// `k` accesses (including the current one); 0 when none are finite.
pub fn window_avg_rd(trace: &Trace, rd: &RdSeries, k: usize) -> Result<Vec<f64>> {
    let mut window = SlidingWindow::new(k)?;
    let mut out = Vec::with_capacity(trace.len());
    for access in trace.accesses() {
        window.push(access.block, rd[access.time as usize]);
        out.push(window.avg_rd(access.block));
    }
    Ok(out)
}

/// Occurrences of the current block among the last `k` accesses
/// (including the current one).
pub fn window_freq(trace: &Trace, k: usize) -> Result<Vec<u64>> {
    let mut window = SlidingWindow::new(k)?;
    let mut out = Vec::with_capacity(trace.len());
    for access in trace.accesses() {
        window.push(access.block, None);
        out.push(window.freq(access.block));
    }
    Ok(out)
}

/// Writes the `time,rd` CSV used for reuse-distance scatter plots.
/// `∞` is written as 0. Returns the number of data rows.
pub fn export_rd_timeseries<W: Write>(trace: &Trace, mut writer: W) -> Result<u64> {
    writeln!(writer, "time,rd")?;
    let rd = backward_rd(trace);
    for (t, value) in rd.iter().enumerate() {
        writeln!(writer, "{},{}", t, value.unwrap_or(0))?;
    }
    Ok(rd.len() as u64)
}

#[derive(Debug, Default, Clone, Copy)]
struct BlockWindowStats {
    freq: u64,
    finite_count: u64,
    finite_sum: u64,
}

/// Per-block counters over the last `k` accesses, O(1) amortized per push.
#[derive(Debug, Clone)]
pub struct SlidingWindow {
    k: usize,
    buf: VecDeque<(BlockId, ReuseDist)>,
    stats: HashMap<BlockId, BlockWindowStats>,
}

impl SlidingWindow {
    pub fn new(k: usize) -> Result<SlidingWindow> {
        if k == 0 {
            return Err(Error::invalid("window length k must be >= 1"));
        }
        Ok(SlidingWindow {
            k,
            buf: VecDeque::with_capacity(k + 1),
            stats: HashMap::new(),
        })
    }

    /// Appends the current access and drops the one that slid out.
    pub fn push(&mut self, block: BlockId, rd: ReuseDist) {
        self.buf.push_back((block, rd));
        {
            let entry = self.stats.entry(block).or_default();
            entry.freq += 1;
            if let Some(d) = rd {
                entry.finite_count += 1;
                entry.finite_sum += d;
            }
        }
        if self.buf.len() > self.k {
            let (old_block, old_rd) = self.buf.pop_front().expect("window not empty");
            let entry = self.stats.get_mut(&old_block).expect("tracked block");
            entry.freq -= 1;
            if let Some(d) = old_rd {
                entry.finite_count -= 1;
                entry.finite_sum -= d;
            }
            if entry.freq == 0 {
                self.stats.remove(&old_block);
            }
        }
    }

    pub fn freq(&self, block: BlockId) -> u64 {
        self.stats.get(&block).map(|s| s.freq).unwrap_or(0)
    }

    pub fn avg_rd(&self, block: BlockId) -> f64 {
        match self.stats.get(&block) {
            Some(s) if s.finite_count > 0 => s.finite_sum as f64 / s.finite_count as f64,
            _ => 0.0,
        }
    }
}

/// The 6-wide per-access feature tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub addr_delta: i64,
    pub rd: ReuseDist,
    pub penult_rd: ReuseDist,
    pub win_avg_rd: f64,
    pub win_freq: u64,
    pub cluster_id: usize,
}

impl FeatureVector {
    /// Numeric encoding with `∞` distances mapped to 0, ready for scaling.
    pub fn encoded(&self) -> [f64; 6] {
        [
            self.addr_delta as f64,
            encode_rd(self.rd),
            encode_rd(self.penult_rd),
            self.win_avg_rd,
            self.win_freq as f64,
            self.cluster_id as f64,
        ]
    }
}

/// Window lengths for the two sliding-window features.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureParams {
    pub k_avg: usize,
    pub k_freq: usize,
}

impl Default for FeatureParams {
    fn default() -> Self {
        FeatureParams {
            k_avg: 100,
            k_freq: 50,
        }
    }
}

/// Streaming feature assembly: feeds on one access at a time and yields
/// exactly the vectors the offline builder produces for the same prefix.
///
/// Single-consumer; keeps private per-trace state only.
#[derive(Debug, Clone)]
pub struct FeatureExtractor<'m> {
    cluster: &'m ClusterModel,
    last_time: HashMap<BlockId, u64>,
    last_rd: HashMap<BlockId, ReuseDist>,
    prev_block: Option<BlockId>,
    avg_window: SlidingWindow,
    freq_window: SlidingWindow,
    time: u64,
}

impl<'m> FeatureExtractor<'m> {
    pub fn new(params: FeatureParams, cluster: &'m ClusterModel) -> Result<FeatureExtractor<'m>> {
        Ok(FeatureExtractor {
            cluster,
            last_time: HashMap::new(),
            last_rd: HashMap::new(),
            prev_block: None,
            avg_window: SlidingWindow::new(params.k_avg)?,
            freq_window: SlidingWindow::new(params.k_freq)?,
            time: 0,
        })
    }

    /// Consumes the next access and returns its feature vector.
    pub fn push(&mut self, block: BlockId) -> FeatureVector {
        let t = self.time;
        let rd = self.last_time.get(&block).map(|&prev| t - prev);
        let penult_rd = self.last_rd.get(&block).copied().flatten();
        let addr_delta = match self.prev_block {
            Some(p) => block.wrapping_sub(p) as i64,
            None => 0,
        };
        self.avg_window.push(block, rd);
        self.freq_window.push(block, None);
        let vector = FeatureVector {
            addr_delta,
            rd,
            penult_rd,
            win_avg_rd: self.avg_window.avg_rd(block),
            win_freq: self.freq_window.freq(block),
            cluster_id: self.cluster.assign(addr_delta),
        };
        self.last_time.insert(block, t);
        self.last_rd.insert(block, rd);
        self.prev_block = Some(block);
        self.time += 1;
        vector
    }
}
