//! Full 2Q: a FIFO probation queue (A1in), a ghost FIFO of evicted IDs
//! (A1out), and a main LRU section (Am). A block seen again while its ID
//! is still in A1out promotes straight to Am.

use std::collections::{HashMap, HashSet, VecDeque};

use super::{check_cache_size, SimResult};
use crate::error::{Error, Result};
use crate::trace::{BlockId, Trace};

pub const DEFAULT_KIN_FRAC: f64 = 0.25;
pub const DEFAULT_KOUT_FRAC: f64 = 0.5;
/// Smallest capacity that leaves both A1in and Am at least one slot.
pub const MIN_2Q_CACHE: usize = 4;

struct TwoQ {
    capacity: usize,
    kin: usize,
    kout: usize,
    a1in: VecDeque<BlockId>,
    a1in_set: HashSet<BlockId>,
    a1out: VecDeque<BlockId>,
    a1out_set: HashSet<BlockId>,
    am_stamps: HashMap<BlockId, u64>,
    am_order: std::collections::BTreeSet<(u64, BlockId)>,
    clock: u64,
}

impl TwoQ {
    fn resident(&self) -> usize {
        self.a1in.len() + self.am_stamps.len()
    }

    fn am_touch(&mut self, block: BlockId) {
        if let Some(stamp) = self.am_stamps.get(&block).copied() {
            self.am_order.remove(&(stamp, block));
        }
        self.clock += 1;
        self.am_stamps.insert(block, self.clock);
        self.am_order.insert((self.clock, block));
    }

    fn am_pop_lru(&mut self) -> BlockId {
        let &(stamp, block) = self.am_order.iter().next().expect("Am not empty");
        self.am_order.remove(&(stamp, block));
        self.am_stamps.remove(&block);
        block
    }

    /// Frees one slot when the cache is full.
    fn reclaim(&mut self) {
        if self.resident() < self.capacity {
            return;
        }
        if self.a1in.len() > self.kin {
            let old = self.a1in.pop_front().expect("A1in not empty");
            self.a1in_set.remove(&old);
            self.a1out.push_back(old);
            self.a1out_set.insert(old);
            if self.a1out.len() > self.kout {
                let dropped = self.a1out.pop_front().expect("A1out not empty");
                self.a1out_set.remove(&dropped);
            }
        } else {
            self.am_pop_lru();
        }
    }

    /// Returns true on a data hit.
    fn access(&mut self, block: BlockId) -> bool {
        if self.am_stamps.contains_key(&block) {
            self.am_touch(block);
            return true;
        }
        if self.a1in_set.contains(&block) {
            // stays put in the FIFO
            return true;
        }
        if self.a1out_set.contains(&block) {
            // ghost hit is still a data miss; promote to Am
            self.reclaim();
            self.a1out.retain(|&b| b != block);
            self.a1out_set.remove(&block);
            self.am_touch(block);
            return false;
        }
        self.reclaim();
        self.a1in.push_back(block);
        self.a1in_set.insert(block);
        false
    }
}

/// Full 2Q with A1in sized `kin_frac * C`, a `kout_frac * C`-entry ghost
/// list, and Am taking the remainder.
pub fn simulate_2q(
    trace: &Trace,
    cache_size: usize,
    kin_frac: f64,
    kout_frac: f64,
) -> Result<SimResult> {
    check_cache_size(cache_size)?;
    if cache_size < MIN_2Q_CACHE {
        return Err(Error::invalid(format!(
            "2Q needs a cache of at least {MIN_2Q_CACHE} blocks, got {cache_size}"
        )));
    }
    if !(0.0..=1.0).contains(&kin_frac) || !(0.0..=1.0).contains(&kout_frac) {
        return Err(Error::invalid("2Q queue fractions must be in [0, 1]"));
    }
    let kin = ((cache_size as f64 * kin_frac) as usize).max(1);
    let kout = ((cache_size as f64 * kout_frac) as usize).max(1);
    if kin >= cache_size {
        return Err(Error::invalid("kin_frac leaves no room for Am"));
    }

    let mut cache = TwoQ {
        capacity: cache_size,
        kin,
        kout,
        a1in: VecDeque::new(),
        a1in_set: HashSet::new(),
        a1out: VecDeque::new(),
        a1out_set: HashSet::new(),
        am_stamps: HashMap::new(),
        am_order: std::collections::BTreeSet::new(),
        clock: 0,
    };
    let mut misses = 0u64;
    for block in trace.blocks() {
        if !cache.access(block) {
            misses += 1;
        }
        debug_assert!(cache.resident() <= cache_size);
        debug_assert!(cache.a1out.len() <= kout);
    }
    Ok(SimResult::new("2q", cache_size, trace.len() as u64, misses))
}
