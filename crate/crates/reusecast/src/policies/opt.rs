//! Belady's optimal policy, simulated with precomputed next-use times.

use std::collections::{BTreeSet, HashMap};

use super::{check_cache_size, SimResult};
use crate::error::Result;
use crate::trace::{BlockId, Trace};

const NEVER: u64 = u64::MAX;

/// For each access, the time of the next access to the same block
/// (`NEVER` when there is none); one backward pass.
pub(crate) fn next_use_times(trace: &Trace) -> Vec<u64> {
    let mut next: HashMap<BlockId, u64> = HashMap::new();
    let mut out = vec![NEVER; trace.len()];
    for access in trace.accesses().iter().rev() {
        if let Some(&t) = next.get(&access.block) {
            out[access.time as usize] = t;
        }
        next.insert(access.block, access.time);
    }
    out
}

/// Evicts the resident with the farthest next use, never-reused first,
/// ties to the lowest block ID.
pub(crate) struct FarthestNextUse {
    by_time: BTreeSet<(u64, BlockId)>,
    stored: HashMap<BlockId, u64>,
}

impl FarthestNextUse {
    pub(crate) fn new() -> Self {
        FarthestNextUse {
            by_time: BTreeSet::new(),
            stored: HashMap::new(),
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.stored.len()
    }

    pub(crate) fn contains(&self, block: BlockId) -> bool {
        self.stored.contains_key(&block)
    }

    /// Inserts or refreshes a resident's stored next-use time.
    pub(crate) fn upsert(&mut self, block: BlockId, time: u64) {
        if let Some(old) = self.stored.insert(block, time) {
            self.by_time.remove(&(old, block));
        }
        self.by_time.insert((time, block));
    }

    pub(crate) fn evict(&mut self) -> BlockId {
        let &(max_time, _) = self.by_time.iter().next_back().expect("cache not empty");
        let &(time, block) = self
            .by_time
            .range((max_time, 0)..)
            .next()
            .expect("range holds the max");
        self.by_time.remove(&(time, block));
        self.stored.remove(&block);
        block
    }
}

/// Exact OPT over block IDs, O(n log C).
pub fn simulate_opt(trace: &Trace, cache_size: usize) -> Result<SimResult> {
    check_cache_size(cache_size)?;
    let next_use = next_use_times(trace);
    let mut cache = FarthestNextUse::new();
    let mut misses = 0u64;
    for access in trace.accesses() {
        let t = access.time as usize;
        if !cache.contains(access.block) {
            misses += 1;
            if cache.len() == cache_size {
                cache.evict();
            }
        }
        cache.upsert(access.block, next_use[t]);
        debug_assert!(cache.len() <= cache_size);
    }
    Ok(SimResult::new("opt", cache_size, trace.len() as u64, misses))
}
