//! Least-frequently-used with least-recent tiebreak.

use std::collections::{BTreeSet, HashMap};

use super::{check_cache_size, SimResult};
use crate::error::Result;
use crate::trace::{BlockId, Trace};

/// LFU: evict the minimum-frequency resident, ties by least-recent use.
/// Frequencies persist while a block is resident and reset on eviction.
pub fn simulate_lfu(trace: &Trace, cache_size: usize) -> Result<SimResult> {
    check_cache_size(cache_size)?;
    // (frequency, last-use time, block) orders victims; times are unique
    let mut order: BTreeSet<(u64, u64, BlockId)> = BTreeSet::new();
    let mut resident: HashMap<BlockId, (u64, u64)> = HashMap::new();
    let mut misses = 0u64;

    for access in trace.accesses() {
        let t = access.time;
        let block = access.block;
        match resident.get(&block).copied() {
            Some((freq, last)) => {
                order.remove(&(freq, last, block));
                resident.insert(block, (freq + 1, t));
                order.insert((freq + 1, t, block));
            }
            None => {
                misses += 1;
                if resident.len() == cache_size {
                    let victim = *order.iter().next().expect("cache full");
                    order.remove(&victim);
                    resident.remove(&victim.2);
                }
                resident.insert(block, (1, t));
                order.insert((1, t, block));
            }
        }
        debug_assert!(resident.len() <= cache_size);
    }
    Ok(SimResult::new("lfu", cache_size, trace.len() as u64, misses))
}
