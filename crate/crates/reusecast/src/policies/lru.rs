//! Least-recently-used, O(1) amortized per access.

use std::collections::{HashMap, VecDeque};

use super::{check_cache_size, SimResult};
use crate::error::Result;
use crate::trace::{BlockId, Trace};

/// Exact LRU over block IDs.
///
/// Recency order lives in a queue with lazy deletion: stale entries are
/// skipped at eviction time by comparing against the live last-use map.
pub fn simulate_lru(trace: &Trace, cache_size: usize) -> Result<SimResult> {
    check_cache_size(cache_size)?;
    let mut last_use: HashMap<BlockId, u64> = HashMap::new();
    let mut queue: VecDeque<(u64, BlockId)> = VecDeque::new();
    let mut misses = 0u64;

    for access in trace.accesses() {
        let t = access.time;
        let block = access.block;
        if !last_use.contains_key(&block) {
            misses += 1;
            if last_use.len() == cache_size {
                loop {
                    let (stamp, victim) = queue.pop_front().expect("queue tracks residents");
                    if last_use.get(&victim) == Some(&stamp) {
                        last_use.remove(&victim);
                        break;
                    }
                }
            }
        }
        last_use.insert(block, t);
        queue.push_back((t, block));
        debug_assert!(last_use.len() <= cache_size);
    }
    Ok(SimResult::new("lru", cache_size, trace.len() as u64, misses))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policies::testutil::*;

    /// Naive list-based LRU used as an oracle.
    pub(crate) fn naive_lru_misses(trace: &Trace, cache_size: usize) -> u64 {
        let mut cache: Vec<BlockId> = Vec::new();
        let mut misses = 0;
        for block in trace.blocks() {
            if let Some(pos) = cache.iter().position(|&b| b == block) {
                cache.remove(pos);
            } else {
                misses += 1;
                if cache.len() == cache_size {
                    cache.remove(0);
                }
            }
            cache.push(block);
        }
        misses
    }

    #[test]
    fn thrashing_single_slot() {
        assert_eq!(simulate_lru(&trace_of(&[0, 1, 0]), 1).unwrap().misses, 3);
    }

    #[test]
    fn alternating_pair_fits_two_slots() {
        assert_eq!(simulate_lru(&trace_of(&[0, 1, 0, 1]), 2).unwrap().misses, 2);
    }

    #[test]
    fn rejects_zero_capacity() {
        assert!(simulate_lru(&trace_of(&[0]), 0).is_err());
    }

    #[test]
    fn matches_naive_oracle_on_random_traces() {
        for seed in 0..15 {
            let trace = random_trace(seed, 1500, 40);
            for cache_size in [1, 2, 3, 7, 16, 50] {
                assert_eq!(
                    simulate_lru(&trace, cache_size).unwrap().misses,
                    naive_lru_misses(&trace, cache_size),
                    "seed {seed} C {cache_size}"
                );
            }
        }
    }
}
