//! Exponential-search oracle for the minimum achievable miss count.

use std::collections::HashMap;

use super::check_cache_size;
use crate::error::{Error, Result};
use crate::trace::{BlockId, Trace};

const MAX_LEN: usize = 30;
const MAX_CACHE: usize = 3;

/// Minimum misses over every possible eviction-decision sequence, via
/// memoized search on (position, cache contents) states. Exponential;
/// restricted to `n <= 30`, `C <= 3`.
pub fn brute_force_min_misses(trace: &Trace, cache_size: usize) -> Result<u64> {
    check_cache_size(cache_size)?;
    if trace.len() > MAX_LEN || cache_size > MAX_CACHE {
        return Err(Error::invalid(format!(
            "brute-force oracle is limited to n <= {MAX_LEN}, C <= {MAX_CACHE}"
        )));
    }
    let blocks: Vec<BlockId> = trace.blocks().collect();
    let mut memo: HashMap<(usize, Vec<BlockId>), u64> = HashMap::new();
    Ok(search(&blocks, cache_size, 0, Vec::new(), &mut memo))
}

fn search(
    blocks: &[BlockId],
    cache_size: usize,
    pos: usize,
    cache: Vec<BlockId>, // sorted for canonical memo keys
    memo: &mut HashMap<(usize, Vec<BlockId>), u64>,
) -> u64 {
    if pos == blocks.len() {
        return 0;
    }
    if let Some(&cached) = memo.get(&(pos, cache.clone())) {
        return cached;
    }
    let block = blocks[pos];
    let result = if cache.binary_search(&block).is_ok() {
        search(blocks, cache_size, pos + 1, cache.clone(), memo)
    } else if cache.len() < cache_size {
        let mut next = cache.clone();
        next.insert(next.binary_search(&block).unwrap_err(), block);
        1 + search(blocks, cache_size, pos + 1, next, memo)
    } else {
        let mut best = u64::MAX;
        for victim_idx in 0..cache.len() {
            let mut next = cache.clone();
            next.remove(victim_idx);
            next.insert(next.binary_search(&block).unwrap_err(), block);
            best = best.min(search(blocks, cache_size, pos + 1, next, memo));
        }
        1 + best
    };
    memo.insert((pos, cache), result);
    result
}
