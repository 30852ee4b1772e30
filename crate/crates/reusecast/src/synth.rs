//! Synthetic traces for demos and tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::trace::{BlockId, Trace, DEFAULT_BLOCK_SIZE};

/// `length` accesses cycling through blocks `0..period`; every access but
/// the last `period` has forward reuse distance exactly `period`.
pub fn cyclic(period: u64, length: usize) -> Trace {
    Trace::from_blocks((0..length).map(|i| i as u64 % period), DEFAULT_BLOCK_SIZE)
}

/// A one-shot scan over `length` distinct blocks starting at `start`;
/// nothing is ever reused.
pub fn scan(start: BlockId, length: usize) -> Trace {
    Trace::from_blocks((0..length as u64).map(|i| start + i), DEFAULT_BLOCK_SIZE)
}

/// A periodic phase over `period` blocks followed by a scan phase over
/// fresh blocks, the shape that separates reusable data from one-shot data.
pub fn periodic_then_scan(period: u64, periodic_len: usize, scan_len: usize) -> Trace {
    let periodic = (0..periodic_len).map(move |i| i as u64 % period);
    let scan_start = 1_000_000u64;
    let scanning = (0..scan_len as u64).map(move |i| scan_start + i);
    Trace::from_blocks(periodic.chain(scanning), DEFAULT_BLOCK_SIZE)
}

/// Uniformly random accesses over `alphabet` blocks.
pub fn random(seed: u64, length: usize, alphabet: u64) -> Trace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Trace::from_blocks(
        (0..length).map(|_| rng.random_range(0..alphabet)),
        DEFAULT_BLOCK_SIZE,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::locality::forward_rd;
    use std::collections::HashSet;

    #[test]
    fn cyclic_forward_rd_is_the_period() {
        let trace = cyclic(3, 30);
        let frd = forward_rd(&trace);
        for t in 0..27 {
            assert_eq!(frd[t], Some(3));
        }
        for t in 27..30 {
            assert_eq!(frd[t], None);
        }
    }

    #[test]
    fn scan_never_reuses() {
        let trace = scan(100, 50);
        assert!(forward_rd(&trace).iter().all(|d| d.is_none()));
        assert_eq!(trace.blocks().collect::<HashSet<_>>().len(), 50);
    }

    #[test]
    fn mixed_trace_has_both_phases() {
        let trace = periodic_then_scan(5, 100, 40);
        assert_eq!(trace.len(), 140);
        let frd = forward_rd(&trace);
        assert_eq!(frd[0], Some(5));
        assert!(frd[100..].iter().all(|d| d.is_none()));
    }

    #[test]
    fn random_is_deterministic_per_seed() {
        let a = random(9, 100, 16);
        let b = random(9, 100, 16);
        assert_eq!(a, b);
        assert_ne!(a, random(10, 100, 16));
    }
}
