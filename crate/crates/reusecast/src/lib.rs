//! Predict forward reuse distance from a cache trace and put the
//! predictions to work in a pseudo-OPT replacement policy.
//!
//! The pipeline, end to end:
//!
//! 1. [`trace`] — parse a block trace (plain tokens or MSR-style CSV).
//! 2. [`locality`] — reuse distances and the per-access locality features.
//! 3. [`cluster`] — K-means over address deltas, yielding the cluster-ID
//!    feature.
//! 4. [`dataset`] — scaled `(sequence_length, 6)` samples with forward
//!    reuse distance targets, plus the contiguous train/validation split.
//! 5. [`rnn`] — a from-scratch stacked LSTM regressor trained with Adam
//!    and full-sequence backpropagation through time.
//! 6. [`policies`] — trace-driven simulators for LRU, LFU, 2Q, ARC, OPT,
//!    and the prediction-driven pOPT, with miss-ratio-curve sweeps.
//!
//! The `reusecast` binary wires these stages behind `stats | patterns |
//! prepare | train | simulate | compare` subcommands; the crate's
//! `examples/` directory shows each stage as a runnable program.

pub mod binio;
pub mod cluster;
pub mod commands;
pub mod config;
pub mod dataset;
pub mod error;
pub mod locality;
pub mod plot;
pub mod policies;
pub mod rnn;
pub mod synth;
pub mod trace;

pub use error::{Error, Result};
