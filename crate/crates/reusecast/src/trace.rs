//! Trace ingestion and summary statistics.
//!
//! Two input formats are supported:
//!
//! * **MSR-style CSV** — one request per line with fields
//!   `Timestamp,Hostname,DiskNumber,Type,Offset,Size,ResponseTime`.
//!   Each request maps to the block key `(DiskNumber, Offset / block_size)`
//!   packed into a single 64-bit identifier (disk in the high 16 bits, block
//!   index in the low 48). Multi-block requests can optionally be expanded
//!   into `ceil(Size / block_size)` consecutive block accesses.
//! * **Plain** — UTF-8, one token per line, `#`-prefixed comment lines and
//!   blank lines skipped. Tokens may be numeric or symbolic; a symbol table
//!   assigns dense block IDs in first-seen order.
//!
//! Only logical time matters downstream: access `t` is simply the `t`-th
//! token or request in file order.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, BufReader, Read, Write};

use crate::error::{Error, Result};
use crate::locality;

/// Opaque 64-bit block identifier.
pub type BlockId = u64;

/// Standard storage-cache granularity, used when a format carries no size.
pub const DEFAULT_BLOCK_SIZE: u64 = 4096;

const BLOCK_INDEX_BITS: u32 = 48;
const BLOCK_INDEX_MAX: u64 = (1 << BLOCK_INDEX_BITS) - 1;
const DISK_MAX: u64 = u16::MAX as u64;

/// One block reference at a logical time index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Access {
    pub time: u64,
    pub block: BlockId,
}

/// An ordered sequence of block accesses.
///
/// Times are always exactly `0..n-1`; constructors enforce this.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    accesses: Vec<Access>,
    block_size: u64,
}

impl Trace {
    /// Builds a trace from block IDs in access order.
    pub fn from_blocks<I>(blocks: I, block_size: u64) -> Trace
    where
        I: IntoIterator<Item = BlockId>,
    {
        let accesses = blocks
            .into_iter()
            .enumerate()
            .map(|(t, block)| Access {
                time: t as u64,
                block,
            })
            .collect();
        Trace {
            accesses,
            block_size,
        }
    }

    pub fn len(&self) -> usize {
        self.accesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.accesses.is_empty()
    }

    pub fn block_size(&self) -> u64 {
        self.block_size
    }

    /// Block referenced at logical time `t`.
    pub fn block(&self, t: usize) -> BlockId {
        self.accesses[t].block
    }

    pub fn accesses(&self) -> &[Access] {
        &self.accesses
    }

    pub fn blocks(&self) -> impl Iterator<Item = BlockId> + '_ {
        self.accesses.iter().map(|a| a.block)
    }

    /// The same accesses in reverse order, re-timed 0..n-1.
    pub fn reversed(&self) -> Trace {
        Trace::from_blocks(self.accesses.iter().rev().map(|a| a.block), self.block_size)
    }
}

/// Maps dense block IDs back to the tokens that produced them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolTable {
    names: Vec<String>,
}

impl SymbolTable {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, id: BlockId) -> Option<&str> {
        self.names.get(id as usize).map(|s| s.as_str())
    }

    /// Dense ID of a token, if it was seen during parsing.
    pub fn id(&self, token: &str) -> Option<BlockId> {
        self.names.iter().position(|n| n == token).map(|i| i as u64)
    }
}

/// Per-trace summary counters.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStats {
    pub length: u64,
    pub unique_blocks: u64,
    pub mean_accesses_per_block: f64,
    pub unique_deltas: u64,
    /// `unique_deltas / unique_blocks - 1`; negative when deltas compress.
    pub delta_compression_ratio: f64,
}

/// Parses an MSR-style CSV block trace.
///
/// `expand_multiblock` controls whether a request of `Size` bytes emits
/// `ceil(Size / block_size)` consecutive block accesses or just the first.
pub fn parse_msr_csv<R: Read>(
    reader: R,
    block_size: u64,
    expand_multiblock: bool,
) -> Result<Trace> {
    if block_size == 0 {
        return Err(Error::invalid("block_size must be > 0"));
    }
    let mut blocks: Vec<BlockId> = Vec::new();
    for (lineno, line) in BufReader::new(reader).lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::parse(
                lineno,
                format!("expected 7 comma-separated fields, got {}", fields.len()),
            ));
        }
        let disk: u64 = fields[2]
            .trim()
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad DiskNumber {:?}", fields[2])))?;
        let offset: u64 = fields[4]
            .trim()
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad Offset {:?}", fields[4])))?;
        let size: u64 = fields[5]
            .trim()
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad Size {:?}", fields[5])))?;
        if disk > DISK_MAX {
            return Err(Error::parse(
                lineno,
                format!("DiskNumber {disk} does not fit the 16-bit disk field"),
            ));
        }
        let first_index = offset / block_size;
        let count = if expand_multiblock {
            size.div_ceil(block_size)
        } else {
            1
        };
        for j in 0..count {
            let index = first_index + j;
            if index > BLOCK_INDEX_MAX {
                return Err(Error::parse(
                    lineno,
                    format!("block index {index} does not fit the 48-bit index field"),
                ));
            }
            blocks.push((disk << BLOCK_INDEX_BITS) | index);
        }
    }
    Ok(Trace::from_blocks(blocks, block_size))
}

/// Parses the plain one-token-per-line format.
///
/// All tokens go through the symbol table, so numeric tokens receive dense
/// IDs in first-seen order just like symbolic ones.
pub fn parse_plain<R: Read>(reader: R) -> Result<(Trace, SymbolTable)> {
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, BlockId> = HashMap::new();
    let mut blocks: Vec<BlockId> = Vec::new();
    for (lineno, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| Error::parse(lineno + 1, e.to_string()))?;
        let token = line.trim();
        if token.is_empty() || token.starts_with('#') {
            continue;
        }
        let id = match index.get(token) {
            Some(&id) => id,
            None => {
                let id = names.len() as BlockId;
                names.push(token.to_string());
                index.insert(token.to_string(), id);
                id
            }
        };
        blocks.push(id);
    }
    if blocks.is_empty() {
        return Err(Error::EmptyTrace);
    }
    Ok((
        Trace::from_blocks(blocks, DEFAULT_BLOCK_SIZE),
        SymbolTable { names },
    ))
}

/// Writes a trace in the plain format, one token per line.
///
/// Block IDs missing from the symbol table are written numerically, so a
/// default table serializes raw IDs.
pub fn write_plain<W: Write>(trace: &Trace, symbols: &SymbolTable, mut writer: W) -> Result<()> {
    for access in trace.accesses() {
        match symbols.name(access.block) {
            Some(name) => writeln!(writer, "{name}")?,
            None => writeln!(writer, "{}", access.block)?,
        }
    }
    Ok(())
}

/// Computes length, block, and address-delta counters for a trace.
pub fn trace_stats(trace: &Trace) -> Result<TraceStats> {
    if trace.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let unique_blocks = trace.blocks().collect::<HashSet<_>>().len() as u64;
    let unique_deltas = locality::address_deltas(trace)
        .into_iter()
        .collect::<HashSet<_>>()
        .len() as u64;
    let length = trace.len() as u64;
    Ok(TraceStats {
        length,
        unique_blocks,
        mean_accesses_per_block: length as f64 / unique_blocks as f64,
        unique_deltas,
        delta_compression_ratio: unique_deltas as f64 / unique_blocks as f64 - 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn msr_row(disk: u64, offset: u64, size: u64) -> String {
        format!("128166372003061629,hm,{disk},Read,{offset},{size},58000")
    }

    /// Reference parser used as an oracle: splits every line by hand and
    /// tracks the expected emission order independently.
    fn reference_msr_blocks(rows: &[(u64, u64, u64)], block_size: u64, expand: bool) -> Vec<u64> {
        let mut out = Vec::new();
        for &(disk, offset, size) in rows {
            let n = if expand {
                (size + block_size - 1) / block_size
            } else {
                1
            };
            for j in 0..n {
                out.push((disk << 48) | (offset / block_size + j));
            }
        }
        out
    }

    #[test]
    fn msr_single_row_maps_to_disk_and_block_index() {
        let data = msr_row(0, 8192, 4096);
        let trace = parse_msr_csv(Cursor::new(data), 4096, false).unwrap();
        assert_eq!(trace.len(), 1);
        assert_eq!(trace.block(0), 2); // disk 0, offset 8192 / 4096
    }

    #[test]
    fn msr_expand_emits_consecutive_blocks() {
        let data = msr_row(0, 0, 8192);
        let trace = parse_msr_csv(Cursor::new(data), 4096, true).unwrap();
        assert_eq!(trace.blocks().collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn msr_ten_rows_match_reference_parser() {
        let rows: Vec<(u64, u64, u64)> = (0..10u64)
            .map(|i| (i % 3, i * 12288, 4096 * (1 + i % 4)))
            .collect();
        let text: String = rows
            .iter()
            .map(|&(d, o, s)| msr_row(d, o, s) + "\n")
            .collect();
        for expand in [false, true] {
            let trace = parse_msr_csv(Cursor::new(text.clone()), 4096, expand).unwrap();
            let expected = reference_msr_blocks(&rows, 4096, expand);
            assert_eq!(trace.blocks().collect::<Vec<_>>(), expected);
            let times: Vec<u64> = trace.accesses().iter().map(|a| a.time).collect();
            assert_eq!(times, (0..expected.len() as u64).collect::<Vec<_>>());
        }
    }

    #[test]
    fn msr_no_expand_length_equals_row_count() {
        let text: String = (0..25u64).map(|i| msr_row(0, i * 512, 16384) + "\n").collect();
        let trace = parse_msr_csv(Cursor::new(text), 4096, false).unwrap();
        assert_eq!(trace.len(), 25);
    }

    #[test]
    fn msr_rejects_malformed_row_with_line_number() {
        let data = format!("{}\nnot,a,row\n", msr_row(0, 0, 4096));
        let err = parse_msr_csv(Cursor::new(data), 4096, false).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn msr_rejects_zero_block_size() {
        let err = parse_msr_csv(Cursor::new(msr_row(0, 0, 4096)), 0, false).unwrap_err();
        assert!(matches!(err, Error::InvalidArg(_)));
    }

    #[test]
    fn msr_rejects_composite_key_overflow() {
        let data = msr_row(70000, 0, 4096);
        assert!(parse_msr_csv(Cursor::new(data), 4096, false).is_err());
        let data = msr_row(0, u64::MAX / 2, 4096);
        assert!(parse_msr_csv(Cursor::new(data), 1, false).is_err());
    }

    #[test]
    fn plain_parses_letter_token_trace() {
        let data = "a\na\na\nb\na\nb\na\nb\nc\na\n";
        let (trace, symbols) = parse_plain(Cursor::new(data)).unwrap();
        assert_eq!(trace.len(), 10);
        assert_eq!(trace.blocks().collect::<HashSet<_>>().len(), 3);
        assert_eq!(symbols.name(0), Some("a"));
        assert_eq!(symbols.name(2), Some("c"));
    }

    #[test]
    fn plain_rejects_empty_input() {
        assert!(matches!(
            parse_plain(Cursor::new("")).unwrap_err(),
            Error::EmptyTrace
        ));
        // comments only is still empty
        assert!(parse_plain(Cursor::new("# nothing\n")).is_err());
    }

    #[test]
    fn plain_mixed_numeric_tokens_use_symbol_table() {
        let (trace, symbols) = parse_plain(Cursor::new("5\n5\n7\n")).unwrap();
        assert_eq!(trace.len(), 3);
        assert_eq!(trace.blocks().collect::<Vec<_>>(), vec![0, 0, 1]);
        assert_eq!(symbols.id("7"), Some(1));
    }

    #[test]
    fn plain_round_trip_reproduces_tokens() {
        let input = "a\n42\nxyz\na\n# comment dropped\n42\n";
        let (trace, symbols) = parse_plain(Cursor::new(input)).unwrap();
        let mut out = Vec::new();
        write_plain(&trace, &symbols, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "a\n42\nxyz\na\n42\n");
    }

    #[test]
    fn stats_worked_example_counts() {
        let (trace, _) = parse_plain(Cursor::new("a\na\na\nb\na\nb\na\nb\nc\na\n")).unwrap();
        let stats = trace_stats(&trace).unwrap();
        assert_eq!(stats.length, 10);
        assert_eq!(stats.unique_blocks, 3);
        assert!((stats.mean_accesses_per_block - 10.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn stats_strided_blocks_compress() {
        let trace = Trace::from_blocks([0, 4, 8, 12], DEFAULT_BLOCK_SIZE);
        let stats = trace_stats(&trace).unwrap();
        assert_eq!(stats.unique_blocks, 4);
        assert_eq!(stats.unique_deltas, 2); // {0, 4}
        assert!((stats.delta_compression_ratio - (-0.5)).abs() < 1e-12);
    }

    #[test]
    fn stats_compression_sign_follows_delta_count() {
        // fewer deltas than blocks -> negative
        let trace = Trace::from_blocks([0, 4, 8, 12], DEFAULT_BLOCK_SIZE);
        assert!(trace_stats(&trace).unwrap().delta_compression_ratio < 0.0);
        // more deltas than blocks -> positive
        let trace = Trace::from_blocks([0, 10, 25, 0, 25, 10], DEFAULT_BLOCK_SIZE);
        let stats = trace_stats(&trace).unwrap();
        assert!(stats.unique_deltas > stats.unique_blocks);
        assert!(stats.delta_compression_ratio > 0.0);
    }

    #[test]
    fn stats_reject_empty_trace() {
        let trace = Trace::from_blocks(std::iter::empty(), DEFAULT_BLOCK_SIZE);
        assert!(matches!(trace_stats(&trace), Err(Error::EmptyTrace)));
    }
}
