//! File formats: pattern-set text files, packed memory files and experiment
//! reports.
//!
//! # Pattern-set text format
//!
//! ```text
//! p q\n
//! <p characters from {0,1}>\n      (vector 0, bit index 0 first)
//! …                                (q lines in total)
//! ```
//!
//! One vector per line, even though the vectors are conceptually columns.
//! The final newline is written always and optional on read. Nothing else
//! is accepted: no blank lines, comments, `\r` or surrounding spaces.
//!
//! # Memory binary format
//!
//! | offset | size | field                                   |
//! |--------|------|-----------------------------------------|
//! | 0      | 4    | magic `BCMM`                            |
//! | 4      | 1    | version `0x01`                          |
//! | 5      | 1    | flags, bit 0 = preprocessed; others 0   |
//! | 6      | 4    | `p`, u32 little-endian                  |
//! | 10     | 4    | `q`, u32 little-endian                  |
//! | 14     | …    | `p` matrix rows                         |
//! |        | …    | preprocessed only: `q` stored key rows  |
//! |        | …    | preprocessed only: `q` basis rows       |
//!
//! Every row is `⌈p/8⌉` bytes, bit `i` at byte `i / 8`, position `i % 8`
//! (LSB first). Padding bits must be zero and the file must end exactly
//! after the last row.
//!
//! Concurrent writers to one path are not coordinated.

use std::fs;
use std::path::Path;

use crate::bcmm::TrainedMemory;
use crate::bitvec::{parse_bit_str, BinaryVector, BooleanMatrix, PatternSet, WORD_BITS};
use crate::bop::{orthonormalize, OrthonormalBasis};
use crate::error::{Error, Result};
use crate::experiment::{ExperimentReport, ReportFormat};

pub const MEMORY_MAGIC: &[u8; 4] = b"BCMM";
pub const MEMORY_VERSION: u8 = 0x01;
const FLAG_PREPROCESSED: u8 = 0x01;
const HEADER_LEN: usize = 14;

pub fn format_pattern_set(set: &PatternSet) -> String {
    let mut out = format!("{} {}\n", set.dimension(), set.len());
    out.reserve(set.len() * (set.dimension() + 1));
    for v in set {
        out.push_str(&v.to_string());
        out.push('\n');
    }
    out
}

pub fn parse_pattern_set(text: &str) -> Result<PatternSet> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    let mut lines = body.split('\n');
    let header = lines.next().unwrap_or_default();
    let (p, q) = parse_header(header)?;

    let mut patterns = Vec::with_capacity(q);
    for (k, line) in lines.enumerate() {
        let lineno = k + 2;
        if k >= q {
            return Err(Error::parse(
                lineno,
                format!("expected {q} patterns, found more"),
            ));
        }
        if line.len() != p || line.chars().count() != p {
            let n = line.chars().count();
            return Err(Error::parse(
                lineno,
                format!("expected {p} bits, found {n}"),
            ));
        }
        patterns.push(parse_bit_str(line).map_err(|m| Error::parse(lineno, m))?);
    }
    if patterns.len() < q {
        return Err(Error::parse(
            patterns.len() + 2,
            format!("expected {q} patterns, found {}", patterns.len()),
        ));
    }
    PatternSet::new(patterns)
}

fn parse_header(line: &str) -> Result<(usize, usize)> {
    let bad = || Error::parse(1, format!("header must be \"p q\", got {line:?}"));
    let (p, q) = line.split_once(' ').ok_or_else(bad)?;
    let num = |s: &str| -> Result<usize> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        s.parse().map_err(|_| bad())
    };
    let (p, q) = (num(p)?, num(q)?);
    if p == 0 || q == 0 {
        return Err(Error::parse(1, "p and q must both be at least 1"));
    }
    Ok((p, q))
}

pub fn read_pattern_set(path: impl AsRef<Path>) -> Result<PatternSet> {
    let bytes = fs::read(path)?;
    let text = String::from_utf8(bytes)
        .map_err(|_| Error::Format("pattern file is not valid UTF-8".into()))?;
    parse_pattern_set(&text)
}

pub fn write_pattern_set(set: &PatternSet, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_pattern_set(set))?;
    Ok(())
}

fn row_bytes(p: usize) -> usize {
    p.div_ceil(8)
}

fn push_row(out: &mut Vec<u8>, v: &BinaryVector) {
    let n = row_bytes(v.dimension());
    for b in 0..n {
        let word = v.words()[b / 8];
        out.push((word >> (8 * (b % 8))) as u8);
    }
}

fn read_row(bytes: &[u8], p: usize) -> Result<BinaryVector> {
    let mut words = vec![0u64; p.div_ceil(WORD_BITS)];
    for (b, &byte) in bytes.iter().enumerate() {
        words[b / 8] |= u64::from(byte) << (8 * (b % 8));
    }
    BinaryVector::from_words(p, words)
}

fn to_u32(n: usize, what: &str) -> Result<u32> {
    u32::try_from(n).map_err(|_| Error::Format(format!("{what} = {n} does not fit in 32 bits")))
}

pub fn encode_memory(mem: &TrainedMemory) -> Result<Vec<u8>> {
    let p = mem.dimension();
    let q = mem.len();
    let rows = p + if mem.preprocessed() { 2 * q } else { 0 };
    let mut out = Vec::with_capacity(HEADER_LEN + rows * row_bytes(p));
    out.extend_from_slice(MEMORY_MAGIC);
    out.push(MEMORY_VERSION);
    out.push(if mem.preprocessed() {
        FLAG_PREPROCESSED
    } else {
        0
    });
    out.extend_from_slice(&to_u32(p, "p")?.to_le_bytes());
    out.extend_from_slice(&to_u32(q, "q")?.to_le_bytes());
    for r in mem.matrix().rows() {
        push_row(&mut out, r);
    }
    if let (Some(keys), Some(basis)) = (mem.stored_keys(), mem.basis()) {
        for v in keys.iter().chain(basis.basis.iter()) {
            push_row(&mut out, v);
        }
    }
    Ok(out)
}

pub fn decode_memory(bytes: &[u8]) -> Result<TrainedMemory> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format(format!(
            "{} bytes is shorter than the {HEADER_LEN}-byte header",
            bytes.len()
        )));
    }
    if &bytes[..4] != MEMORY_MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    if bytes[4] != MEMORY_VERSION {
        return Err(Error::Format(format!("unsupported version {}", bytes[4])));
    }
    let flags = bytes[5];
    if flags & !FLAG_PREPROCESSED != 0 {
        return Err(Error::Format(format!("unknown flag bits {flags:#04x}")));
    }
    let preprocessed = flags & FLAG_PREPROCESSED != 0;
    let p = u32::from_le_bytes(bytes[6..10].try_into().unwrap()) as usize;
    let q = u32::from_le_bytes(bytes[10..14].try_into().unwrap()) as usize;
    if p == 0 || q == 0 {
        return Err(Error::Format("p and q must both be at least 1".into()));
    }

    let rb = row_bytes(p);
    let rows = p as u64 + if preprocessed { 2 * q as u64 } else { 0 };
    let expected = HEADER_LEN as u64 + rows * rb as u64;
    if bytes.len() as u64 != expected {
        return Err(Error::Format(format!(
            "expected {expected} bytes for p={p}, q={q}, found {}",
            bytes.len()
        )));
    }

    let mut chunks = bytes[HEADER_LEN..].chunks_exact(rb);
    let mut take = |n: usize| -> Result<Vec<BinaryVector>> {
        (0..n)
            .map(|_| read_row(chunks.next().expect("length checked"), p))
            .collect()
    };
    let matrix = BooleanMatrix::from_rows(take(p)?)?;
    let preprocessing = if preprocessed {
        let keys = PatternSet::new(take(q)?)?;
        let basis = PatternSet::new(take(q)?)?;
        if orthonormalize(&keys).basis != basis {
            return Err(Error::Format(
                "stored basis is not the orthonormalization of the stored keys".into(),
            ));
        }
        Some((keys, OrthonormalBasis::from_basis(basis)))
    } else {
        None
    };
    Ok(TrainedMemory::from_parts(matrix, q, preprocessing, None))
}

pub fn read_memory(path: impl AsRef<Path>) -> Result<TrainedMemory> {
    decode_memory(&fs::read(path)?)
}

pub fn write_memory(mem: &TrainedMemory, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_memory(mem)?)?;
    Ok(())
}

/// Renders a report. JSON is one pretty-printed object; CSV has a header row
/// and one row per trial; text is a human summary.
pub fn render_report(report: &ExperimentReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => {
            let mut s =
                serde_json::to_string_pretty(report).map_err(|e| Error::Format(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for t in &report.trials {
                w.serialize(t).map_err(|e| Error::Format(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
        }
        ReportFormat::Text => Ok(report.to_string()),
    }
}
