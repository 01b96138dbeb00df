//! Readers for the on-disk input formats.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use approxrs::Error;

fn invalid(msg: String) -> anyhow::Error {
    Error::Validation(msg).into()
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Raw bit file: bit count as a little-endian u64, then the bits packed
/// little-endian into bytes.
pub fn parse_raw_bits(buf: &[u8]) -> Result<Vec<bool>> {
    if buf.len() < 8 {
        return Err(invalid("raw bit file shorter than its 8-byte header".into()));
    }
    let n = u64::from_le_bytes(buf[..8].try_into().unwrap());
    let body = &buf[8..];
    let want = n.div_ceil(8);
    if body.len() as u64 != want {
        return Err(invalid(format!("raw bit file holds {} bytes for {n} bits, expected {want}", body.len())));
    }
    Ok((0..n as usize).map(|i| body[i / 8] >> (i % 8) & 1 == 1).collect())
}

#[cfg(test)]
pub fn encode_raw_bits(bits: &[bool]) -> Vec<u8> {
    let mut out = (bits.len() as u64).to_le_bytes().to_vec();
    out.resize(8 + bits.len().div_ceil(8), 0);
    for (i, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
        out[8 + i / 8] |= 1 << (i % 8);
    }
    out
}

/// `0`/`1` characters; whitespace is ignored.
pub fn parse_text_bits(text: &str) -> Result<Vec<bool>> {
    text.chars()
        .filter(|c| !c.is_whitespace())
        .enumerate()
        .map(|(i, c)| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(invalid(format!("character {c:?} at bit {} is not 0 or 1", i + 1))),
        })
        .collect()
}

fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn number(line: usize, tok: &str) -> Result<u64> {
    tok.parse().map_err(|_| invalid(format!("line {line}: {tok:?} is not a non-negative integer")))
}

/// Strictly ascending 1-based positions of ones, one per line.
pub fn parse_positions(text: &str) -> Result<Vec<u64>> {
    let mut out: Vec<u64> = Vec::new();
    for (line, l) in lines(text) {
        let p = number(line, l)?;
        if p == 0 {
            return Err(invalid(format!("line {line}: positions start at 1")));
        }
        if out.last().is_some_and(|&q| q >= p) {
            return Err(invalid(format!("line {line}: positions must be strictly ascending")));
        }
        out.push(p);
    }
    Ok(out)
}

pub fn positions_to_bits(positions: &[u64], n: Option<u64>) -> Result<Vec<bool>> {
    let last = positions.last().copied().unwrap_or(0);
    let n = n.unwrap_or(last);
    if last > n {
        return Err(invalid(format!("position {last} beyond length {n}")));
    }
    let mut bits = vec![false; n as usize];
    for &p in positions {
        bits[p as usize - 1] = true;
    }
    Ok(bits)
}

/// `element count` pairs, one per line.
pub fn parse_pairs(text: &str) -> Result<Vec<(u64, u64)>> {
    lines(text)
        .map(|(line, l)| {
            let mut it = l.split_whitespace();
            let (Some(e), Some(c), None) = (it.next(), it.next(), it.next()) else {
                return Err(invalid(format!("line {line}: expected \"element count\"")));
            };
            Ok((number(line, e)?, number(line, c)?))
        })
        .collect()
}

/// One non-negative integer per line.
pub fn parse_ints(text: &str) -> Result<Vec<u64>> {
    lines(text).map(|(line, l)| number(line, l)).collect()
}

/// Bytes map to symbols `byte + 1`, so the alphabet is `1..=256`.
pub fn bytes_to_symbols(bytes: &[u8]) -> Vec<u32> {
    bytes.iter().map(|&b| b as u32 + 1).collect()
}
