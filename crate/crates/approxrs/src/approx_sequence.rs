//! δ-approximate per-symbol rank/select over strings on `{1..σ}`.
//!
//! The input is cut into blocks of δ symbols. The reduced string keeps,
//! for each symbol, only its occurrences whose running count is a multiple
//! of δ, and ends every block with a separator `$` (stored as symbol 0).
//! Queries translate through rank/select on that reduced string.

use crate::approx_bits::check_delta;
use crate::bitvec::{PlainBitVector, RankSelect};
use crate::broadword::bits_for;
use crate::codec::{Persist, Reader, Tag, Writer};
use crate::error::{check_range, Error, Result};

/// Rank/select over a string on `{0..=σ}`, as a wavelet matrix with one
/// plain bit-vector per bit of the symbol code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeqRankSelect {
    len: usize,
    sigma: u32,
    levels: Vec<PlainBitVector>,
    zeros: Vec<usize>,
}

impl SeqRankSelect {
    pub fn new(seq: &[u32], sigma: u32) -> Result<Self> {
        if let Some((i, &c)) = seq.iter().enumerate().find(|(_, &c)| c > sigma) {
            return Err(Error::Validation(format!(
                "symbol {c} at position {} outside 0..={sigma}",
                i + 1
            )));
        }
        let depth = bits_for(sigma as u64);
        let mut cur = seq.to_vec();
        let mut levels = Vec::with_capacity(depth as usize);
        for l in (0..depth).rev() {
            let bits: Vec<bool> = cur.iter().map(|&c| (c >> l) & 1 == 1).collect();
            let mut next: Vec<u32> = cur.iter().copied().filter(|&c| (c >> l) & 1 == 0).collect();
            next.extend(cur.iter().copied().filter(|&c| (c >> l) & 1 == 1));
            levels.push(PlainBitVector::from_bits(bits));
            cur = next;
        }
        Ok(Self::assemble(seq.len(), sigma, levels))
    }

    fn assemble(len: usize, sigma: u32, levels: Vec<PlainBitVector>) -> Self {
        let zeros = levels.iter().map(|v| v.count_zeros()).collect();
        SeqRankSelect { len, sigma, levels, zeros }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn sigma(&self) -> u32 {
        self.sigma
    }

    fn bit(&self, c: u32, level: usize) -> bool {
        (c >> (self.levels.len() - 1 - level)) & 1 == 1
    }

    /// Occurrences of `c` in positions `1..=i`.
    pub fn rank(&self, c: u32, i: usize) -> Result<usize> {
        check_range(i as u64, 0, self.len as u64)?;
        if c > self.sigma {
            return Ok(0);
        }
        let (mut lo, mut hi) = (0usize, i);
        for (l, v) in self.levels.iter().enumerate() {
            if self.bit(c, l) {
                lo = self.zeros[l] + v.rank1(lo)?;
                hi = self.zeros[l] + v.rank1(hi)?;
            } else {
                lo = v.rank0(lo)?;
                hi = v.rank0(hi)?;
            }
        }
        Ok(hi - lo)
    }

    /// Position of the `k`-th occurrence of `c`.
    pub fn select(&self, c: u32, k: usize) -> Result<usize> {
        let total = self.rank(c, self.len)?;
        if k == 0 || k > total {
            return Err(Error::NotFound { rank: k as u64, available: total as u64 });
        }
        let mut start = 0usize;
        for (l, v) in self.levels.iter().enumerate() {
            start = if self.bit(c, l) { self.zeros[l] + v.rank1(start)? } else { v.rank0(start)? };
        }
        let mut pos = start + k;
        for (l, v) in self.levels.iter().enumerate().rev() {
            pos = if self.bit(c, l) { v.select1(pos - self.zeros[l])? } else { v.select0(pos)? };
        }
        Ok(pos)
    }

    pub fn space_bits(&self) -> u64 {
        self.levels.iter().map(|v| v.space_bits() + 64).sum::<u64>() + 2 * 64
    }
}

impl Persist for SeqRankSelect {
    const TAG: Tag = Tag::SeqRankSelect;

    fn write_body(&self, w: &mut Writer) {
        w.u64(self.len as u64);
        w.u32(self.sigma);
        for v in &self.levels {
            v.write_body(w);
        }
    }

    fn read_body(r: &mut Reader) -> Result<Self> {
        let len = r.usize()?;
        let sigma = r.u32()?;
        let mut levels = Vec::new();
        for _ in 0..bits_for(sigma as u64) {
            let v = PlainBitVector::read_body(r)?;
            if v.len() != len {
                return Err(r.bad("wavelet level"));
            }
            levels.push(v);
        }
        Ok(Self::assemble(len, sigma, levels))
    }
}

/// Symbol code of the block separator.
const SEP: u32 = 0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeqApprox {
    n: usize,
    sigma: u32,
    delta: u64,
    counts: Vec<u64>,
    reduced: SeqRankSelect,
}

/// The reduced string for `seq` (symbols already validated).
pub fn reduce(seq: &[u32], sigma: u32, delta: u64) -> Vec<u32> {
    let mut seen = vec![0u64; sigma as usize + 1];
    let mut out = Vec::with_capacity(2 * seq.len() / delta as usize + 2);
    for (p, &c) in seq.iter().enumerate() {
        seen[c as usize] += 1;
        if seen[c as usize] % delta == 0 {
            out.push(c);
        }
        if (p + 1) as u64 % delta == 0 || p + 1 == seq.len() {
            out.push(SEP);
        }
    }
    out
}

impl SeqApprox {
    pub fn new(seq: &[u32], sigma: u32, delta: u64) -> Result<Self> {
        check_delta(delta, seq.len())?;
        if sigma < 1 {
            return Err(Error::Param("alphabet size must be at least 1".into()));
        }
        let mut counts = vec![0u64; sigma as usize];
        for (i, &c) in seq.iter().enumerate() {
            if c < 1 || c > sigma {
                return Err(Error::Validation(format!(
                    "symbol {c} at position {} outside 1..={sigma}",
                    i + 1
                )));
            }
            counts[c as usize - 1] += 1;
        }
        let reduced = SeqRankSelect::new(&reduce(seq, sigma, delta), sigma)?;
        Ok(SeqApprox { n: seq.len(), sigma, delta, counts, reduced })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn sigma(&self) -> u32 {
        self.sigma
    }

    pub fn delta(&self) -> u64 {
        self.delta
    }

    pub fn reduced(&self) -> &SeqRankSelect {
        &self.reduced
    }

    /// Occurrences of `j` in the whole input.
    pub fn count(&self, j: u32) -> Result<u64> {
        check_range(j as u64, 1, self.sigma as u64)?;
        Ok(self.counts[j as usize - 1])
    }

    /// Position in the reduced string of the end of block `k`; 0 for `k = 0`.
    fn block_end(&self, k: usize) -> Result<usize> {
        if k == 0 {
            Ok(0)
        } else {
            self.reduced.select(SEP, k)
        }
    }

    /// A value `r` with `rank_j(i) − δ < r ≤ rank_j(i)`.
    pub fn drank_a(&self, j: u32, i: usize) -> Result<u64> {
        check_range(j as u64, 1, self.sigma as u64)?;
        check_range(i as u64, 1, self.n as u64)?;
        let d = self.delta as usize;
        let k = i / d;
        let b = self.block_end(k)?;
        let before = self.reduced.rank(j, b)?;
        let mut r = self.delta * before as u64;
        if i % d != 0 {
            // the next block holds a kept occurrence of j
            let after = self.reduced.rank(j, self.block_end(k + 1)?)?;
            if after > before {
                r += (i % d) as u64;
            }
        }
        Ok(r)
    }

    /// A position `p` with `select_j(i − δ) < p ≤ select_j(i)`.
    pub fn select_a(&self, j: u32, i: u64) -> Result<u64> {
        let total = self.count(j)?;
        if i == 0 || i > total {
            return Err(Error::NotFound { rank: i, available: total });
        }
        let k = (i / self.delta) as usize;
        if k == 0 {
            return Ok(i);
        }
        let p = self.reduced.select(j, k)?;
        let blocks = self.reduced.rank(SEP, p)? as u64;
        Ok(self.delta * blocks + i % self.delta + 1)
    }

    pub fn space_bits(&self) -> u64 {
        self.reduced.space_bits() + self.counts.len() as u64 * 64 + 3 * 64
    }
}

impl Persist for SeqApprox {
    const TAG: Tag = Tag::SeqApprox;

    fn write_body(&self, w: &mut Writer) {
        w.u64(self.n as u64);
        w.u64(self.delta);
        w.words(&self.counts);
        self.reduced.write_body(w);
    }

    fn read_body(r: &mut Reader) -> Result<Self> {
        let n = r.usize()?;
        let delta = r.u64()?;
        let counts = r.words()?;
        let reduced = SeqRankSelect::read_body(r)?;
        let sigma = reduced.sigma();
        let seps = reduced.rank(SEP, reduced.len())?;
        if delta == 0
            || counts.len() != sigma as usize
            || counts.iter().sum::<u64>() != n as u64
            || seps as u64 != (n as u64).div_ceil(delta)
        {
            return Err(r.bad("reduced string"));
        }
        Ok(SeqApprox { n, sigma, delta, counts, reduced })
    }
}
