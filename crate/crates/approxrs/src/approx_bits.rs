//! δ-approximate rank/select over static bit-strings.
//!
//! [`DRankSelectA`] answers `drank_a` (value error) and `select_a`
//! (argument error) from one bit per block of `δ` positions: the bit is
//! set when the block holds a one whose rank is a multiple of `δ`.
//! [`RankDSelectA`] answers `rank_a` and `dselect_a` from the per-block
//! popcounts held in a [`PartialSums`].

use crate::bitvec::{PlainBitVector, RankSelect, SparseBitVector};
use crate::broadword::ceil_log2;
use crate::codec::{Persist, Reader, Tag, Writer};
use crate::error::{check_range, Error, Result};
use crate::psum::PartialSums;

/// Backing for the block-marker bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Markers {
    Plain(PlainBitVector),
    Sparse(SparseBitVector),
}

impl Markers {
    fn as_dyn(&self) -> &dyn RankSelect {
        match self {
            Markers::Plain(v) => v,
            Markers::Sparse(v) => v,
        }
    }

    fn write(&self, w: &mut Writer) {
        match self {
            Markers::Plain(v) => {
                w.u8(0);
                v.write_body(w)
            }
            Markers::Sparse(v) => {
                w.u8(1);
                v.write_body(w)
            }
        }
    }

    fn read(r: &mut Reader) -> Result<Self> {
        match r.u8()? {
            0 => Ok(Markers::Plain(PlainBitVector::read_body(r)?)),
            1 => Ok(Markers::Sparse(SparseBitVector::read_body(r)?)),
            _ => Err(r.bad("marker backing")),
        }
    }
}

/// How [`DRankSelectA::new`] chooses the marker backing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backing {
    /// Sparse when the marker density is at most 1/8.
    #[default]
    Auto,
    Plain,
    Sparse,
}

/// `1 ≤ δ ≤ n`; an empty input accepts any positive `δ`.
pub(crate) fn check_delta(delta: u64, n: usize) -> Result<()> {
    if delta < 1 || (n > 0 && delta > n as u64) {
        return Err(Error::Param(format!("delta {delta} outside 1..={n}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DRankSelectA {
    n: usize,
    delta: u64,
    ones: usize,
    markers: Markers,
}

impl DRankSelectA {
    pub fn new(bits: &[bool], delta: u64, backing: Backing) -> Result<Self> {
        check_delta(delta, bits.len())?;
        let d = delta as usize;
        let nb = bits.len().div_ceil(d);
        let mut marks = Vec::new();
        let mut c = 0usize;
        for (p, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
            c += 1;
            if c % d == 0 {
                marks.push(p / d + 1);
            }
        }
        let sparse = match backing {
            Backing::Auto => marks.len() * 8 <= nb,
            Backing::Plain => false,
            Backing::Sparse => true,
        };
        let markers = if sparse {
            Markers::Sparse(SparseBitVector::new(nb, &marks)?)
        } else {
            let mut v = vec![false; nb];
            for &k in &marks {
                v[k - 1] = true;
            }
            Markers::Plain(PlainBitVector::from_bits(v))
        };
        Ok(DRankSelectA { n: bits.len(), delta, ones: c, markers })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn delta(&self) -> u64 {
        self.delta
    }

    pub fn count_ones(&self) -> usize {
        self.ones
    }

    pub fn markers(&self) -> &Markers {
        &self.markers
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.markers, Markers::Sparse(_))
    }

    /// A value `r` with `rank1(i) − δ < r ≤ rank1(i)`.
    pub fn drank_a(&self, i: usize) -> Result<usize> {
        check_range(i as u64, 1, self.n as u64)?;
        let d = self.delta as usize;
        let bp = self.markers.as_dyn();
        let mut r = d * bp.rank1(i / d)?;
        if i % d != 0 && bp.get(i.div_ceil(d))? {
            r += i % d;
        }
        Ok(r)
    }

    /// A position `p` with `select1(i − δ) < p ≤ select1(i)`, taking
    /// `select1(j) = 0` for `j ≤ 0`.
    pub fn select_a(&self, i: usize) -> Result<usize> {
        if i == 0 || i > self.ones {
            return Err(Error::NotFound { rank: i as u64, available: self.ones as u64 });
        }
        let d = self.delta as usize;
        let k = i / d;
        if k == 0 {
            // select1(i) ≥ i and select1(i − δ) = 0
            return Ok(i);
        }
        // the block holding the kδ-th one starts right after (b − 1)δ; the
        // i-th one lies i mod δ ones further, so it is at least this far in
        let b = self.markers.as_dyn().select1(k)?;
        Ok(d * (b - 1) + i % d + 1)
    }

    pub fn space_bits(&self) -> u64 {
        self.markers.as_dyn().space_bits() + 3 * 64
    }
}

impl Persist for DRankSelectA {
    const TAG: Tag = Tag::DRankSelectA;

    fn write_body(&self, w: &mut Writer) {
        w.u64(self.n as u64);
        w.u64(self.delta);
        w.u64(self.ones as u64);
        self.markers.write(w);
    }

    fn read_body(r: &mut Reader) -> Result<Self> {
        let n = r.usize()?;
        let delta = r.u64()?;
        let ones = r.usize()?;
        check_delta(delta, n).map_err(|e| Error::Format(e.to_string()))?;
        let markers = Markers::read(r)?;
        let bp = markers.as_dyn();
        if bp.len() != n.div_ceil(delta as usize) || bp.count_ones() != ones / delta as usize {
            return Err(r.bad("marker vector"));
        }
        Ok(DRankSelectA { n, delta, ones, markers })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankDSelectA {
    n: usize,
    delta: u64,
    counts: PartialSums,
}

impl RankDSelectA {
    pub fn new(bits: &[bool], delta: u64) -> Result<Self> {
        check_delta(delta, bits.len())?;
        let counts: Vec<u64> =
            bits.chunks(delta as usize).map(|c| c.iter().filter(|&&b| b).count() as u64).collect();
        let alpha = ceil_log2(delta + 1);
        Ok(RankDSelectA { n: bits.len(), delta, counts: PartialSums::new(&counts, alpha)? })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn delta(&self) -> u64 {
        self.delta
    }

    pub fn count_ones(&self) -> usize {
        self.counts.total() as usize
    }

    /// Per-block popcounts.
    pub fn counts(&self) -> &PartialSums {
        &self.counts
    }

    /// `rank1(⌊i/δ⌋·δ)`, i.e. the exact rank at the last block boundary at
    /// or before `i`.
    ///
    /// The answer always lies in the closed range `[rank1(i − δ), rank1(i)]`.
    /// It can equal `rank1(i − δ)` while `rank1(i)` is larger, which the
    /// strict lower end of the rankA definition does not allow.
    pub fn rank_a(&self, i: usize) -> Result<usize> {
        check_range(i as u64, 1, self.n as u64)?;
        Ok(self.counts.sum(i / self.delta as usize)? as usize)
    }

    /// A position `p` with `select1(i) − δ < p ≤ select1(i)`: the first
    /// position of the block holding the `i`-th one.
    pub fn dselect_a(&self, i: usize) -> Result<usize> {
        let ones = self.count_ones();
        if i == 0 || i > ones {
            return Err(Error::NotFound { rank: i as u64, available: ones as u64 });
        }
        let b = self.counts.search(i as u64 - 1)?;
        Ok((b - 1) * self.delta as usize + 1)
    }

    pub fn space_bits(&self) -> u64 {
        self.counts.space_bits() + 2 * 64
    }
}

impl Persist for RankDSelectA {
    const TAG: Tag = Tag::RankDSelectA;

    fn write_body(&self, w: &mut Writer) {
        w.u64(self.n as u64);
        w.u64(self.delta);
        self.counts.write_body(w);
    }

    fn read_body(r: &mut Reader) -> Result<Self> {
        let n = r.usize()?;
        let delta = r.u64()?;
        check_delta(delta, n).map_err(|e| Error::Format(e.to_string()))?;
        let counts = PartialSums::read_body(r)?;
        if counts.len() != n.div_ceil(delta as usize) || counts.alpha() != ceil_log2(delta + 1) {
            return Err(r.bad("block counts"));
        }
        Ok(RankDSelectA { n, delta, counts })
    }
}
