//! δ-approximate rank/select over multisets of `{1..n}`.
//!
//! A multiset is given by its frequency array and viewed through its
//! characteristic vector `1^{f1} 0 1^{f2} 0 … 1^{fn} 0`: element `e` owns
//! the run of ones just before the `e`-th zero.
//!
//! * [`MultisetFixedM`] keeps every δ-th one of that vector (plus all zeros)
//!   in a sparse bit-vector.
//! * [`MultisetFixedMRd`] keeps per-block zero and one counts of the
//!   vector.
//! * [`MultisetBoundedFreq`] exploits a frequency cap `ℓ`: for `δ > ℓ` it
//!   marks groups of elements instead of individual ones.

use crate::bitvec::{PlainBitVector, RankSelect, SparseBitVector};
use crate::broadword::ceil_log2;
use crate::codec::{Persist, Reader, Tag, Writer};
use crate::error::{check_range, Error, Result};
use crate::psum::PartialSums;

/// Normalize `(element, count)` pairs over `1..=n` into a frequency array.
/// Repeated elements accumulate.
pub fn frequencies_from_pairs(n: usize, pairs: &[(u64, u64)]) -> Result<Vec<u64>> {
    let mut freq = vec![0u64; n];
    for &(e, c) in pairs {
        if e == 0 || e > n as u64 {
            return Err(Error::Validation(format!("element {e} outside 1..={n}")));
        }
        let f = &mut freq[e as usize - 1];
        *f = f.checked_add(c).ok_or_else(|| Error::Validation("frequency overflow".into()))?;
    }
    Ok(freq)
}

fn total(freq: &[u64]) -> Result<u64> {
    freq.iter()
        .try_fold(0u64, |s, &f| s.checked_add(f))
        .ok_or_else(|| Error::Validation("multiset size exceeds 64 bits".into()))
}

/// Positions (1-based) of the kept ones in the thinned characteristic
/// vector, whose length is `n + ⌊m/δ⌋`.
fn thinned_ones(freq: &[u64], delta: u64) -> Vec<usize> {
    let mut out = Vec::new();
    let mut seen = 0u64;
    let mut len = 0usize;
    for &f in freq {
        let kept = (seen + f) / delta - seen / delta;
        for _ in 0..kept {
            len += 1;
            out.push(len);
        }
        seen += f;
        len += 1;
    }
    out
}

fn not_found(i: u64, m: u64) -> Error {
    Error::NotFound { rank: i, available: m }
}

/// Every δ-th one of the characteristic vector, in a sparse bit-vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultisetFixedM {
    n: usize,
    m: u64,
    delta: u64,
    kept: SparseBitVector,
}

impl MultisetFixedM {
    pub fn new(freq: &[u64], delta: u64) -> Result<Self> {
        if delta < 1 {
            return Err(Error::Param("delta must be at least 1".into()));
        }
        let m = total(freq)?;
        let len = freq.len() + (m / delta) as usize;
        let kept = SparseBitVector::new(len, &thinned_ones(freq, delta))?;
        Ok(MultisetFixedM { n: freq.len(), m, delta, kept })
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> u64 {
        self.m
    }

    pub fn delta(&self) -> u64 {
        self.delta
    }

    pub fn kept(&self) -> &SparseBitVector {
        &self.kept
    }

    /// A value `r` with `rank(i) − δ < r ≤ rank(i)`.
    pub fn drank_a(&self, i: usize) -> Result<u64> {
        check_range(i as u64, 1, self.n as u64)?;
        Ok(self.delta * (self.kept.select0(i)? - i) as u64)
    }

    /// The element holding the `⌊i/δ⌋·δ`-th item, or 1 when `i < δ`.
    ///
    /// The answer lies in the closed range `[select(i − δ), select(i)]`.
    /// When an element repeats, it can equal `select(i − δ)` while
    /// `select(i)` is larger, which the strict selectA lower end forbids.
    pub fn select_a(&self, i: u64) -> Result<u64> {
        if i == 0 || i > self.m {
            return Err(not_found(i, self.m));
        }
        let k = (i / self.delta) as usize;
        if k == 0 {
            return Ok(1);
        }
        let p = self.kept.select1(k)?;
        Ok(self.kept.rank0(p)? as u64 + 1)
    }

    pub fn space_bits(&self) -> u64 {
        self.kept.space_bits() + 3 * 64
    }
}

impl Persist for MultisetFixedM {
    const TAG: Tag = Tag::MultisetFixedM;

    fn write_body(&self, w: &mut Writer) {
        w.u64(self.n as u64);
        w.u64(self.m);
        w.u64(self.delta);
        self.kept.write_body(w);
    }

    fn read_body(r: &mut Reader) -> Result<Self> {
        let n = r.usize()?;
        let m = r.u64()?;
        let delta = r.u64()?;
        let kept = SparseBitVector::read_body(r)?;
        if delta == 0 || kept.count_zeros() != n || kept.count_ones() as u64 != m / delta {
            return Err(r.bad("thinned vector"));
        }
        Ok(MultisetFixedM { n, m, delta, kept })
    }
}

/// Per-block zero and one counts of the characteristic vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultisetFixedMRd {
    n: usize,
    m: u64,
    delta: u64,
    zeros: PartialSums,
    ones: PartialSums,
}

impl MultisetFixedMRd {
    pub fn new(freq: &[u64], delta: u64) -> Result<Self> {
        if delta < 1 {
            return Err(Error::Param("delta must be at least 1".into()));
        }
        let m = total(freq)?;
        let len = freq.len() as u64 + m;
        let nb = len.div_ceil(delta) as usize;
        let mut zeros = vec![0u64; nb];
        let mut ones = vec![0u64; nb];
        let mut pos = 0u64;
        for &f in freq {
            // ones fill positions pos..pos+f, then a zero at pos+f
            let mut left = f;
            while left > 0 {
                let b = (pos / delta) as usize;
                let room = delta - pos % delta;
                let take = room.min(left);
                ones[b] += take;
                left -= take;
                pos += take;
            }
            zeros[(pos / delta) as usize] += 1;
            pos += 1;
        }
        let alpha = ceil_log2(delta + 1);
        Ok(MultisetFixedMRd {
            n: freq.len(),
            m,
            delta,
            zeros: PartialSums::new(&zeros, alpha)?,
            ones: PartialSums::new(&ones, alpha)?,
        })
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> u64 {
        self.m
    }

    pub fn delta(&self) -> u64 {
        self.delta
    }

    pub fn zero_counts(&self) -> &PartialSums {
        &self.zeros
    }

    pub fn one_counts(&self) -> &PartialSums {
        &self.ones
    }

    /// Items before the block holding the `i`-th zero; 0 for the first block.
    ///
    /// The answer lies in the closed range `[rank(i − δ), rank(i)]` but may
    /// equal `rank(i − δ)` when `rank(i)` is larger.
    pub fn rank_a(&self, i: usize) -> Result<u64> {
        check_range(i as u64, 1, self.n as u64)?;
        let j = self.zeros.search(i as u64 - 1)?;
        self.ones.sum(j - 1)
    }

    /// A value `p` with `select(i) − δ < p ≤ select(i)`: one more than the
    /// number of zeros before the block holding the `i`-th one.
    pub fn dselect_a(&self, i: u64) -> Result<u64> {
        if i == 0 || i > self.m {
            return Err(not_found(i, self.m));
        }
        let j = self.ones.search(i - 1)?;
        Ok(self.zeros.sum(j - 1)? + 1)
    }

    pub fn space_bits(&self) -> u64 {
        self.zeros.space_bits() + self.ones.space_bits() + 3 * 64
    }
}

impl Persist for MultisetFixedMRd {
    const TAG: Tag = Tag::MultisetFixedMRd;

    fn write_body(&self, w: &mut Writer) {
        w.u64(self.n as u64);
        w.u64(self.m);
        w.u64(self.delta);
        self.zeros.write_body(w);
        self.ones.write_body(w);
    }

    fn read_body(r: &mut Reader) -> Result<Self> {
        let n = r.usize()?;
        let m = r.u64()?;
        let delta = r.u64()?;
        let zeros = PartialSums::read_body(r)?;
        let ones = PartialSums::read_body(r)?;
        if delta == 0
            || zeros.total() != n as u64
            || ones.total() != m
            || zeros.len() != ones.len()
            || zeros.len() as u64 != (n as u64 + m).div_ceil(delta)
        {
            return Err(r.bad("block counts"));
        }
        Ok(MultisetFixedMRd { n, m, delta, zeros, ones })
    }
}

/// Group-marker vectors used when `δ > ℓ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupMarkers {
    /// Elements per group for `drank_a`: `⌊δ/ℓ⌋`.
    pub group: usize,
    pub drank_marks: PlainBitVector,
    /// Elements per group for `select_a`: `⌊δ/2ℓ⌋`, absent when zero.
    pub select_group: usize,
    pub select_marks: Option<PlainBitVector>,
    /// Thinned vector serving `select_a` when `select_group` is zero.
    pub fallback: Option<MultisetFixedM>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundedMode {
    /// `δ ≤ ℓ`: the thinned characteristic vector.
    Dense(MultisetFixedM),
    /// `δ > ℓ`: one bit per group of elements.
    Grouped(GroupMarkers),
}

/// Multiset whose element frequencies are at most `ℓ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultisetBoundedFreq {
    n: usize,
    m: u64,
    delta: u64,
    ell: u64,
    mode: BoundedMode,
}

/// Group index bits: a kept item of element `e` marks group `⌈e/g⌉`.
fn group_marks(freq: &[u64], delta: u64, group: usize) -> PlainBitVector {
    let mut marks = vec![false; freq.len().div_ceil(group)];
    let mut seen = 0u64;
    for (e, &f) in freq.iter().enumerate() {
        if (seen + f) / delta > seen / delta {
            marks[e / group] = true;
        }
        seen += f;
    }
    PlainBitVector::from_bits(marks)
}

impl MultisetBoundedFreq {
    pub fn new(freq: &[u64], delta: u64, ell: u64) -> Result<Self> {
        if delta < 1 || ell < 1 {
            return Err(Error::Param("delta and ell must be at least 1".into()));
        }
        if let Some((e, &f)) = freq.iter().enumerate().find(|(_, &f)| f > ell) {
            return Err(Error::Validation(format!(
                "element {} has frequency {f} above the cap {ell}",
                e + 1
            )));
        }
        let m = total(freq)?;
        let mode = if delta <= ell {
            BoundedMode::Dense(MultisetFixedM::new(freq, delta)?)
        } else {
            // a group of ⌊δ/ℓ⌋ elements holds at most δ items, so at most one kept item
            let group = (delta / ell) as usize;
            let select_group = (delta / (2 * ell)) as usize;
            let (select_marks, fallback) = if select_group >= 1 {
                (Some(group_marks(freq, delta, select_group)), None)
            } else {
                (None, Some(MultisetFixedM::new(freq, delta)?))
            };
            BoundedMode::Grouped(GroupMarkers {
                group,
                drank_marks: group_marks(freq, delta, group),
                select_group,
                select_marks,
                fallback,
            })
        };
        Ok(MultisetBoundedFreq { n: freq.len(), m, delta, ell, mode })
    }

    pub fn mode(&self) -> &BoundedMode {
        &self.mode
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> u64 {
        self.m
    }

    pub fn delta(&self) -> u64 {
        self.delta
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    /// A value `r` with `rank(i) − δ < r ≤ rank(i)`.
    pub fn drank_a(&self, i: usize) -> Result<u64> {
        check_range(i as u64, 1, self.n as u64)?;
        match &self.mode {
            BoundedMode::Dense(s) => s.drank_a(i),
            BoundedMode::Grouped(g) => {
                let mu = g.group;
                let mut r = self.delta * g.drank_marks.rank1(i / mu)? as u64;
                if i % mu != 0 && g.drank_marks.get(i.div_ceil(mu))? {
                    r += self.ell * (i % mu) as u64;
                }
                Ok(r)
            }
        }
    }

    /// An element `p` with `select(i − δ) < p ≤ select(i)` when `δ ≥ 2ℓ`.
    ///
    /// Otherwise this is [`MultisetFixedM::select_a`], which only
    /// guarantees the closed range.
    pub fn select_a(&self, i: u64) -> Result<u64> {
        if i == 0 || i > self.m {
            return Err(not_found(i, self.m));
        }
        match &self.mode {
            BoundedMode::Dense(s) => s.select_a(i),
            BoundedMode::Grouped(GroupMarkers { fallback: Some(s), .. }) => s.select_a(i),
            BoundedMode::Grouped(g) => {
                let marks = g.select_marks.as_ref().expect("select marks present");
                let k = i / self.delta;
                if k == 0 {
                    return Ok(1);
                }
                let mu = g.select_group as u64;
                let b = marks.select1(k as usize)? as u64;
                // the kδ-th item sits in group b. Items kδ..i span i mod δ + 1
                // ranks; whichever side of it has more than one group's worth
                // of items decides which group edge is safe.
                let r = i % self.delta;
                if self.delta - r + 1 > mu * self.ell {
                    Ok((b - 1) * mu + 1)
                } else {
                    Ok(b * mu + 1)
                }
            }
        }
    }

    pub fn space_bits(&self) -> u64 {
        let body = match &self.mode {
            BoundedMode::Dense(s) => s.space_bits(),
            BoundedMode::Grouped(g) => {
                g.drank_marks.space_bits()
                    + g.select_marks.as_ref().map_or(0, |v| v.space_bits())
                    + g.fallback.as_ref().map_or(0, |s| s.space_bits())
                    + 2 * 64
            }
        };
        body + 4 * 64
    }

    /// Bits of the structure that serves `drank_a` alone.
    pub fn drank_space_bits(&self) -> u64 {
        match &self.mode {
            BoundedMode::Dense(s) => s.space_bits(),
            BoundedMode::Grouped(g) => g.drank_marks.space_bits(),
        }
    }
}

impl Persist for MultisetBoundedFreq {
    const TAG: Tag = Tag::MultisetBoundedFreq;

    fn write_body(&self, w: &mut Writer) {
        w.u64(self.n as u64);
        w.u64(self.m);
        w.u64(self.delta);
        w.u64(self.ell);
        match &self.mode {
            BoundedMode::Dense(s) => s.write_body(w),
            BoundedMode::Grouped(g) => {
                g.drank_marks.write_body(w);
                if let Some(v) = &g.select_marks {
                    v.write_body(w);
                }
                if let Some(s) = &g.fallback {
                    s.write_body(w);
                }
            }
        }
    }

    fn read_body(r: &mut Reader) -> Result<Self> {
        let n = r.usize()?;
        let m = r.u64()?;
        let delta = r.u64()?;
        let ell = r.u64()?;
        if delta == 0 || ell == 0 {
            return Err(r.bad("parameters"));
        }
        let mode = if delta <= ell {
            let s = MultisetFixedM::read_body(r)?;
            if s.universe() != n || s.size() != m || s.delta() != delta {
                return Err(r.bad("thinned vector"));
            }
            BoundedMode::Dense(s)
        } else {
            let group = (delta / ell) as usize;
            let select_group = (delta / (2 * ell)) as usize;
            let drank_marks = PlainBitVector::read_body(r)?;
            if drank_marks.len() != n.div_ceil(group) {
                return Err(r.bad("group markers"));
            }
            let (select_marks, fallback) = if select_group >= 1 {
                let v = PlainBitVector::read_body(r)?;
                if v.len() != n.div_ceil(select_group) || v.count_ones() as u64 != m / delta {
                    return Err(r.bad("select markers"));
                }
                (Some(v), None)
            } else {
                let s = MultisetFixedM::read_body(r)?;
                if s.universe() != n || s.size() != m || s.delta() != delta {
                    return Err(r.bad("thinned vector"));
                }
                (None, Some(s))
            };
            BoundedMode::Grouped(GroupMarkers { group, drank_marks, select_group, select_marks, fallback })
        };
        Ok(MultisetBoundedFreq { n, m, delta, ell, mode })
    }
}
