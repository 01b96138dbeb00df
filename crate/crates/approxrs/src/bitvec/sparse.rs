use crate::bitvec::{PlainBitVector, RankSelect};
use crate::codec::{Persist, Reader, Tag, Writer};
use crate::error::{check_range, Error, Result};
use crate::packed::PackedInts;

/// Sparse bit-vector storing the positions of its ones in Elias–Fano form.
///
/// Each 0-based position is split into `l` low bits, stored verbatim, and
/// a high part written in unary into a [`PlainBitVector`]. `select1` is a
/// single select on the high bits; `rank1` and `select0` search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseBitVector {
    n: usize,
    m: usize,
    l: u32,
    lows: Option<PackedInts>,
    upper: PlainBitVector,
}

impl SparseBitVector {
    /// Build from strictly increasing 1-based positions in `1..=n`.
    pub fn new(n: usize, ones: &[usize]) -> Result<Self> {
        for (k, &p) in ones.iter().enumerate() {
            if p == 0 || p > n {
                return Err(Error::Validation(format!("position {p} outside 1..={n}")));
            }
            if k > 0 && ones[k - 1] >= p {
                return Err(Error::Validation(format!(
                    "positions not strictly increasing at index {k}"
                )));
            }
        }
        Ok(Self::build_unchecked(n, ones.iter().map(|&p| p - 1), ones.len()))
    }

    /// Build from a dense bit sequence.
    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut n = 0;
        let mut ones = Vec::new();
        for b in bits {
            if b {
                ones.push(n);
            }
            n += 1;
        }
        let m = ones.len();
        Self::build_unchecked(n, ones.into_iter(), m)
    }

    fn build_unchecked<I: Iterator<Item = usize>>(n: usize, zero_based: I, m: usize) -> Self {
        let l = if m == 0 || n <= m { 0 } else { (n / m).ilog2() };
        let mut lows = (l > 0).then(|| PackedInts::new(m, l));
        let upper_len = m + (n >> l) + 1;
        let mut upper = vec![0u64; upper_len.div_ceil(64)];
        for (k, v) in zero_based.enumerate() {
            if let Some(lw) = lows.as_mut() {
                lw.set(k, (v & ((1 << l) - 1)) as u64);
            }
            let u = (v >> l) + k;
            upper[u / 64] |= 1 << (u % 64);
        }
        let upper = PlainBitVector::from_words(upper, upper_len);
        SparseBitVector { n, m, l, lows, upper }
    }

    #[inline]
    fn low(&self, k: usize) -> usize {
        self.lows.as_ref().map_or(0, |lw| lw.get(k) as usize)
    }

    /// 0-based value of the `k`-th one, `k` counted from 0.
    #[inline]
    fn value(&self, k: usize) -> usize {
        let u = self.upper.select1(k + 1).expect("k < m") - 1;
        ((u - k) << self.l) | self.low(k)
    }

    /// Number of stored values strictly below `x`, for `x < n`.
    fn count_below(&self, x: usize) -> usize {
        let h = x >> self.l;
        let (mut idx, mut upos) = if h == 0 {
            (0, 0)
        } else {
            let p = self.upper.select0(h).expect("bucket exists");
            (p - h, p)
        };
        let xl = x & ((1 << self.l) - 1);
        while upos < self.upper.len() && self.upper.get(upos + 1).unwrap() {
            if self.low(idx) >= xl {
                break;
            }
            idx += 1;
            upos += 1;
        }
        idx
    }
}

impl RankSelect for SparseBitVector {
    fn len(&self) -> usize {
        self.n
    }

    fn count_ones(&self) -> usize {
        self.m
    }

    fn get(&self, i: usize) -> Result<bool> {
        check_range(i as u64, 1, self.n as u64)?;
        Ok(self.rank1(i)? > self.rank1(i - 1)?)
    }

    fn rank1(&self, i: usize) -> Result<usize> {
        check_range(i as u64, 0, self.n as u64)?;
        if i == self.n {
            return Ok(self.m);
        }
        Ok(self.count_below(i))
    }

    fn select1(&self, k: usize) -> Result<usize> {
        if k == 0 || k > self.m {
            return Err(Error::NotFound { rank: k as u64, available: self.m as u64 });
        }
        Ok(self.value(k - 1) + 1)
    }

    fn select0(&self, k: usize) -> Result<usize> {
        let zeros = self.n - self.m;
        if k == 0 || k > zeros {
            return Err(Error::NotFound { rank: k as u64, available: zeros as u64 });
        }
        // largest j such that fewer than k zeros precede the j-th one
        let (mut lo, mut hi) = (0usize, self.m);
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if self.value(mid - 1) + 1 - mid < k {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        Ok(k + lo)
    }

    fn space_bits(&self) -> u64 {
        self.lows.as_ref().map_or(0, |lw| lw.space_bits()) + self.upper.space_bits() + 3 * 64
    }
}

impl Persist for SparseBitVector {
    const TAG: Tag = Tag::SparseBitVector;

    fn write_body(&self, w: &mut Writer) {
        w.u64(self.n as u64);
        w.u64(self.m as u64);
        w.u32(self.l);
        if let Some(lw) = &self.lows {
            lw.write(w);
        }
        self.upper.write_body(w);
    }

    fn read_body(r: &mut Reader) -> Result<Self> {
        let n = r.usize()?;
        let m = r.usize()?;
        let l = r.u32()?;
        let want_l = if m == 0 || n <= m { 0 } else { (n / m).ilog2() };
        if l != want_l {
            return Err(r.bad("low-bit width"));
        }
        let lows = if l > 0 { Some(PackedInts::read(r)?) } else { None };
        if lows.as_ref().is_some_and(|lw| lw.len() != m || lw.width() != l) {
            return Err(r.bad("low bits"));
        }
        let upper = PlainBitVector::read_body(r)?;
        if upper.len() != m + (n >> l) + 1 || upper.count_ones() != m {
            return Err(r.bad("high bits"));
        }
        let v = SparseBitVector { n, m, l, lows, upper };
        if m > 0 && v.value(m - 1) >= n {
            return Err(Error::Format("position beyond length".into()));
        }
        Ok(v)
    }
}
