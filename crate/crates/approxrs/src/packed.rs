//! Fixed-width integer array packed into 64-bit words.

use crate::broadword::low_mask;
use crate::codec::{Reader, Writer};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackedInts {
    len: usize,
    width: u32,
    words: Vec<u64>,
}

impl PackedInts {
    pub fn new(len: usize, width: u32) -> Self {
        assert!((1..=64).contains(&width), "width must be 1..=64");
        let bits = len as u128 * width as u128;
        let nwords = bits.div_ceil(64) as usize;
        PackedInts { len, width, words: vec![0; nwords] }
    }

    pub fn from_slice(values: &[u64], width: u32) -> Self {
        let mut p = Self::new(values.len(), width);
        for (i, &v) in values.iter().enumerate() {
            p.set(i, v);
        }
        p
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.width
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        debug_assert!(i < self.len);
        let w = self.width as usize;
        let bit = i * w;
        let (q, r) = (bit / 64, bit % 64);
        let mut v = self.words[q] >> r;
        if r + w > 64 {
            v |= self.words[q + 1] << (64 - r);
        }
        v & low_mask(self.width)
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: u64) {
        debug_assert!(i < self.len);
        debug_assert!(v <= low_mask(self.width));
        let w = self.width as usize;
        let bit = i * w;
        let (q, r) = (bit / 64, bit % 64);
        let mask = low_mask(self.width);
        self.words[q] = (self.words[q] & !(mask << r)) | (v << r);
        if r + w > 64 {
            let hi = r + w - 64;
            let m2 = low_mask(hi as u32);
            self.words[q + 1] = (self.words[q + 1] & !m2) | (v >> (64 - r));
        }
    }

    /// Sum of entries in `[a, b)`.
    pub fn sum_range(&self, a: usize, b: usize) -> u64 {
        debug_assert!(a <= b && b <= self.len);
        if self.width == 1 {
            return popcount_range(&self.words, a, b);
        }
        let w = self.width as usize;
        if w > 8 || b - a < 8 {
            return (a..b).map(|i| self.get(i)).sum();
        }
        // whole words of fields at a time: bit j of every field, weighted 2^j
        let per = 64 / w;
        let mut sum = 0;
        let mut i = a;
        while i < b {
            let k = per.min(b - i);
            let x = bits_at(&self.words, i * w) & low_mask((k * w) as u32);
            for j in 0..w {
                sum += ((x & (FIELD_LOW[w] << j)).count_ones() as u64) << j;
            }
            i += k;
        }
        sum
    }

    pub fn space_bits(&self) -> u64 {
        self.words.len() as u64 * 64 + 2 * 64
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        w.u64(self.len as u64);
        w.u32(self.width);
        w.words(&self.words);
    }

    pub(crate) fn read(r: &mut Reader) -> Result<Self> {
        let len = r.usize()?;
        let width = r.u32()?;
        if !(1..=64).contains(&width) {
            return Err(r.bad("packed width"));
        }
        let words = r.words()?;
        if words.len() as u128 != (len as u128 * width as u128).div_ceil(64) {
            return Err(r.bad("packed length"));
        }
        Ok(PackedInts { len, width, words })
    }
}

/// Bit 0 of each whole `w`-bit field in a word, for `w ≤ 8`.
const FIELD_LOW: [u64; 9] = {
    let mut t = [0u64; 9];
    let mut w = 1;
    while w <= 8 {
        let mut k = 0;
        while (k + 1) * w <= 64 {
            t[w] |= 1 << (k * w);
            k += 1;
        }
        w += 1;
    }
    t
};

/// The 64 bits starting at bit `p`, zero past the end.
#[inline]
fn bits_at(words: &[u64], p: usize) -> u64 {
    let (q, r) = (p / 64, p % 64);
    let lo = words[q] >> r;
    if r == 0 || q + 1 >= words.len() {
        lo
    } else {
        lo | words[q + 1] << (64 - r)
    }
}

/// Number of set bits among bit positions `[a, b)` of `words`.
#[inline]
pub fn popcount_range(words: &[u64], a: usize, b: usize) -> u64 {
    if a >= b {
        return 0;
    }
    let (qa, ra) = (a / 64, a % 64);
    let (qb, rb) = (b / 64, b % 64);
    if qa == qb {
        return ((words[qa] >> ra) & low_mask((rb - ra) as u32)).count_ones() as u64;
    }
    let mut c = (words[qa] >> ra).count_ones() as u64;
    for w in &words[qa + 1..qb] {
        c += w.count_ones() as u64;
    }
    if rb > 0 {
        c += (words[qb] & low_mask(rb as u32)).count_ones() as u64;
    }
    c
}
