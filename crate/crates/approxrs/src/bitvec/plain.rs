use crate::bitvec::RankSelect;
use crate::broadword::{low_mask, select_in_word};
use crate::codec::{Persist, Reader, Tag, Writer};
use crate::error::{check_range, Error, Result};

const WORDS_PER_BLOCK: usize = 8;
const BLOCK_BITS: usize = 64 * WORDS_PER_BLOCK;
const BLOCKS_PER_SUPER: usize = 8;
const SUPER_BITS: usize = BLOCK_BITS * BLOCKS_PER_SUPER;
const SAMPLE_RATE: usize = 8192;

/// Plain bit-vector with constant-time rank and sampled select.
///
/// Superblocks of 4096 bits hold absolute counts, 512-bit blocks hold
/// 16-bit counts relative to their superblock, and the tail is counted
/// with popcount. Every 8192-nd one and zero has its position sampled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlainBitVector {
    n: usize,
    words: Vec<u64>,
    supers: Vec<u64>,
    blocks: Vec<u16>,
    ones: usize,
    sel1: Vec<u64>,
    sel0: Vec<u64>,
}

impl PlainBitVector {
    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut n = 0usize;
        for b in bits {
            if n % 64 == 0 {
                words.push(0);
            }
            if b {
                *words.last_mut().unwrap() |= 1 << (n % 64);
            }
            n += 1;
        }
        Self::from_words(words, n)
    }

    /// Build from packed little-endian words; bits past `n` are cleared.
    pub fn from_words(mut words: Vec<u64>, n: usize) -> Self {
        words.resize(n.div_ceil(64), 0);
        if n % 64 != 0 {
            *words.last_mut().unwrap() &= low_mask((n % 64) as u32);
        }
        let nblocks = n.div_ceil(BLOCK_BITS);
        let nsupers = n.div_ceil(SUPER_BITS);
        let mut supers = Vec::with_capacity(nsupers + 1);
        let mut blocks = Vec::with_capacity(nblocks);
        let mut total = 0u64;
        let mut in_super = 0u64;
        for b in 0..nblocks {
            if b % BLOCKS_PER_SUPER == 0 {
                supers.push(total);
                in_super = 0;
            }
            blocks.push(in_super as u16);
            let lo = b * WORDS_PER_BLOCK;
            let hi = (lo + WORDS_PER_BLOCK).min(words.len());
            let c: u64 = words[lo..hi].iter().map(|w| w.count_ones() as u64).sum();
            total += c;
            in_super += c;
        }
        supers.push(total);

        let mut sel1 = Vec::new();
        let mut sel0 = Vec::new();
        let (mut c1, mut c0) = (0usize, 0usize);
        for (q, &w) in words.iter().enumerate() {
            let valid = (n - q * 64).min(64) as u32;
            let k1 = w.count_ones() as usize;
            let k0 = valid as usize - k1;
            // next sample index that falls inside this word, if any
            let next1 = c1.div_ceil(SAMPLE_RATE) * SAMPLE_RATE;
            if next1 < c1 + k1 {
                sel1.push((q * 64) as u64 + select_in_word(w, (next1 - c1) as u32) as u64);
            }
            let next0 = c0.div_ceil(SAMPLE_RATE) * SAMPLE_RATE;
            if next0 < c0 + k0 {
                let inv = !w & low_mask(valid);
                sel0.push((q * 64) as u64 + select_in_word(inv, (next0 - c0) as u32) as u64);
            }
            c1 += k1;
            c0 += k0;
        }
        PlainBitVector { n, words, supers, blocks, ones: total as usize, sel1, sel0 }
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    fn bit(&self, p: usize) -> bool {
        self.words[p / 64] >> (p % 64) & 1 == 1
    }

    /// Ones in bit positions `[0, i)`; `i ≤ n`.
    #[inline]
    fn rank1_raw(&self, i: usize) -> usize {
        if i == self.n {
            return self.ones;
        }
        let b = i / BLOCK_BITS;
        let mut r = self.supers[i / SUPER_BITS] + self.blocks[b] as u64;
        let q = i / 64;
        for w in &self.words[b * WORDS_PER_BLOCK..q] {
            r += w.count_ones() as u64;
        }
        r += (self.words[q] & low_mask((i % 64) as u32)).count_ones() as u64;
        r as usize
    }

    /// 0-based position of the one with `target` ones before it.
    fn select1_raw(&self, target: usize) -> usize {
        let s = target / SAMPLE_RATE;
        let lo = self.sel1[s] as usize / SUPER_BITS;
        let hi = match self.sel1.get(s + 1) {
            Some(&p) => p as usize / SUPER_BITS,
            None => self.supers.len() - 2,
        };
        let sb = lo + self.supers[lo..=hi].partition_point(|&c| c as usize <= target) - 1;
        let mut rem = target - self.supers[sb] as usize;
        let first = sb * BLOCKS_PER_SUPER;
        let last = (first + BLOCKS_PER_SUPER).min(self.blocks.len());
        let b = first + self.blocks[first..last].partition_point(|&c| c as usize <= rem) - 1;
        rem -= self.blocks[b] as usize;
        let mut q = b * WORDS_PER_BLOCK;
        loop {
            let c = self.words[q].count_ones() as usize;
            if rem < c {
                return q * 64 + select_in_word(self.words[q], rem as u32) as usize;
            }
            rem -= c;
            q += 1;
        }
    }

    fn select0_raw(&self, target: usize) -> usize {
        let s = target / SAMPLE_RATE;
        let lo = self.sel0[s] as usize / SUPER_BITS;
        let hi = match self.sel0.get(s + 1) {
            Some(&p) => p as usize / SUPER_BITS,
            None => self.supers.len() - 2,
        };
        let zeros_before = |sb: usize| sb * SUPER_BITS - self.supers[sb] as usize;
        let mut a = lo;
        let mut z = hi + 1;
        // last superblock in [lo, hi] whose preceding zeros are <= target
        while z - a > 1 {
            let mid = (a + z) / 2;
            if zeros_before(mid) <= target {
                a = mid;
            } else {
                z = mid;
            }
        }
        let sb = a;
        let mut rem = target - zeros_before(sb);
        let first = sb * BLOCKS_PER_SUPER;
        let last = (first + BLOCKS_PER_SUPER).min(self.blocks.len());
        let mut b = first;
        for c in first + 1..last {
            if (c - first) * BLOCK_BITS - self.blocks[c] as usize <= rem {
                b = c;
            } else {
                break;
            }
        }
        rem -= (b - first) * BLOCK_BITS - self.blocks[b] as usize;
        let mut q = b * WORDS_PER_BLOCK;
        loop {
            let inv = !self.words[q];
            let c = inv.count_ones() as usize;
            if rem < c {
                return q * 64 + select_in_word(inv, rem as u32) as usize;
            }
            rem -= c;
            q += 1;
        }
    }
}

impl RankSelect for PlainBitVector {
    fn len(&self) -> usize {
        self.n
    }

    fn count_ones(&self) -> usize {
        self.ones
    }

    fn get(&self, i: usize) -> Result<bool> {
        check_range(i as u64, 1, self.n as u64)?;
        Ok(self.bit(i - 1))
    }

    fn rank1(&self, i: usize) -> Result<usize> {
        check_range(i as u64, 0, self.n as u64)?;
        Ok(self.rank1_raw(i))
    }

    fn select1(&self, k: usize) -> Result<usize> {
        if k == 0 || k > self.ones {
            return Err(Error::NotFound { rank: k as u64, available: self.ones as u64 });
        }
        Ok(self.select1_raw(k - 1) + 1)
    }

    fn select0(&self, k: usize) -> Result<usize> {
        let zeros = self.n - self.ones;
        if k == 0 || k > zeros {
            return Err(Error::NotFound { rank: k as u64, available: zeros as u64 });
        }
        Ok(self.select0_raw(k - 1) + 1)
    }

    fn space_bits(&self) -> u64 {
        let words = self.words.len() + self.supers.len() + self.sel1.len() + self.sel0.len();
        words as u64 * 64 + self.blocks.len() as u64 * 16 + 3 * 64
    }
}

impl Persist for PlainBitVector {
    const TAG: Tag = Tag::PlainBitVector;

    fn write_body(&self, w: &mut Writer) {
        w.u64(self.n as u64);
        w.words(&self.words);
    }

    fn read_body(r: &mut Reader) -> Result<Self> {
        let n = r.usize()?;
        let words = r.words()?;
        if words.len() != n.div_ceil(64) {
            return Err(r.bad("bit-vector length"));
        }
        if n % 64 != 0 && words[words.len() - 1] & !low_mask((n % 64) as u32) != 0 {
            return Err(r.bad("padding bits"));
        }
        Ok(Self::from_words(words, n))
    }
}
