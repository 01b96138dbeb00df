//! Ring of the last `n` values of a stream with suffix sums in constant time.
//!
//! Slots are filled left to right in frames of `n`. With `t` slots of the
//! current frame filled, slots `[0, t)` hold the newest values and
//! `[t, n)` still hold the tail of the previous frame. Each frame rewrites
//! the directory entries of a sub-block or superblock only once it has
//! filled it, so entries past `t` keep describing the previous frame.

use crate::broadword::{bits_for, low_mask};
use crate::error::{check_range, Error, Result};
use crate::packed::PackedInts;

const SUBS_PER_SUPER: usize = 16;

#[derive(Debug, Clone)]
pub(crate) struct WindowRing {
    n: usize,
    vals: PackedInts,
    sub: usize,
    sup: usize,
    /// Frame-relative sum through the end of each superblock.
    cum: Vec<u64>,
    /// Sum from the superblock start through the end of each sub-block.
    rel: PackedInts,
    /// Sum of the current frame.
    c: u64,
    /// Sum of the current frame since the last superblock boundary.
    acc: u64,
    t: usize,
    prev_total: u64,
    seen: u64,
}

impl WindowRing {
    pub(crate) fn new(n: usize, width: u32) -> Self {
        let sub = 128usize.div_ceil(width as usize).next_power_of_two();
        let sup = sub * SUBS_PER_SUPER;
        let rel_width = bits_for((sup as u128 * low_mask(width) as u128).min(u64::MAX as u128) as u64);
        WindowRing {
            n,
            vals: PackedInts::new(n, width),
            sub,
            sup,
            cum: vec![0; n.div_ceil(sup)],
            rel: PackedInts::new(n.div_ceil(sub), rel_width),
            c: 0,
            acc: 0,
            t: 0,
            prev_total: 0,
            seen: 0,
        }
    }

    pub(crate) fn capacity(&self) -> usize {
        self.n
    }

    pub(crate) fn seen(&self) -> u64 {
        self.seen
    }

    pub(crate) fn frame_offset(&self) -> usize {
        self.t
    }

    pub(crate) fn frame_sum(&self) -> u64 {
        self.c
    }

    pub(crate) fn window_len(&self) -> usize {
        self.seen.min(self.n as u64) as usize
    }

    /// The value pushed `back` steps ago, `back = 0` being the newest.
    pub(crate) fn recent(&self, back: usize) -> u64 {
        debug_assert!(back < self.window_len());
        self.vals.get((self.t + self.n - 1 - back) % self.n)
    }

    /// Append `x`, which must fit the slot width.
    pub(crate) fn push(&mut self, x: u64) {
        let t = self.t;
        self.vals.set(t, x);
        self.c += x;
        self.acc += x;
        self.t += 1;
        self.seen += 1;
        let end = self.t == self.n;
        if self.t % self.sub == 0 || end {
            self.rel.set(t / self.sub, self.acc);
        }
        if self.t % self.sup == 0 || end {
            self.cum[t / self.sup] = self.c;
            self.acc = 0;
        }
        if end {
            self.prev_total = self.c;
            self.c = 0;
            self.t = 0;
        }
    }

    /// Sum of slots `[0, p)` of the current frame, `p ≤ t`.
    fn prefix_cur(&self, p: usize) -> u64 {
        let j = p / self.sub;
        let s = p / self.sup;
        let mut sum = if s > 0 { self.cum[s - 1] } else { 0 };
        if j > s * SUBS_PER_SUPER {
            sum += self.rel.get(j - 1);
        }
        sum + self.vals.sum_range(j * self.sub, p)
    }

    /// Sum of slots `[p, n)` of the previous frame, `p ≥ t`.
    fn suffix_prev(&self, p: usize) -> u64 {
        if p == self.n {
            return 0;
        }
        let j = p / self.sub;
        let s = p / self.sup;
        let sub_end = ((j + 1) * self.sub).min(self.n);
        let last = ((s + 1) * SUBS_PER_SUPER).min(self.rel.len()) - 1;
        self.vals.sum_range(p, sub_end) + (self.rel.get(last) - self.rel.get(j))
            + (self.prev_total - self.cum[s])
    }

    /// Sum of the last `i` values, `0 ≤ i ≤ window_len`.
    pub(crate) fn ss_raw(&self, i: usize) -> u64 {
        debug_assert!(i <= self.window_len());
        if i <= self.t {
            self.c - self.prefix_cur(self.t - i)
        } else {
            self.c + self.suffix_prev(self.n - (i - self.t))
        }
    }

    /// Sum of the last `i` values, `1 ≤ i ≤ window_len`.
    pub(crate) fn ss(&self, i: usize) -> Result<u64> {
        check_range(i as u64, 1, self.window_len() as u64)?;
        Ok(self.ss_raw(i))
    }

    /// Smallest `j` with `ss(j) ≥ k`, by binary search over suffix sums.
    pub(crate) fn iss(&self, k: u64) -> Result<usize> {
        let w = self.window_len();
        let total = self.ss_raw(w);
        if k == 0 || k > total {
            return Err(Error::NotFound { rank: k, available: total });
        }
        let (mut lo, mut hi) = (1usize, w);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.ss_raw(mid) >= k {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Ok(lo)
    }

    pub(crate) fn space_bits(&self) -> u64 {
        self.vals.space_bits() + self.rel.space_bits() + self.cum.len() as u64 * 64 + 8 * 64
    }

    pub(crate) fn payload_bits(&self) -> u64 {
        self.n as u64 * self.vals.width() as u64
    }

    /// Recompute the directory entries the current frame has completed
    /// from the slots alone and compare.
    #[cfg(test)]
    pub(crate) fn directory_consistent(&self) -> bool {
        let mut c = 0u64;
        let mut acc = 0u64;
        for p in 0..self.t {
            let x = self.vals.get(p);
            c += x;
            acc += x;
            if (p + 1) % self.sub == 0 && self.rel.get(p / self.sub) != acc {
                return false;
            }
            if (p + 1) % self.sup == 0 {
                if self.cum[p / self.sup] != c {
                    return false;
                }
                acc = 0;
            }
        }
        c == self.c && acc == self.acc
    }
}
