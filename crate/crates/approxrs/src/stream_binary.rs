//! Sliding-window suffix sums over a stream of bits.
//!
//! Until `n` bits have arrived the window is the whole history, and a
//! query longer than the history is a range error.

use crate::error::{check_range, Error, Result};
use crate::window::WindowRing;

fn check_capacity(n: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::Param("window capacity must be at least 1".into()));
    }
    Ok(())
}

/// Exact `ss`/`iss` over the last `n` bits.
#[derive(Debug, Clone)]
pub struct BinaryStreamExact {
    ring: WindowRing,
}

impl BinaryStreamExact {
    pub fn new(n: usize) -> Result<Self> {
        check_capacity(n)?;
        Ok(BinaryStreamExact { ring: WindowRing::new(n, 1) })
    }

    pub fn capacity(&self) -> usize {
        self.ring.capacity()
    }

    pub fn push(&mut self, bit: bool) {
        self.ring.push(bit as u64);
    }

    /// Bits currently in the window.
    pub fn window_len(&self) -> usize {
        self.ring.window_len()
    }

    pub fn seen(&self) -> u64 {
        self.ring.seen()
    }

    /// Ones pushed since the current frame started.
    pub fn frame_ones(&self) -> u64 {
        self.ring.frame_sum()
    }

    /// Slots of the current frame filled so far.
    pub fn frame_offset(&self) -> usize {
        self.ring.frame_offset()
    }

    /// Ones among the last `i` bits.
    pub fn ss(&self, i: usize) -> Result<u64> {
        self.ring.ss(i)
    }

    /// Smallest `j` such that the last `j` bits hold at least `i` ones.
    ///
    /// Binary search over `ss`, so `O(lg n)`.
    pub fn iss(&self, i: u64) -> Result<usize> {
        self.ring.iss(i)
    }

    pub(crate) fn ss_raw(&self, i: usize) -> u64 {
        self.ring.ss_raw(i)
    }

    /// The bit pushed `back` steps ago.
    pub(crate) fn recent(&self, back: usize) -> bool {
        self.ring.recent(back) == 1
    }

    pub fn space_bits(&self) -> u64 {
        self.ring.space_bits()
    }

    #[cfg(test)]
    fn directory_consistent(&self) -> bool {
        self.ring.directory_consistent()
    }
}

/// Additive-δ `ss`/`iss` over the last `n` bits in about `n/δ` bits.
///
/// The stream is cut into chunks of δ bits. A chunk emits a virtual 1 when
/// the running count of ones crosses a multiple of δ inside it, and the
/// virtual bits go to an exact window of `⌈n/δ⌉` chunks. Besides that only
/// the open chunk's counters and the running count modulo δ are kept.
#[derive(Debug, Clone)]
pub struct BinaryStreamApprox {
    n: usize,
    delta: u64,
    inner: BinaryStreamExact,
    /// Running count of ones modulo δ at the last chunk end.
    carry: u64,
    /// Ones and bits in the open chunk.
    tc: u64,
    tm: u64,
    seen: u64,
}

impl BinaryStreamApprox {
    pub fn new(n: usize, delta: u64) -> Result<Self> {
        check_capacity(n)?;
        if delta < 1 || delta > n as u64 {
            return Err(Error::Param(format!("delta {delta} outside 1..={n}")));
        }
        let inner = BinaryStreamExact::new(n.div_ceil(delta as usize))?;
        Ok(BinaryStreamApprox { n, delta, inner, carry: 0, tc: 0, tm: 0, seen: 0 })
    }

    pub fn capacity(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> u64 {
        self.delta
    }

    pub fn inner(&self) -> &BinaryStreamExact {
        &self.inner
    }

    pub fn window_len(&self) -> usize {
        self.seen.min(self.n as u64) as usize
    }

    /// Ones in the open chunk.
    pub fn chunk_ones(&self) -> u64 {
        self.tc
    }

    pub fn push(&mut self, bit: bool) {
        self.seen += 1;
        self.tm += 1;
        self.tc += bit as u64;
        if self.tm == self.delta {
            let crossed = self.carry + self.tc >= self.delta;
            self.carry = (self.carry + self.tc) % self.delta;
            self.inner.push(crossed);
            self.tc = 0;
            self.tm = 0;
        }
    }

    /// A value `r` with `ss(i) − δ < r ≤ ss(i)`.
    pub fn ss_a(&self, i: usize) -> Result<u64> {
        check_range(i as u64, 1, self.window_len() as u64)?;
        let i = i as u64;
        if i <= self.tm {
            return Ok(self.tc.saturating_sub(self.tm - i));
        }
        let d = self.delta;
        let q = ((i - self.tm) / d) as usize;
        let rem = (i - self.tm) % d;
        // the chunk cut by the window edge counts rem bits if it crossed
        let edge = if rem > 0 && self.inner.recent(q) { rem } else { 0 };
        let est = self.tc + d * self.inner.ss_raw(q) + edge + self.carry;
        Ok(est.saturating_sub(d - 1))
    }

    /// A distance `r` with `iss(i − δ) < r ≤ iss(i)`, where `iss(k) = 0`
    /// for `k ≤ 0`.
    ///
    /// Not-found is reported when the chunk window provably lacks `i`
    /// ones; a request at most δ above the true count may still get an
    /// answer, which then satisfies only the lower end.
    pub fn iss_a(&self, i: u64) -> Result<usize> {
        if i == 0 {
            return Err(Error::NotFound { rank: 0, available: 0 });
        }
        if i <= self.tc {
            return Ok(i as usize);
        }
        let d = self.delta as i64;
        let ip = (i - self.tc) as i64;
        let chunks = -1 - (self.carry as i64 + 1 - ip).div_euclid(d);
        let r = if chunks < 0 {
            self.tm + 1
        } else {
            let q = self.inner.iss(chunks as u64 + 1).map_err(|_| Error::NotFound {
                rank: i,
                available: self.inner.ss_raw(self.inner.window_len()) * self.delta + self.tc,
            })?;
            let back = (self.carry as i64 - ip + 1).rem_euclid(d) as u64;
            self.tm + q as u64 * self.delta + 1 - back
        };
        if r > self.window_len() as u64 {
            return Err(Error::NotFound { rank: i, available: self.tc });
        }
        Ok(r as usize)
    }

    pub fn space_bits(&self) -> u64 {
        self.inner.space_bits() + 6 * 64
    }
}
