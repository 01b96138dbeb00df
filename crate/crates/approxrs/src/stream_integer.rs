//! Sliding-window suffix sums over streams of integers in `{0..ℓ}`.
//!
//! [`IntStreamExact`] keeps the window verbatim with a block directory.
//! [`SsaSketch`] groups the stream into chunks of ν values, folds each
//! chunk into a fixed-point remainder and forwards only how many whole
//! units of δ̃ it completed to a much smaller exact window.

use crate::broadword::bits_for;
use crate::error::{check_range, Error, Result};
use crate::window::WindowRing;

/// Exact suffix sums over the last `n` values, each at most `ℓ`.
#[derive(Debug, Clone)]
pub struct IntStreamExact {
    ell: u64,
    ring: WindowRing,
}

impl IntStreamExact {
    pub fn new(n: usize, ell: u64) -> Result<Self> {
        if n < 1 || ell < 1 {
            return Err(Error::Param("window capacity and value bound must be at least 1".into()));
        }
        Ok(IntStreamExact { ell, ring: WindowRing::new(n, bits_for(ell)) })
    }

    pub fn capacity(&self) -> usize {
        self.ring.capacity()
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn push(&mut self, x: u64) -> Result<()> {
        if x > self.ell {
            return Err(Error::Validation(format!("value {x} above the bound {}", self.ell)));
        }
        self.ring.push(x);
        Ok(())
    }

    pub fn window_len(&self) -> usize {
        self.ring.window_len()
    }

    pub fn seen(&self) -> u64 {
        self.ring.seen()
    }

    /// Sum of the last `i` values.
    pub fn ss(&self, i: usize) -> Result<u64> {
        self.ring.ss(i)
    }

    /// Smallest `j` whose last `j` values sum to at least `k`; `O(lg n)`.
    pub fn iss(&self, k: u64) -> Result<usize> {
        self.ring.iss(k)
    }

    pub(crate) fn ss_raw(&self, i: usize) -> u64 {
        self.ring.ss_raw(i)
    }

    pub(crate) fn recent(&self, back: usize) -> u64 {
        self.ring.recent(back)
    }

    /// Bits holding the values themselves: `n·⌈lg(ℓ+1)⌉`.
    pub fn payload_bits(&self) -> u64 {
        self.ring.payload_bits()
    }

    pub fn space_bits(&self) -> u64 {
        self.ring.space_bits() + 64
    }
}

/// Derived sketch parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SketchParams {
    /// Values per chunk.
    pub nu: u64,
    /// Reduced error δ̃.
    pub reduced_delta: u64,
    /// Fractional bits of the fixed-point remainder.
    pub round_bits: u32,
    /// Capacity of the chunk window.
    pub inner_capacity: usize,
    /// Largest value a chunk can forward.
    pub inner_bound: u64,
}

impl SketchParams {
    pub fn derive(n: usize, ell: u64, delta: u64) -> Self {
        let lg_n = (n as f64).log2();
        let shrink = 1.0 - 1.0 / lg_n;
        let mu = delta as f64 / ell as f64;
        let nu = ((mu * shrink).floor() as u64).max(1);
        let reduced_delta = (delta as f64 * shrink).floor() as u64;
        let round_bits = ((n as f64 / mu).log2() + lg_n.log2()).ceil().max(0.0) as u32;
        let inner_capacity = (n as u64).div_ceil(nu) as usize + 1;
        let inner_bound = if reduced_delta == 0 { 0 } else { (nu * ell).div_ceil(reduced_delta) };
        SketchParams { nu, reduced_delta, round_bits, inner_capacity, inner_bound }
    }

    /// Whether the sketch falls back to the exact window.
    pub fn is_exact(&self) -> bool {
        self.reduced_delta <= 1
    }
}

/// A sum estimate `Ŝ = twice / 2`, kept exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Estimate {
    pub twice: i128,
}

impl Estimate {
    pub fn numerator(&self) -> i128 {
        self.twice
    }

    pub fn denominator(&self) -> i128 {
        2
    }

    pub fn as_f64(&self) -> f64 {
        self.twice as f64 / 2.0
    }

    /// `⌈Ŝ⌉`. Every estimate the sketch returns satisfies `Ŝ ≤ S − 1/2`,
    /// so the result stays within `S − δ < ⌈Ŝ⌉ ≤ S`.
    pub fn ceil(&self) -> i128 {
        (self.twice + 1).div_euclid(2)
    }
}

impl std::fmt::Display for Estimate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

#[derive(Debug, Clone)]
enum SketchState {
    /// δ̃ ≤ 1: every value is kept.
    Exact(IntStreamExact),
    Chunked {
        inner: IntStreamExact,
        /// Remainder in units of `2^-b`.
        acc: u128,
        /// Values in the open chunk.
        o: u64,
    },
}

/// Additive-δ suffix sums over the last `n` values in `{0..ℓ}`.
#[derive(Debug, Clone)]
pub struct SsaSketch {
    n: usize,
    ell: u64,
    delta: u64,
    params: SketchParams,
    state: SketchState,
    seen: u64,
}

impl SsaSketch {
    pub fn new(n: usize, ell: u64, delta: u64) -> Result<Self> {
        if n < 2 || ell < 1 {
            return Err(Error::Param("sketch needs n ≥ 2 and ℓ ≥ 1".into()));
        }
        if delta < 1 || delta as u128 > ell as u128 * n as u128 {
            return Err(Error::Param(format!("delta {delta} outside 1..=ℓ·n")));
        }
        let params = SketchParams::derive(n, ell, delta);
        let state = if params.is_exact() {
            SketchState::Exact(IntStreamExact::new(n, ell)?)
        } else {
            if params.round_bits > 64 {
                return Err(Error::Param("rounding precision exceeds 64 bits".into()));
            }
            SketchState::Chunked {
                inner: IntStreamExact::new(params.inner_capacity, params.inner_bound)?,
                acc: 0,
                o: 0,
            }
        };
        Ok(SsaSketch { n, ell, delta, params, state, seen: 0 })
    }

    pub fn params(&self) -> SketchParams {
        self.params
    }

    pub fn capacity(&self) -> usize {
        self.n
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn delta(&self) -> u64 {
        self.delta
    }

    pub fn window_len(&self) -> usize {
        self.seen.min(self.n as u64) as usize
    }

    /// Values in the open chunk.
    pub fn chunk_offset(&self) -> u64 {
        match &self.state {
            SketchState::Exact(_) => 0,
            SketchState::Chunked { o, .. } => *o,
        }
    }

    /// Fixed-point remainder, in units of `2^-b`.
    pub fn remainder_fixed(&self) -> u128 {
        match &self.state {
            SketchState::Exact(_) => 0,
            SketchState::Chunked { acc, .. } => *acc,
        }
    }

    pub fn add(&mut self, x: u64) -> Result<()> {
        if x > self.ell {
            return Err(Error::Validation(format!("value {x} above the bound {}", self.ell)));
        }
        let p = self.params;
        match &mut self.state {
            SketchState::Exact(s) => s.push(x)?,
            SketchState::Chunked { inner, acc, o } => {
                let b = p.round_bits;
                let ell = self.ell as u128;
                *acc += ell * (((x as u128) << b) / ell);
                *o = (*o + 1) % p.nu;
                if *o == 0 {
                    let unit = (p.reduced_delta as u128) << b;
                    let rho = *acc / unit;
                    *acc -= rho * unit;
                    inner.push(rho as u64).expect("chunk value within bound");
                }
            }
        }
        self.seen += 1;
        Ok(())
    }

    /// An estimate `Ŝ` of the sum of the last `i` values with
    /// `S − δ + 1/2 ≤ Ŝ ≤ S − 1/2`.
    pub fn query(&self, i: usize) -> Result<Estimate> {
        check_range(i as u64, 1, self.window_len() as u64)?;
        let twice = match &self.state {
            SketchState::Exact(s) => 2 * s.ss_raw(i) as i128 - 1,
            SketchState::Chunked { inner, acc, o } => {
                let p = self.params;
                let fl = (*acc >> p.round_bits) as i128;
                let dt = p.reduced_delta as i128;
                let ell = self.ell as i128;
                let (i, o, nu) = (i as u64, *o, p.nu);
                if i <= o {
                    (2 * (fl - dt - ell * (o - i) as i128) + 1).max(-1)
                } else {
                    let chunks = (i - o).div_ceil(nu) as usize;
                    let total = inner.ss_raw(chunks) as i128;
                    let oldest = inner.recent(chunks - 1) as i128;
                    // values of the oldest chunk that fall outside the window
                    let out = ((nu - (i - o) % nu) % nu) as i128;
                    2 * (fl - dt + dt * total - ell * oldest * out) + 1
                }
            }
        };
        Ok(Estimate { twice })
    }

    /// A distance `r` with `iss(k − δ) ≤ r ≤ iss(k)`, strictly above
    /// `iss(k − δ)` when `ℓ = 1`.
    ///
    /// Binary search for a point where the estimate crosses `k − δ`, so
    /// `O(lg n)` queries.
    pub fn iss_a(&self, k: u64) -> Result<usize> {
        let w = self.window_len();
        let threshold = 2 * (k as i128 - self.delta as i128);
        let over = |i: usize| self.query(i).map(|e| e.twice > threshold);
        if k == 0 || w == 0 || !over(w)? {
            return Err(Error::NotFound { rank: k, available: 0 });
        }
        let (mut lo, mut hi) = (0usize, w);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if over(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    pub fn space_bits(&self) -> u64 {
        let body = match &self.state {
            SketchState::Exact(s) => s.space_bits(),
            SketchState::Chunked { inner, .. } => inner.space_bits() + 2 * 64,
        };
        body + 9 * 64
    }
}
