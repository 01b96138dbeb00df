//! Brute-force reference answers and interval validators.
//!
//! Everything here is a plain scan over the source data and shares no code
//! with the indexed structures, so a bug in one cannot mask a bug in the
//! other.

use crate::error::{Error, Result};

fn not_found(rank: usize, available: usize) -> Error {
    Error::NotFound { rank: rank as u64, available: available as u64 }
}

fn out_of_range(arg: usize, hi: usize) -> Error {
    Error::Range { arg: arg as u64, lo: 0, hi: hi as u64 }
}

/// Occurrences of `b` in positions `1..=i`.
pub fn o_rank(bits: &[bool], b: bool, i: usize) -> Result<usize> {
    if i > bits.len() {
        return Err(out_of_range(i, bits.len()));
    }
    Ok(bits[..i].iter().filter(|&&x| x == b).count())
}

/// Position of the `k`-th `b`.
pub fn o_select(bits: &[bool], b: bool, k: usize) -> Result<usize> {
    let mut c = 0;
    for (p, &x) in bits.iter().enumerate() {
        if x == b {
            c += 1;
            if c == k {
                return Ok(p + 1);
            }
        }
    }
    Err(not_found(k, c))
}

/// `select` extended with `select(j) = 0` for `j ≤ 0` and `None` past the end.
pub fn o_select_ext(bits: &[bool], b: bool, k: i64) -> Option<usize> {
    if k <= 0 {
        return Some(0);
    }
    o_select(bits, b, k as usize).ok()
}

/// Sum of the first `i` values.
pub fn o_sum(values: &[u64], i: usize) -> Result<u64> {
    if i > values.len() {
        return Err(out_of_range(i, values.len()));
    }
    Ok(values[..i].iter().sum())
}

/// Smallest `i` with `sum(i) > x`.
pub fn o_search(values: &[u64], x: u64) -> Result<usize> {
    let mut s = 0;
    for (i, &v) in values.iter().enumerate() {
        s += v;
        if s > x {
            return Ok(i + 1);
        }
    }
    Err(Error::NotFound { rank: x, available: s })
}

/// Multiset rank: total frequency of elements `1..=i`.
pub fn o_ms_rank(freq: &[u64], i: i64) -> u64 {
    if i <= 0 {
        return 0;
    }
    freq[..(i as usize).min(freq.len())].iter().sum()
}

/// Multiset select: the element holding the `k`-th smallest item, `0` for `k ≤ 0`.
pub fn o_ms_select(freq: &[u64], k: i64) -> Option<u64> {
    if k <= 0 {
        return Some(0);
    }
    let mut c = 0u64;
    for (e, &f) in freq.iter().enumerate() {
        c += f;
        if c >= k as u64 {
            return Some(e as u64 + 1);
        }
    }
    None
}

/// Occurrences of symbol `j` in `seq[1..=i]`, `0` for `i ≤ 0`.
pub fn o_seq_rank(seq: &[u32], j: u32, i: i64) -> u64 {
    if i <= 0 {
        return 0;
    }
    seq[..(i as usize).min(seq.len())].iter().filter(|&&c| c == j).count() as u64
}

/// Position of the `k`-th `j`, `0` for `k ≤ 0`.
pub fn o_seq_select(seq: &[u32], j: u32, k: i64) -> Option<u64> {
    if k <= 0 {
        return Some(0);
    }
    let mut c = 0;
    for (p, &x) in seq.iter().enumerate() {
        if x == j {
            c += 1;
            if c == k {
                return Some(p as u64 + 1);
            }
        }
    }
    None
}

/// Sum of the last `i` values of the window of capacity `n`.
pub fn o_ss(hist: &[u64], n: usize, i: usize) -> Result<u64> {
    let w = hist.len().min(n);
    if i == 0 || i > w {
        return Err(Error::Range { arg: i as u64, lo: 1, hi: w as u64 });
    }
    Ok(hist[hist.len() - i..].iter().sum())
}

/// Smallest `j` with `ss(j) ≥ i`.
pub fn o_iss(hist: &[u64], n: usize, i: u64) -> Result<usize> {
    let w = hist.len().min(n);
    let mut s = 0;
    for j in 1..=w {
        s += hist[hist.len() - j];
        if s >= i {
            return Ok(j);
        }
    }
    Err(Error::NotFound { rank: i, available: s })
}

/// Full history of a stream, for checking window structures.
#[derive(Debug, Clone, Default)]
pub struct ShadowStream {
    pub n: usize,
    pub hist: Vec<u64>,
}

impl ShadowStream {
    pub fn new(n: usize) -> Self {
        ShadowStream { n, hist: Vec::new() }
    }

    pub fn push(&mut self, x: u64) {
        self.hist.push(x);
    }

    pub fn window_len(&self) -> usize {
        self.hist.len().min(self.n)
    }

    pub fn ss(&self, i: usize) -> Result<u64> {
        o_ss(&self.hist, self.n, i)
    }

    pub fn iss(&self, i: u64) -> Result<usize> {
        o_iss(&self.hist, self.n, i)
    }

    /// `iss` extended with `0` for `i ≤ 0` and `None` when unreachable.
    pub fn iss_ext(&self, i: i64) -> Option<usize> {
        if i <= 0 {
            return Some(0);
        }
        self.iss(i as u64).ok()
    }

    /// All suffix sums `ss(1..=window_len)` in one backward pass.
    pub fn suffix_sums(&self) -> Vec<u64> {
        let mut s = 0;
        self.hist.iter().rev().take(self.window_len()).map(|&x| { s += x; s }).collect()
    }
}

/// Query families whose answers are checked against an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// Value error: `exact − δ < r ≤ exact`.
    DRank,
    /// Argument error: `rank(i−δ) < r ≤ rank(i)`, exact when both are equal.
    Rank,
    /// Argument error: `select(i−δ) < p ≤ select(i)`, exact when both are equal.
    Select,
    /// Value error: `select(i) − δ < p ≤ select(i)`.
    DSelect,
    /// Same shape as `DRank`, over a sliding window.
    Ss,
    /// Same shape as `Select`, over a sliding window.
    Iss,
}

/// Oracle quantities an answer is compared with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    /// Exact answer at the query point (`DRank`, `DSelect`, `Ss`).
    Point(i64),
    /// Exact answers at `i − δ` and at `i`; `None` marks a missing upper end.
    Shifted { at_shifted: i64, at_query: Option<i64> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub ok: bool,
    pub diagnostic: String,
}

/// Check `answer` against the interval that defines `kind`.
pub fn validate_interval(kind: Kind, delta: u64, reference: Reference, answer: i64) -> Verdict {
    let d = delta as i64;
    let (ok, diagnostic) = match (kind, reference) {
        (Kind::DRank | Kind::Ss | Kind::DSelect, Reference::Point(e)) => {
            let ok = e - d < answer && answer <= e;
            (ok, format!("want {} < {answer} <= {e}", e - d))
        }
        (Kind::Rank | Kind::Select | Kind::Iss, Reference::Shifted { at_shifted, at_query }) => {
            match at_query {
                Some(hi) if hi == at_shifted => {
                    (answer == hi, format!("want {answer} == {hi} (equal endpoints)"))
                }
                Some(hi) => {
                    let ok = at_shifted < answer && answer <= hi;
                    (ok, format!("want {at_shifted} < {answer} <= {hi}"))
                }
                None => (at_shifted < answer, format!("want {at_shifted} < {answer}")),
            }
        }
        _ => (false, format!("reference {reference:?} does not fit {kind:?}")),
    };
    Verdict { ok, diagnostic }
}

/// Closed-interval relaxation `at_shifted ≤ r ≤ at_query` of the argument-error kinds.
pub fn within_closed(reference: Reference, answer: i64) -> bool {
    match reference {
        Reference::Shifted { at_shifted, at_query } => {
            at_shifted <= answer && at_query.is_none_or(|hi| answer <= hi)
        }
        Reference::Point(_) => false,
    }
}

/// Oracle reference for a bit-string query of the given kind.
pub fn bits_reference(kind: Kind, bits: &[bool], delta: u64, i: usize) -> Reference {
    let d = delta as i64;
    let ii = i as i64;
    let rank = |x: i64| o_rank(bits, true, x.max(0) as usize).unwrap() as i64;
    let sel = |x: i64| o_select_ext(bits, true, x).map(|p| p as i64);
    match kind {
        Kind::DRank | Kind::Ss => Reference::Point(rank(ii)),
        Kind::Rank => Reference::Shifted { at_shifted: rank(ii - d), at_query: Some(rank(ii)) },
        Kind::DSelect => Reference::Point(sel(ii).unwrap_or(i64::MAX)),
        Kind::Select | Kind::Iss => {
            Reference::Shifted { at_shifted: sel(ii - d).unwrap_or(i64::MAX), at_query: sel(ii) }
        }
    }
}

/// Oracle reference for a multiset query; `i` is an element for rank kinds
/// and an item rank for select kinds.
pub fn multiset_reference(kind: Kind, freq: &[u64], delta: u64, i: u64) -> Reference {
    let d = delta as i64;
    let ii = i as i64;
    let rank = |x: i64| o_ms_rank(freq, x) as i64;
    let sel = |x: i64| o_ms_select(freq, x).map(|e| e as i64);
    match kind {
        Kind::DRank | Kind::Ss => Reference::Point(rank(ii)),
        Kind::Rank => Reference::Shifted { at_shifted: rank(ii - d), at_query: Some(rank(ii)) },
        Kind::DSelect => Reference::Point(sel(ii).unwrap_or(i64::MAX)),
        Kind::Select | Kind::Iss => {
            Reference::Shifted { at_shifted: sel(ii - d).unwrap_or(i64::MAX), at_query: sel(ii) }
        }
    }
}

/// Oracle reference for a per-symbol sequence query.
pub fn sequence_reference(kind: Kind, seq: &[u32], sym: u32, delta: u64, i: u64) -> Reference {
    let d = delta as i64;
    let ii = i as i64;
    let rank = |x: i64| o_seq_rank(seq, sym, x) as i64;
    let sel = |x: i64| o_seq_select(seq, sym, x).map(|p| p as i64);
    match kind {
        Kind::DRank | Kind::Ss => Reference::Point(rank(ii)),
        Kind::Rank => Reference::Shifted { at_shifted: rank(ii - d), at_query: Some(rank(ii)) },
        Kind::DSelect => Reference::Point(sel(ii).unwrap_or(i64::MAX)),
        Kind::Select | Kind::Iss => {
            Reference::Shifted { at_shifted: sel(ii - d).unwrap_or(i64::MAX), at_query: sel(ii) }
        }
    }
}

/// Oracle reference for a sliding-window query over `shadow`.
pub fn stream_reference(kind: Kind, shadow: &ShadowStream, delta: u64, i: u64) -> Reference {
    match kind {
        Kind::Iss => Reference::Shifted {
            at_shifted: shadow.iss_ext(i as i64 - delta as i64).map_or(i64::MAX, |j| j as i64),
            at_query: shadow.iss_ext(i as i64).map(|j| j as i64),
        },
        _ => Reference::Point(shadow.ss(i as usize).map_or(i64::MIN, |s| s as i64)),
    }
}

/// Checks a half-integer sum estimate `twice / 2` against the exact sum.
///
/// Returns `(sound, in_envelope)`: `sound` is `S − δ < Ŝ ≤ S`, and
/// `in_envelope` is `−δ + 1/2 ≤ Ŝ − S ≤ −1/2`.
pub fn check_sum_estimate(exact: u64, delta: u64, twice: i128) -> (bool, bool) {
    let s2 = 2 * exact as i128;
    let d2 = 2 * delta as i128;
    let sound = s2 - d2 < twice && twice <= s2;
    let diff = twice - s2;
    let envelope = -d2 + 1 <= diff && diff <= -1;
    (sound, envelope)
}
