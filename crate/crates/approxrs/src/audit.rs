//! Measured space against closed-form size bounds.
//!
//! `upper` is the leading term the structure is designed to approach and
//! `lower` an information-theoretic floor where one is known. Lower bounds
//! are reported, never asserted: several structures here use substituted
//! representations for which the floor does not strictly apply.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StructureKind {
    Plain,
    Sparse,
    DRankSelect,
    RankDSelect,
    Multiset,
    MultisetRd,
    MultisetBounded,
    Sequence,
    BinaryStream,
    BinaryStreamExact,
    IntStream,
    Sketch,
}

impl StructureKind {
    pub const ALL: [StructureKind; 12] = [
        StructureKind::Plain,
        StructureKind::Sparse,
        StructureKind::DRankSelect,
        StructureKind::RankDSelect,
        StructureKind::Multiset,
        StructureKind::MultisetRd,
        StructureKind::MultisetBounded,
        StructureKind::Sequence,
        StructureKind::BinaryStream,
        StructureKind::BinaryStreamExact,
        StructureKind::IntStream,
        StructureKind::Sketch,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            StructureKind::Plain => "plain",
            StructureKind::Sparse => "sparse",
            StructureKind::DRankSelect => "drank-select",
            StructureKind::RankDSelect => "rank-dselect",
            StructureKind::Multiset => "multiset",
            StructureKind::MultisetRd => "multiset-rd",
            StructureKind::MultisetBounded => "multiset-bounded",
            StructureKind::Sequence => "sequence",
            StructureKind::BinaryStream => "binary-stream",
            StructureKind::BinaryStreamExact => "binary-stream-exact",
            StructureKind::IntStream => "int-stream",
            StructureKind::Sketch => "sketch",
        }
    }
}

impl fmt::Display for StructureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StructureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        StructureKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Param(format!("unknown kind {s:?}")))
    }
}

/// Size parameters of an audited structure; unused ones stay zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AuditParams {
    pub n: u64,
    /// Ones of a bit-string or items of a multiset.
    pub m: u64,
    pub delta: u64,
    pub ell: u64,
    pub sigma: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceAuditReport {
    pub kind: StructureKind,
    pub params: AuditParams,
    pub measured_bits: Option<u64>,
    pub upper_formula_bits: f64,
    pub lower_formula_bits: Option<f64>,
    pub upper_ratio: Option<f64>,
    pub lower_ratio: Option<f64>,
    /// The representation differs from the one the bounds were derived
    /// for, so `measured < lower` is possible and not an error.
    pub substituted: bool,
}

fn lg(x: f64) -> f64 {
    x.log2()
}

fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b.max(1))
}

/// `⌊n/δ⌋`: floor for answering drankA.
pub fn drank_lower(n: u64, delta: u64) -> f64 {
    (n / delta.max(1)) as f64
}

/// `⌊n/2δ⌋·lg δ`: floor for answering rankA.
pub fn rank_lower(n: u64, delta: u64) -> f64 {
    (n / (2 * delta.max(1))) as f64 * lg(delta.max(1) as f64)
}

/// `⌊n/⌈δ/ℓ⌉⌋·lg(max(⌊ℓ/δ⌋, 1) + 1)`: floor for bounded-frequency drankA.
pub fn bounded_lower(n: u64, delta: u64, ell: u64) -> f64 {
    let d = delta.max(1);
    (n / ceil_div(d, ell)) as f64 * lg(((ell / d).max(1) + 1) as f64)
}

/// `⌊n/max(⌊µ⌋,1)⌋·lg(⌈µ⁻¹⌉+1) + 64⌈lg n⌉` with `µ = δ/ℓ`, the sketch target
/// with its logarithmic term made explicit.
pub fn sketch_formula(n: u64, delta: u64, ell: u64) -> f64 {
    let chunk = (delta / ell.max(1)).max(1);
    let per = lg((ceil_div(ell, delta) + 1) as f64);
    (n / chunk) as f64 * per + 64.0 * lg(n.max(2) as f64).ceil()
}

impl SpaceAuditReport {
    /// Formula-only report; `measured` may be filled in later.
    pub fn formulas(kind: StructureKind, p: AuditParams) -> Self {
        let n = p.n;
        let d = p.delta.max(1);
        let (upper, lower, substituted) = match kind {
            StructureKind::Plain | StructureKind::BinaryStreamExact => (n as f64, Some(n as f64), false),
            StructureKind::Sparse => {
                let m = p.m.max(1);
                let per = 2.0 + lg((n as f64 / m as f64).max(1.0)).ceil();
                (p.m as f64 * per, None, false)
            }
            StructureKind::DRankSelect => (n as f64 / d as f64, Some(drank_lower(n, d)), false),
            StructureKind::RankDSelect => {
                let upper = ceil_div(n, d) as f64 * lg((d + 1) as f64).ceil();
                (upper, Some(rank_lower(n, d)), false)
            }
            StructureKind::Multiset => {
                let kept = (p.m / d) as f64;
                let len = n as f64 + kept;
                let per = 2.0 + lg((len / kept.max(1.0)).max(1.0)).ceil();
                (kept * per, None, false)
            }
            StructureKind::MultisetRd => {
                let upper = 2.0 * ceil_div(n + p.m, d) as f64 * lg((d + 1) as f64).ceil();
                (upper, Some(rank_lower(n, d)), true)
            }
            StructureKind::MultisetBounded => {
                let f = bounded_lower(n, d, p.ell.max(1));
                (f, Some(f), d <= p.ell)
            }
            StructureKind::Sequence => {
                (2.0 * n as f64 / d as f64 * lg((p.sigma + 1) as f64), None, true)
            }
            StructureKind::BinaryStream => {
                (ceil_div(n, d) as f64 + 64.0 * lg(n.max(2) as f64).ceil(), Some(drank_lower(n, d)), false)
            }
            StructureKind::IntStream => {
                let f = n as f64 * lg((p.ell + 1) as f64);
                (f, Some(f), false)
            }
            StructureKind::Sketch => {
                (sketch_formula(n, d, p.ell.max(1)), Some(bounded_lower(n, d, p.ell.max(1))), true)
            }
        };
        SpaceAuditReport {
            kind,
            params: p,
            measured_bits: None,
            upper_formula_bits: upper,
            lower_formula_bits: lower,
            upper_ratio: None,
            lower_ratio: None,
            substituted,
        }
    }

    pub fn measured(kind: StructureKind, p: AuditParams, bits: u64) -> Self {
        let mut r = Self::formulas(kind, p);
        r.measured_bits = Some(bits);
        let ratio = |f: f64| (f > 0.0).then(|| bits as f64 / f);
        r.upper_ratio = ratio(r.upper_formula_bits);
        r.lower_ratio = r.lower_formula_bits.and_then(ratio);
        r
    }

    pub const CSV_HEADER: [&'static str; 13] = [
        "kind",
        "n",
        "m",
        "delta",
        "ell",
        "sigma",
        "measured_bits",
        "upper_formula_bits",
        "lower_formula_bits",
        "upper_ratio",
        "lower_ratio",
        "substituted",
        "below_lower",
    ];

    pub fn csv_record(&self) -> Vec<String> {
        let opt_f = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.4}"));
        let p = &self.params;
        let below = match (self.measured_bits, self.lower_formula_bits) {
            (Some(m), Some(l)) => ((m as f64) < l).to_string(),
            _ => String::new(),
        };
        vec![
            self.kind.to_string(),
            p.n.to_string(),
            p.m.to_string(),
            p.delta.to_string(),
            p.ell.to_string(),
            p.sigma.to_string(),
            self.measured_bits.map_or(String::new(), |m| m.to_string()),
            format!("{:.4}", self.upper_formula_bits),
            opt_f(self.lower_formula_bits),
            opt_f(self.upper_ratio),
            opt_f(self.lower_ratio),
            self.substituted.to_string(),
            below,
        ]
    }
}
