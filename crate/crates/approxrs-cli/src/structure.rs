//! Building, loading and querying the static structures by kind.

use std::path::Path;

use anyhow::{bail, Result};
use approxrs::approx_bits::Backing;
use approxrs::approx_multiset::frequencies_from_pairs;
use approxrs::codec::{peek_tag, Tag};
use approxrs::oracle::{self, Kind};
use approxrs::{
    AuditParams, DRankSelectA, Error, MultisetBoundedFreq, MultisetFixedM, MultisetFixedMRd, Persist,
    PlainBitVector, RankDSelectA, RankSelect, SeqApprox, SparseBitVector, StructureKind,
};

use crate::input;

/// Raw data a structure is built from, kept for verification.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Bits(Vec<bool>),
    Freq(Vec<u64>),
    Seq { symbols: Vec<u32>, sigma: u32 },
}

#[derive(Debug, Clone, Copy, Default)]
pub struct InputOpts<'a> {
    pub format: Option<&'a str>,
    pub n: Option<u64>,
    pub sigma: Option<u32>,
}

fn family(kind: StructureKind) -> Result<&'static str> {
    use StructureKind::*;
    Ok(match kind {
        Plain | Sparse | DRankSelect | RankDSelect => "bits",
        Multiset | MultisetRd | MultisetBounded => "multiset",
        Sequence => "sequence",
        _ => bail!(Error::Param(format!("{kind} is a stream kind; use stream-sim"))),
    })
}

pub fn load_source(kind: StructureKind, path: &Path, opts: InputOpts) -> Result<Source> {
    match family(kind)? {
        "bits" => {
            let bits = match opts.format.unwrap_or("raw") {
                "raw" => input::parse_raw_bits(&input::read_bytes(path)?)?,
                "text" => input::parse_text_bits(&input::read_text(path)?)?,
                "sparse" => input::positions_to_bits(&input::parse_positions(&input::read_text(path)?)?, opts.n)?,
                f => bail!(Error::Param(format!("unknown bit format {f:?} (raw, text, sparse)"))),
            };
            Ok(Source::Bits(bits))
        }
        "multiset" => {
            if opts.format.is_some_and(|f| f != "pairs") {
                bail!(Error::Param("multisets are read as \"element count\" pairs".into()));
            }
            let pairs = input::parse_pairs(&input::read_text(path)?)?;
            let n = opts.n.unwrap_or_else(|| pairs.iter().map(|p| p.0).max().unwrap_or(0));
            Ok(Source::Freq(frequencies_from_pairs(n as usize, &pairs)?))
        }
        _ => {
            let (symbols, default_sigma) = match opts.format.unwrap_or("bytes") {
                "bytes" => (input::bytes_to_symbols(&input::read_bytes(path)?), 256),
                "ints" => {
                    let vals = input::parse_ints(&input::read_text(path)?)?;
                    let max = vals.iter().copied().max().unwrap_or(1);
                    let symbols = vals
                        .into_iter()
                        .map(|v| u32::try_from(v).map_err(|_| Error::Validation(format!("symbol {v} too large"))))
                        .collect::<std::result::Result<Vec<_>, _>>()?;
                    (symbols, max.clamp(1, u32::MAX as u64) as u32)
                }
                f => bail!(Error::Param(format!("unknown sequence format {f:?} (bytes, ints)"))),
            };
            Ok(Source::Seq { symbols, sigma: opts.sigma.unwrap_or(default_sigma) })
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BuildOpts {
    pub delta: Option<u64>,
    pub ell: Option<u64>,
    pub backing: Backing,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Structure {
    Plain(PlainBitVector),
    Sparse(SparseBitVector),
    DRank(DRankSelectA),
    RankD(RankDSelectA),
    Multiset(MultisetFixedM),
    MultisetRd(MultisetFixedMRd),
    MultisetBounded(MultisetBoundedFreq),
    Sequence(SeqApprox),
}

fn need(v: Option<u64>, flag: &str, kind: StructureKind) -> Result<u64> {
    v.ok_or_else(|| Error::Param(format!("{kind} needs --{flag}")).into())
}

impl Structure {
    pub fn build(kind: StructureKind, src: &Source, opts: BuildOpts) -> Result<Self> {
        use StructureKind as K;
        Ok(match (kind, src) {
            (K::Plain, Source::Bits(b)) => Structure::Plain(PlainBitVector::from_bits(b.iter().copied())),
            (K::Sparse, Source::Bits(b)) => Structure::Sparse(SparseBitVector::from_bits(b.iter().copied())),
            (K::DRankSelect, Source::Bits(b)) => {
                Structure::DRank(DRankSelectA::new(b, need(opts.delta, "delta", kind)?, opts.backing)?)
            }
            (K::RankDSelect, Source::Bits(b)) => Structure::RankD(RankDSelectA::new(b, need(opts.delta, "delta", kind)?)?),
            (K::Multiset, Source::Freq(f)) => Structure::Multiset(MultisetFixedM::new(f, need(opts.delta, "delta", kind)?)?),
            (K::MultisetRd, Source::Freq(f)) => {
                Structure::MultisetRd(MultisetFixedMRd::new(f, need(opts.delta, "delta", kind)?)?)
            }
            (K::MultisetBounded, Source::Freq(f)) => {
                let ell = match opts.ell {
                    Some(l) => l,
                    None => f.iter().copied().max().unwrap_or(1).max(1),
                };
                Structure::MultisetBounded(MultisetBoundedFreq::new(f, need(opts.delta, "delta", kind)?, ell)?)
            }
            (K::Sequence, Source::Seq { symbols, sigma }) => {
                Structure::Sequence(SeqApprox::new(symbols, *sigma, need(opts.delta, "delta", kind)?)?)
            }
            _ => bail!(Error::Param(format!("input does not match kind {kind}"))),
        })
    }

    pub fn kind(&self) -> StructureKind {
        use StructureKind as K;
        match self {
            Structure::Plain(_) => K::Plain,
            Structure::Sparse(_) => K::Sparse,
            Structure::DRank(_) => K::DRankSelect,
            Structure::RankD(_) => K::RankDSelect,
            Structure::Multiset(_) => K::Multiset,
            Structure::MultisetRd(_) => K::MultisetRd,
            Structure::MultisetBounded(_) => K::MultisetBounded,
            Structure::Sequence(_) => K::Sequence,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        match self {
            Structure::Plain(s) => s.to_bytes(),
            Structure::Sparse(s) => s.to_bytes(),
            Structure::DRank(s) => s.to_bytes(),
            Structure::RankD(s) => s.to_bytes(),
            Structure::Multiset(s) => s.to_bytes(),
            Structure::MultisetRd(s) => s.to_bytes(),
            Structure::MultisetBounded(s) => s.to_bytes(),
            Structure::Sequence(s) => s.to_bytes(),
        }
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        Ok(match peek_tag(bytes)? {
            Tag::PlainBitVector => Structure::Plain(PlainBitVector::from_bytes(bytes)?),
            Tag::SparseBitVector => Structure::Sparse(SparseBitVector::from_bytes(bytes)?),
            Tag::DRankSelectA => Structure::DRank(DRankSelectA::from_bytes(bytes)?),
            Tag::RankDSelectA => Structure::RankD(RankDSelectA::from_bytes(bytes)?),
            Tag::MultisetFixedM => Structure::Multiset(MultisetFixedM::from_bytes(bytes)?),
            Tag::MultisetFixedMRd => Structure::MultisetRd(MultisetFixedMRd::from_bytes(bytes)?),
            Tag::MultisetBoundedFreq => Structure::MultisetBounded(MultisetBoundedFreq::from_bytes(bytes)?),
            Tag::SeqApprox => Structure::Sequence(SeqApprox::from_bytes(bytes)?),
            t => bail!(Error::Format(format!("{t:?} files cannot be queried"))),
        })
    }

    pub fn space_bits(&self) -> u64 {
        match self {
            Structure::Plain(s) => s.space_bits(),
            Structure::Sparse(s) => s.space_bits(),
            Structure::DRank(s) => s.space_bits(),
            Structure::RankD(s) => s.space_bits(),
            Structure::Multiset(s) => s.space_bits(),
            Structure::MultisetRd(s) => s.space_bits(),
            Structure::MultisetBounded(s) => s.space_bits(),
            Structure::Sequence(s) => s.space_bits(),
        }
    }

    pub fn delta(&self) -> u64 {
        match self {
            Structure::Plain(_) | Structure::Sparse(_) => 1,
            Structure::DRank(s) => s.delta(),
            Structure::RankD(s) => s.delta(),
            Structure::Multiset(s) => s.delta(),
            Structure::MultisetRd(s) => s.delta(),
            Structure::MultisetBounded(s) => s.delta(),
            Structure::Sequence(s) => s.delta(),
        }
    }

    pub fn audit_params(&self) -> AuditParams {
        let delta = self.delta();
        match self {
            Structure::Plain(s) => AuditParams { n: s.len() as u64, m: s.count_ones() as u64, ..Default::default() },
            Structure::Sparse(s) => AuditParams { n: s.len() as u64, m: s.count_ones() as u64, ..Default::default() },
            Structure::DRank(s) => AuditParams { n: s.len() as u64, m: s.count_ones() as u64, delta, ..Default::default() },
            Structure::RankD(s) => AuditParams { n: s.len() as u64, m: s.count_ones() as u64, delta, ..Default::default() },
            Structure::Multiset(s) => AuditParams { n: s.universe() as u64, m: s.size(), delta, ..Default::default() },
            Structure::MultisetRd(s) => AuditParams { n: s.universe() as u64, m: s.size(), delta, ..Default::default() },
            Structure::MultisetBounded(s) => {
                AuditParams { n: s.universe() as u64, m: s.size(), delta, ell: s.ell(), ..Default::default() }
            }
            Structure::Sequence(s) => {
                AuditParams { n: s.len() as u64, delta, sigma: s.sigma() as u64, ..Default::default() }
            }
        }
    }

    /// Answer one query; unsupported operations are validation errors.
    pub fn query(&self, q: &Query) -> std::result::Result<u64, Error> {
        let unsupported = || Error::Validation(format!("operation {} not supported by {}", q.op.name(), self.kind()));
        let a = q.args[0];
        let i = a as usize;
        let ans = match (self, q.op) {
            (Structure::Sequence(s), Op::DRankA) => s.drank_a(a as u32, q.args[1] as usize)?,
            (Structure::Sequence(s), Op::SelectA) => s.select_a(a as u32, q.args[1])?,
            (Structure::Sequence(_), _) => return Err(unsupported()),
            (Structure::Plain(_) | Structure::Sparse(_), op) => {
                let v: &dyn RankSelect = match self {
                    Structure::Plain(s) => s,
                    Structure::Sparse(s) => s,
                    _ => unreachable!(),
                };
                match op {
                    Op::Access => v.get(i)? as u64,
                    Op::Rank1 => v.rank1(i)? as u64,
                    Op::Rank0 => v.rank0(i)? as u64,
                    Op::Select1 => v.select1(i)? as u64,
                    Op::Select0 => v.select0(i)? as u64,
                    _ => return Err(unsupported()),
                }
            }
            (Structure::DRank(s), Op::DRankA) => s.drank_a(i)? as u64,
            (Structure::DRank(s), Op::SelectA) => s.select_a(i)? as u64,
            (Structure::RankD(s), Op::RankA) => s.rank_a(i)? as u64,
            (Structure::RankD(s), Op::DSelectA) => s.dselect_a(i)? as u64,
            (Structure::Multiset(s), Op::DRankA) => s.drank_a(i)?,
            (Structure::Multiset(s), Op::SelectA) => s.select_a(a)?,
            (Structure::MultisetRd(s), Op::RankA) => s.rank_a(i)?,
            (Structure::MultisetRd(s), Op::DSelectA) => s.dselect_a(a)?,
            (Structure::MultisetBounded(s), Op::DRankA) => s.drank_a(i)?,
            (Structure::MultisetBounded(s), Op::SelectA) => s.select_a(a)?,
            _ => return Err(unsupported()),
        };
        Ok(ans)
    }

    /// Check an outcome against the oracle over `src`.
    ///
    /// An error is correct exactly when the query lies outside the
    /// operation's domain.
    pub fn verify(&self, src: &Source, q: &Query, outcome: &std::result::Result<u64, Error>) -> (bool, String) {
        let delta = self.delta();
        let exact = |want: std::result::Result<usize, Error>| match (want, outcome) {
            (Ok(w), Ok(a)) => (w as u64 == *a, format!("want {w}")),
            (Err(_), Err(_)) => (true, String::new()),
            (Ok(w), Err(_)) => (false, format!("want {w}")),
            (Err(e), Ok(_)) => (false, format!("want error: {e}")),
        };
        let approx = |in_domain: bool, reference: &dyn Fn(Kind) -> oracle::Reference| match (in_domain, outcome) {
            (false, Err(_)) => (true, String::new()),
            (false, Ok(_)) => (false, "want error: outside domain".into()),
            (true, Err(e)) => (false, format!("unexpected error: {e}")),
            (true, Ok(a)) => {
                let kind = q.op.kind().expect("approximate op");
                let v = oracle::validate_interval(kind, delta, reference(kind), *a as i64);
                (v.ok, v.diagnostic)
            }
        };
        let a = q.args[0];
        match src {
            Source::Bits(bits) => {
                let i = a as usize;
                let ones = bits.iter().filter(|&&b| b).count() as u64;
                match q.op {
                    Op::Access => exact(if (1..=bits.len()).contains(&i) { Ok(bits[i - 1] as usize) } else { Err(Error::Validation(String::new())) }),
                    Op::Rank1 => exact(oracle::o_rank(bits, true, i)),
                    Op::Rank0 => exact(oracle::o_rank(bits, false, i)),
                    Op::Select1 => exact(oracle::o_select(bits, true, i)),
                    Op::Select0 => exact(oracle::o_select(bits, false, i)),
                    op => {
                        let dom = if op.is_rank() { (1..=bits.len() as u64).contains(&a) } else { (1..=ones).contains(&a) };
                        approx(dom, &|k| oracle::bits_reference(k, bits, delta, i))
                    }
                }
            }
            Source::Freq(freq) => {
                let m: u64 = freq.iter().sum();
                let dom = if q.op.is_rank() { (1..=freq.len() as u64).contains(&a) } else { (1..=m).contains(&a) };
                approx(dom, &|k| oracle::multiset_reference(k, freq, delta, a))
            }
            Source::Seq { symbols, sigma } => {
                let (j, i) = (a, q.args[1]);
                let dom = (1..=*sigma as u64).contains(&j)
                    && if q.op.is_rank() {
                        (1..=symbols.len() as u64).contains(&i)
                    } else {
                        (1..=oracle::o_seq_rank(symbols, j as u32, symbols.len() as i64)).contains(&i)
                    };
                approx(dom, &|k| oracle::sequence_reference(k, symbols, j as u32, delta, i))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Access,
    Rank1,
    Rank0,
    Select1,
    Select0,
    DRankA,
    RankA,
    SelectA,
    DSelectA,
}

impl Op {
    pub fn parse(s: &str) -> Option<Op> {
        Some(match s {
            "access" | "get" => Op::Access,
            "rank" | "rank1" => Op::Rank1,
            "rank0" => Op::Rank0,
            "select" | "select1" => Op::Select1,
            "select0" => Op::Select0,
            "dranka" | "drank_a" => Op::DRankA,
            "ranka" | "rank_a" => Op::RankA,
            "selecta" | "select_a" => Op::SelectA,
            "dselecta" | "dselect_a" => Op::DSelectA,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Op::Access => "access",
            Op::Rank1 => "rank1",
            Op::Rank0 => "rank0",
            Op::Select1 => "select1",
            Op::Select0 => "select0",
            Op::DRankA => "dranka",
            Op::RankA => "ranka",
            Op::SelectA => "selecta",
            Op::DSelectA => "dselecta",
        }
    }

    fn is_rank(&self) -> bool {
        matches!(self, Op::Access | Op::Rank1 | Op::Rank0 | Op::DRankA | Op::RankA)
    }

    fn kind(&self) -> Option<Kind> {
        match self {
            Op::DRankA => Some(Kind::DRank),
            Op::RankA => Some(Kind::Rank),
            Op::SelectA => Some(Kind::Select),
            Op::DSelectA => Some(Kind::DSelect),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub line: usize,
    pub op: Op,
    pub args: Vec<u64>,
}

/// Parse a query script: one `op arg [arg]` per line, `#` comments.
/// Sequence structures take `op symbol arg`.
pub fn parse_script(text: &str, two_args: bool) -> Result<Vec<Query>> {
    let want = if two_args { 2 } else { 1 };
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let mut toks = l.split_whitespace();
        let name = toks.next().unwrap();
        let Some(op) = Op::parse(name) else {
            bail!(Error::Validation(format!("line {line}: unknown operation {name:?}")));
        };
        let args = toks
            .map(|t| t.parse::<u64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::Validation(format!("line {line}: arguments must be non-negative integers")))?;
        if args.len() != want {
            bail!(Error::Validation(format!("line {line}: {name} takes {want} argument(s)")));
        }
        out.push(Query { line, op, args });
    }
    Ok(out)
}
