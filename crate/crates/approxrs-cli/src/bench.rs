//! `bench`: build time, per-query latency and space over a parameter grid.
//!
//! Latencies are measured over batches of consecutive operations, and
//! p50/p99 are taken over the per-operation batch means, which keeps
//! timer overhead out of sub-100ns figures.

use std::hint::black_box;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use anyhow::Result;
use approxrs::approx_bits::Backing;
use approxrs::{
    AuditParams, BinaryStreamApprox, BinaryStreamExact, DRankSelectA, IntStreamExact, MultisetBoundedFreq,
    MultisetFixedM, MultisetFixedMRd, PlainBitVector, RankDSelectA, RankSelect, SeqApprox, SpaceAuditReport,
    SparseBitVector, SsaSketch, StructureKind,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BATCH: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub kind: StructureKind,
    pub n: u64,
    pub delta: u64,
    pub ell: u64,
    pub sigma: u32,
    pub rep: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub cell: Cell,
    pub op: &'static str,
    pub build_ms: f64,
    pub p50_ns: f64,
    pub p99_ns: f64,
    pub space_bits: u64,
    pub upper_ratio: Option<f64>,
}

pub const HEADER: [&str; 12] =
    ["kind", "n", "delta", "ell", "sigma", "rep", "op", "build_ms", "p50_ns", "p99_ns", "space_bits", "upper_ratio"];

impl Row {
    pub fn record(&self) -> Vec<String> {
        let c = &self.cell;
        vec![
            c.kind.to_string(),
            c.n.to_string(),
            c.delta.to_string(),
            c.ell.to_string(),
            c.sigma.to_string(),
            c.rep.to_string(),
            self.op.to_string(),
            format!("{:.3}", self.build_ms),
            format!("{:.1}", self.p50_ns),
            format!("{:.1}", self.p99_ns),
            self.space_bits.to_string(),
            self.upper_ratio.map_or(String::new(), |r| format!("{r:.4}")),
        ]
    }
}

/// Per-operation nanoseconds, one sample per batch.
pub fn batch_samples(count: usize, mut f: impl FnMut(usize)) -> Vec<f64> {
    let mut out = Vec::with_capacity(count / BATCH + 1);
    let mut k = 0;
    while k < count {
        let end = (k + BATCH).min(count);
        let start = Instant::now();
        for j in k..end {
            f(j);
        }
        out.push(start.elapsed().as_nanos() as f64 / (end - k) as f64);
        k = end;
    }
    out
}

/// `(p50, p99)` of the samples.
pub fn percentiles(mut v: Vec<f64>) -> (f64, f64) {
    if v.is_empty() {
        return (0.0, 0.0);
    }
    v.sort_by(|a, b| a.total_cmp(b));
    let at = |q: usize| v[((v.len() - 1) * q) / 100];
    (at(50), at(99))
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed().as_secs_f64() * 1e3)
}

fn cell_seed(seed: u64, c: &Cell) -> u64 {
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    for v in [c.kind as u64, c.n, c.delta, c.ell, c.sigma as u64, c.rep as u64] {
        h = (h ^ v).wrapping_mul(0x1000_0000_01b3).rotate_left(17);
    }
    h
}

struct Measured {
    build_ms: f64,
    space_bits: u64,
    params: AuditParams,
    ops: Vec<(&'static str, Vec<f64>)>,
}

fn random_args(rng: &mut ChaCha8Rng, hi: u64, q: usize) -> Vec<u64> {
    if hi == 0 {
        return vec![];
    }
    (0..q).map(|_| rng.gen_range(1..=hi)).collect()
}

fn run_cell(c: &Cell, seed: u64, queries: usize) -> Result<Measured> {
    use StructureKind as K;
    let mut rng = ChaCha8Rng::seed_from_u64(cell_seed(seed, c));
    let n = c.n as usize;
    let base = AuditParams { n: c.n, delta: c.delta, ell: c.ell, sigma: c.sigma as u64, ..Default::default() };
    let bits = || -> Vec<bool> {
        let mut r = ChaCha8Rng::seed_from_u64(cell_seed(seed, c) ^ 1);
        (0..n).map(|_| r.gen_bool(0.5)).collect()
    };
    let freqs = || -> Vec<u64> {
        let mut r = ChaCha8Rng::seed_from_u64(cell_seed(seed, c) ^ 2);
        (0..n).map(|_| r.gen_range(0..=c.ell.max(1))).collect()
    };
    let m = match c.kind {
        K::Plain | K::Sparse | K::DRankSelect | K::RankDSelect => {
            let b = bits();
            let ones = b.iter().filter(|&&x| x).count() as u64;
            let ranks = random_args(&mut rng, c.n, queries);
            let sels = random_args(&mut rng, ones, queries);
            let params = AuditParams { m: ones, ..base };
            match c.kind {
                K::Plain | K::Sparse => {
                    let (v, build_ms): (Box<dyn RankSelect>, f64) = if c.kind == K::Plain {
                        let (v, t) = timed(|| PlainBitVector::from_bits(b.iter().copied()));
                        (Box::new(v), t)
                    } else {
                        let (v, t) = timed(|| SparseBitVector::from_bits(b.iter().copied()));
                        (Box::new(v), t)
                    };
                    let r = batch_samples(ranks.len(), |j| {
                        black_box(v.rank1(ranks[j] as usize).ok());
                    });
                    let s = batch_samples(sels.len(), |j| {
                        black_box(v.select1(sels[j] as usize).ok());
                    });
                    Measured { build_ms, space_bits: v.space_bits(), params, ops: vec![("rank1", r), ("select1", s)] }
                }
                K::DRankSelect => {
                    let (v, build_ms) = timed(|| DRankSelectA::new(&b, c.delta, Backing::Auto));
                    let v = v?;
                    let r = batch_samples(ranks.len(), |j| {
                        black_box(v.drank_a(ranks[j] as usize).ok());
                    });
                    let s = batch_samples(sels.len(), |j| {
                        black_box(v.select_a(sels[j] as usize).ok());
                    });
                    Measured { build_ms, space_bits: v.space_bits(), params, ops: vec![("dranka", r), ("selecta", s)] }
                }
                _ => {
                    let (v, build_ms) = timed(|| RankDSelectA::new(&b, c.delta));
                    let v = v?;
                    let r = batch_samples(ranks.len(), |j| {
                        black_box(v.rank_a(ranks[j] as usize).ok());
                    });
                    let s = batch_samples(sels.len(), |j| {
                        black_box(v.dselect_a(sels[j] as usize).ok());
                    });
                    Measured { build_ms, space_bits: v.space_bits(), params, ops: vec![("ranka", r), ("dselecta", s)] }
                }
            }
        }
        K::Multiset | K::MultisetRd | K::MultisetBounded => {
            let f = freqs();
            let total: u64 = f.iter().sum();
            let ranks = random_args(&mut rng, c.n, queries);
            let sels = random_args(&mut rng, total, queries);
            let params = AuditParams { m: total, ..base };
            match c.kind {
                K::Multiset => {
                    let (v, build_ms) = timed(|| MultisetFixedM::new(&f, c.delta));
                    let v = v?;
                    let r = batch_samples(ranks.len(), |j| {
                        black_box(v.drank_a(ranks[j] as usize).ok());
                    });
                    let s = batch_samples(sels.len(), |j| {
                        black_box(v.select_a(sels[j]).ok());
                    });
                    Measured { build_ms, space_bits: v.space_bits(), params, ops: vec![("dranka", r), ("selecta", s)] }
                }
                K::MultisetRd => {
                    let (v, build_ms) = timed(|| MultisetFixedMRd::new(&f, c.delta));
                    let v = v?;
                    let r = batch_samples(ranks.len(), |j| {
                        black_box(v.rank_a(ranks[j] as usize).ok());
                    });
                    let s = batch_samples(sels.len(), |j| {
                        black_box(v.dselect_a(sels[j]).ok());
                    });
                    Measured { build_ms, space_bits: v.space_bits(), params, ops: vec![("ranka", r), ("dselecta", s)] }
                }
                _ => {
                    let (v, build_ms) = timed(|| MultisetBoundedFreq::new(&f, c.delta, c.ell.max(1)));
                    let v = v?;
                    let r = batch_samples(ranks.len(), |j| {
                        black_box(v.drank_a(ranks[j] as usize).ok());
                    });
                    let s = batch_samples(sels.len(), |j| {
                        black_box(v.select_a(sels[j]).ok());
                    });
                    Measured { build_ms, space_bits: v.space_bits(), params, ops: vec![("dranka", r), ("selecta", s)] }
                }
            }
        }
        K::Sequence => {
            let seq: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=c.sigma)).collect();
            let (v, build_ms) = timed(|| SeqApprox::new(&seq, c.sigma, c.delta));
            let v = v?;
            let args: Vec<(u32, u64)> = (0..queries).map(|_| (rng.gen_range(1..=c.sigma), rng.gen_range(1..=c.n))).collect();
            let r = batch_samples(args.len(), |j| {
                black_box(v.drank_a(args[j].0, args[j].1 as usize).ok());
            });
            let s = batch_samples(args.len(), |j| {
                let (sym, i) = args[j];
                let cnt = v.count(sym).unwrap_or(0).max(1);
                black_box(v.select_a(sym, (i - 1) % cnt + 1).ok());
            });
            Measured { build_ms, space_bits: v.space_bits(), params: base, ops: vec![("dranka", r), ("selecta", s)] }
        }
        K::BinaryStream | K::BinaryStreamExact | K::IntStream | K::Sketch => {
            let stream: Vec<u64> = (0..2 * n)
                .map(|_| {
                    let hi = if matches!(c.kind, K::BinaryStream | K::BinaryStreamExact) { 1 } else { c.ell };
                    rng.gen_range(0..=hi)
                })
                .collect();
            let args = random_args(&mut rng, c.n, queries);
            let warm = &stream[..n];
            let timed_part = &stream[n..];
            macro_rules! stream_cell {
                ($s:expr, $push:expr, $q:expr, $qname:expr) => {{
                    let (s, build_ms) = timed(|| $s);
                    let mut s = s?;
                    for &x in warm {
                        $push(&mut s, x);
                    }
                    let p = batch_samples(timed_part.len(), |j| $push(&mut s, timed_part[j]));
                    let q = batch_samples(args.len(), |j| {
                        black_box($q(&s, args[j]));
                    });
                    Measured { build_ms, space_bits: s.space_bits(), params: base, ops: vec![("push", p), ($qname, q)] }
                }};
            }
            match c.kind {
                K::BinaryStream => stream_cell!(
                    BinaryStreamApprox::new(n, c.delta),
                    |s: &mut BinaryStreamApprox, x: u64| s.push(x == 1),
                    |s: &BinaryStreamApprox, i: u64| s.ss_a(i as usize).ok(),
                    "ssa"
                ),
                K::BinaryStreamExact => stream_cell!(
                    BinaryStreamExact::new(n),
                    |s: &mut BinaryStreamExact, x: u64| s.push(x == 1),
                    |s: &BinaryStreamExact, i: u64| s.ss(i as usize).ok(),
                    "ss"
                ),
                K::IntStream => stream_cell!(
                    IntStreamExact::new(n, c.ell),
                    |s: &mut IntStreamExact, x: u64| s.push(x).expect("value within bound"),
                    |s: &IntStreamExact, i: u64| s.ss(i as usize).ok(),
                    "ss"
                ),
                _ => stream_cell!(
                    SsaSketch::new(n, c.ell, c.delta),
                    |s: &mut SsaSketch, x: u64| s.add(x).expect("value within bound"),
                    |s: &SsaSketch, i: u64| s.query(i as usize).ok(),
                    "query"
                ),
            }
        }
    };
    Ok(m)
}

/// Worker threads: `APPROXRS_THREADS` if set, else the machine's
/// parallelism, never more than the number of cells.
pub fn thread_count(cells: usize) -> usize {
    let avail = std::thread::available_parallelism().map_or(1, |n| n.get());
    let cap = std::env::var("APPROXRS_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&v| v > 0);
    cap.unwrap_or(avail).min(cells).max(1)
}

pub fn run(cells: &[Cell], seed: u64, queries: usize) -> Result<Vec<Row>> {
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<(usize, Result<Vec<Row>>)>> = Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for _ in 0..thread_count(cells.len()) {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(c) = cells.get(k) else { break };
                let rows = run_cell(c, seed, queries).map(|m| {
                    let audit = SpaceAuditReport::measured(c.kind, m.params, m.space_bits);
                    m.ops
                        .into_iter()
                        .map(|(op, samples)| {
                            let (p50_ns, p99_ns) = percentiles(samples);
                            Row {
                                cell: *c,
                                op,
                                build_ms: m.build_ms,
                                p50_ns,
                                p99_ns,
                                space_bits: m.space_bits,
                                upper_ratio: audit.upper_ratio,
                            }
                        })
                        .collect()
                });
                results.lock().unwrap().push((k, rows));
            });
        }
    });
    let mut results = results.into_inner().unwrap();
    results.sort_by_key(|r| r.0);
    let mut out = Vec::new();
    for (_, rows) in results {
        out.extend(rows?);
    }
    Ok(out)
}
