//! Acceptance suite. Each test prints one `criterion N ... PASS|FAIL` line
//! to the real stdout (not the captured test output) and fails when its
//! criterion fails.
//!
//! Tests take a shared lock so the latency measurements of criterion 5 are
//! not disturbed by the other criteria.

use std::collections::BTreeMap;
use std::hint::black_box;
use std::io::Write;
use std::sync::{Mutex, MutexGuard};
use std::time::Instant;

use approxrs::approx_bits::Backing;
use approxrs::approx_multiset::BoundedMode;
use approxrs::audit::{bounded_lower, drank_lower, rank_lower, sketch_formula};
use approxrs::oracle::{
    bits_reference, check_sum_estimate, multiset_reference, o_iss, o_rank, o_search, o_select, o_ss, o_sum,
    sequence_reference, stream_reference, validate_interval, within_closed, Kind, Reference, ShadowStream,
};
use approxrs::{
    BinaryStreamApprox, BinaryStreamExact, DRankSelectA, IntStreamExact, MultisetBoundedFreq, MultisetFixedM,
    MultisetFixedMRd, PartialSums, Persist, PlainBitVector, RankDSelectA, RankSelect, SeqApprox, SparseBitVector,
    SsaSketch,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn say(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

fn verdict(n: u32, title: &str, pass: bool, summary: &str) {
    say(&format!("criterion {n} {title}: {} ({summary})", if pass { "PASS" } else { "FAIL" }));
}

// ---------------------------------------------------------------------------
// references

/// `c[x]` = occurrences in positions `1..=x`, for `x` in `0..=len`.
#[derive(Debug, Clone)]
struct Counts(Vec<i64>);

impl Counts {
    fn from_weights(w: impl IntoIterator<Item = u64>) -> Self {
        let mut c = vec![0i64];
        let mut s = 0i64;
        for x in w {
            s += x as i64;
            c.push(s);
        }
        Counts(c)
    }

    fn len(&self) -> usize {
        self.0.len() - 1
    }

    fn total(&self) -> i64 {
        self.0[self.len()]
    }

    fn rank(&self, x: i64) -> i64 {
        self.0[x.clamp(0, self.len() as i64) as usize]
    }

    fn select(&self, k: i64) -> Option<i64> {
        if k <= 0 {
            return Some(0);
        }
        let p = self.0.partition_point(|&c| c < k);
        (p <= self.len()).then_some(p as i64)
    }

    fn reference(&self, kind: Kind, delta: u64, i: u64) -> Reference {
        let (d, i) = (delta as i64, i as i64);
        match kind {
            Kind::DRank | Kind::Ss => Reference::Point(self.rank(i)),
            Kind::Rank => Reference::Shifted { at_shifted: self.rank(i - d), at_query: Some(self.rank(i)) },
            Kind::DSelect => Reference::Point(self.select(i).unwrap_or(i64::MAX)),
            Kind::Select | Kind::Iss => Reference::Shifted {
                at_shifted: self.select(i - d).unwrap_or(i64::MAX),
                at_query: self.select(i),
            },
        }
    }
}

/// Suffix sums of the current window, newest first.
fn window_counts(shadow: &ShadowStream) -> Counts {
    let w = shadow.window_len();
    Counts::from_weights(shadow.hist.iter().rev().take(w).copied())
}

#[derive(Default)]
struct Count {
    checked: u64,
    violations: u64,
    closed: u64,
    example: Option<String>,
}

/// Per-query-family violation counts.
#[derive(Default)]
struct Tally(BTreeMap<&'static str, Count>);

impl Tally {
    fn record(
        &mut self,
        name: &'static str,
        kind: Kind,
        delta: u64,
        r: Reference,
        answer: Result<i64, String>,
        ctx: impl FnOnce() -> String,
    ) {
        let (ok, closed, diag) = match answer {
            Ok(a) => {
                let v = validate_interval(kind, delta, r, a);
                (v.ok, within_closed(r, a), v.diagnostic)
            }
            Err(e) => (false, false, format!("error: {e}")),
        };
        self.note(name, ok, closed, || format!("{}: {diag}", ctx()));
    }

    fn note(&mut self, name: &'static str, ok: bool, closed: bool, ctx: impl FnOnce() -> String) {
        let c = self.0.entry(name).or_default();
        c.checked += 1;
        if !ok {
            c.violations += 1;
            c.closed += closed as u64;
            if c.example.is_none() {
                c.example = Some(ctx());
            }
        }
    }

    fn violations(&self) -> u64 {
        self.0.values().map(|c| c.violations).sum()
    }

    fn checked(&self) -> u64 {
        self.0.values().map(|c| c.checked).sum()
    }

    fn failing(&self) -> Vec<&'static str> {
        self.0.iter().filter(|(_, c)| c.violations > 0).map(|(&k, _)| k).collect()
    }

    fn print(&self) {
        for (name, c) in &self.0 {
            let mut line = format!("  {name:<34} {:>10} checked {:>8} violations", c.checked, c.violations);
            if c.violations > 0 {
                line += &format!(", {} inside the closed interval; first: {}", c.closed, c.example.as_deref().unwrap());
            }
            say(&line);
        }
    }
}

fn err_usize(r: approxrs::Result<usize>) -> Result<i64, String> {
    r.map(|v| v as i64).map_err(|e| e.to_string())
}

fn err_u64(r: approxrs::Result<u64>) -> Result<i64, String> {
    r.map(|v| v as i64).map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// the static workload shared by criteria 1 and 7

const DELTAS: [u64; 5] = [1, 2, 3, 8, 64];
const SIGMAS: [u32; 2] = [4, 26];
const ELLS: [u64; 3] = [1, 2, 8];
const INSTANCES: usize = 200;

#[derive(Debug, Clone, Copy)]
struct Instance {
    id: usize,
    delta: u64,
    sigma: u32,
    ell: u64,
    n: usize,
    density: f64,
}

impl Instance {
    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(0xacce_0000 + self.id as u64 * 16 + salt)
    }
}

fn instances() -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    (0..INSTANCES)
        .map(|id| {
            let delta = DELTAS[id % 5];
            let sigma = SIGMAS[(id / 5) % 2];
            let ell = ELLS[(id / 10) % 3];
            let d = delta as usize;
            let n = if id % 7 == 0 { rng.gen_range(d..=d + 40) } else { rng.gen_range(d.max(64)..=4096) };
            let density = [0.02, 0.25, 0.5, 0.85, 1.0][rng.gen_range(0..5)];
            Instance { id, delta, sigma, ell, n, density }
        })
        .collect()
}

struct Data {
    bits: Vec<bool>,
    freq: Vec<u64>,
    seq: Vec<u32>,
}

impl Data {
    fn new(inst: &Instance) -> Self {
        let mut rng = inst.rng(0);
        let p = inst.density;
        let bits = (0..inst.n).map(|_| rng.gen_bool(p)).collect();
        let freq = (0..inst.n).map(|_| if rng.gen_bool(p) { rng.gen_range(1..=inst.ell) } else { 0 }).collect();
        // skewed so that some symbols are frequent and some absent
        let seq = (0..inst.n)
            .map(|_| if rng.gen_bool(0.4) { 1 } else { rng.gen_range(1..=inst.sigma.min(2 + inst.id as u32 % 30)) })
            .collect();
        Data { bits, freq, seq }
    }
}

struct Built {
    drs_plain: DRankSelectA,
    drs_sparse: DRankSelectA,
    rds: RankDSelectA,
    ms: MultisetFixedM,
    ms_rd: MultisetFixedMRd,
    ms_bf: MultisetBoundedFreq,
    seq: SeqApprox,
}

impl Built {
    fn new(inst: &Instance, d: &Data) -> Self {
        let delta = inst.delta;
        Built {
            drs_plain: DRankSelectA::new(&d.bits, delta, Backing::Plain).unwrap(),
            drs_sparse: DRankSelectA::new(&d.bits, delta, Backing::Sparse).unwrap(),
            rds: RankDSelectA::new(&d.bits, delta).unwrap(),
            ms: MultisetFixedM::new(&d.freq, delta).unwrap(),
            ms_rd: MultisetFixedMRd::new(&d.freq, delta).unwrap(),
            ms_bf: MultisetBoundedFreq::new(&d.freq, delta, inst.ell).unwrap(),
            seq: SeqApprox::new(&d.seq, inst.sigma, delta).unwrap(),
        }
    }

    fn reload(&self) -> Self {
        fn again<T: Persist>(x: &T) -> T {
            let bytes = x.to_bytes();
            let y = T::from_bytes(&bytes).expect("reload");
            assert_eq!(y.to_bytes(), bytes, "re-serialization differs");
            y
        }
        Built {
            drs_plain: again(&self.drs_plain),
            drs_sparse: again(&self.drs_sparse),
            rds: again(&self.rds),
            ms: again(&self.ms),
            ms_rd: again(&self.ms_rd),
            ms_bf: again(&self.ms_bf),
            seq: again(&self.seq),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Src {
    Bits,
    Freq,
    Symbol(u32),
}

#[derive(Debug, Clone, Copy)]
struct Query {
    name: &'static str,
    kind: Kind,
    src: Src,
    i: u64,
}

/// Every valid query of every static structure, with its answer.
fn sweep(inst: &Instance, d: &Data, b: &Built, mut f: impl FnMut(Query, Result<i64, String>)) {
    let n = inst.n as u64;
    let ones = d.bits.iter().filter(|&&x| x).count() as u64;
    let items: u64 = d.freq.iter().sum();
    for (name_d, name_s, s) in [
        ("drank-select[plain].drank_a", "drank-select[plain].select_a", &b.drs_plain),
        ("drank-select[sparse].drank_a", "drank-select[sparse].select_a", &b.drs_sparse),
    ] {
        for i in 1..=n {
            f(Query { name: name_d, kind: Kind::DRank, src: Src::Bits, i }, err_usize(s.drank_a(i as usize)));
        }
        for i in 1..=ones {
            f(Query { name: name_s, kind: Kind::Select, src: Src::Bits, i }, err_usize(s.select_a(i as usize)));
        }
    }
    for i in 1..=n {
        f(Query { name: "rank-dselect.rank_a", kind: Kind::Rank, src: Src::Bits, i }, err_usize(b.rds.rank_a(i as usize)));
    }
    for i in 1..=ones {
        f(
            Query { name: "rank-dselect.dselect_a", kind: Kind::DSelect, src: Src::Bits, i },
            err_usize(b.rds.dselect_a(i as usize)),
        );
    }
    let dense = matches!(b.ms_bf.mode(), BoundedMode::Dense(_));
    let (bf_drank, bf_select) = match (dense, inst.delta >= 2 * inst.ell) {
        (true, _) => ("multiset-bounded[dense].drank_a", "multiset-bounded[dense].select_a"),
        (false, true) => ("multiset-bounded[grouped].drank_a", "multiset-bounded[grouped].select_a"),
        (false, false) => ("multiset-bounded[grouped].drank_a", "multiset-bounded[grouped,δ<2ℓ].select_a"),
    };
    for i in 1..=n {
        let u = i as usize;
        f(Query { name: "multiset.drank_a", kind: Kind::DRank, src: Src::Freq, i }, err_u64(b.ms.drank_a(u)));
        f(Query { name: "multiset-rd.rank_a", kind: Kind::Rank, src: Src::Freq, i }, err_u64(b.ms_rd.rank_a(u)));
        f(Query { name: bf_drank, kind: Kind::DRank, src: Src::Freq, i }, err_u64(b.ms_bf.drank_a(u)));
    }
    for i in 1..=items {
        f(Query { name: "multiset.select_a", kind: Kind::Select, src: Src::Freq, i }, err_u64(b.ms.select_a(i)));
        f(Query { name: "multiset-rd.dselect_a", kind: Kind::DSelect, src: Src::Freq, i }, err_u64(b.ms_rd.dselect_a(i)));
        f(Query { name: bf_select, kind: Kind::Select, src: Src::Freq, i }, err_u64(b.ms_bf.select_a(i)));
    }
    for j in 1..=inst.sigma {
        for i in 1..=n {
            f(
                Query { name: "sequence.drank_a", kind: Kind::DRank, src: Src::Symbol(j), i },
                err_u64(b.seq.drank_a(j, i as usize)),
            );
        }
        for i in 1..=b.seq.count(j).unwrap() {
            f(Query { name: "sequence.select_a", kind: Kind::Select, src: Src::Symbol(j), i }, err_u64(b.seq.select_a(j, i)));
        }
    }
}

/// Fast references, spot-checked against the oracle module's scans.
struct Refs {
    bits: Counts,
    freq: Counts,
    symbols: Vec<Counts>,
}

impl Refs {
    fn new(inst: &Instance, d: &Data) -> Self {
        let refs = Refs {
            bits: Counts::from_weights(d.bits.iter().map(|&b| b as u64)),
            freq: Counts::from_weights(d.freq.iter().copied()),
            symbols: (1..=inst.sigma).map(|j| Counts::from_weights(d.seq.iter().map(|&c| (c == j) as u64))).collect(),
        };
        let mut rng = inst.rng(1);
        let kinds = [Kind::DRank, Kind::Rank, Kind::Select, Kind::DSelect];
        for _ in 0..24 {
            let kind = kinds[rng.gen_range(0..4)];
            let i = rng.gen_range(1..=inst.n as u64 + 2);
            let j = rng.gen_range(1..=inst.sigma);
            let d_ = inst.delta;
            assert_eq!(refs.bits.reference(kind, d_, i.min(inst.n as u64)), bits_reference(kind, &d.bits, d_, i.min(inst.n as u64) as usize));
            assert_eq!(refs.freq.reference(kind, d_, i), multiset_reference(kind, &d.freq, d_, i));
            assert_eq!(refs.symbols[j as usize - 1].reference(kind, d_, i), sequence_reference(kind, &d.seq, j, d_, i));
        }
        refs
    }

    fn get(&self, src: Src) -> &Counts {
        match src {
            Src::Bits => &self.bits,
            Src::Freq => &self.freq,
            Src::Symbol(j) => &self.symbols[j as usize - 1],
        }
    }
}

// ---------------------------------------------------------------------------
// stream sweeps shared by criteria 1 and 6

#[derive(Debug, Clone, Copy)]
struct StreamCase {
    window: usize,
    delta: u64,
    ell: u64,
    len: usize,
    density: f64,
    seed: u64,
}

/// Runs every approximate stream query at every position; `at_wrap` also
/// receives the tally of positions `t ≡ 0, 1 (mod window)`.
fn stream_sweep(c: StreamCase, tally: &mut Tally, mut at_wrap: Option<&mut Tally>, exact: bool) {
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let mut bsa = BinaryStreamApprox::new(c.window, c.delta).unwrap();
    let mut bse = BinaryStreamExact::new(c.window).unwrap();
    let mut sk = SsaSketch::new(c.window, c.ell, c.delta).ok();
    let mut ise = IntStreamExact::new(c.window, c.ell).unwrap();
    let mut bin_shadow = ShadowStream::new(c.window);
    let mut int_shadow = ShadowStream::new(c.window);
    let burst = c.len / 3..c.len / 3 + c.window;
    for t in 1..=c.len {
        let bit = if burst.contains(&t) { true } else { rng.gen_bool(c.density) };
        let x = if rng.gen_bool(c.density) { rng.gen_range(1..=c.ell) } else { 0 };
        bsa.push(bit);
        bse.push(bit);
        bin_shadow.push(bit as u64);
        if let Some(s) = sk.as_mut() {
            s.add(x).unwrap();
        }
        ise.push(x).unwrap();
        int_shadow.push(x);

        let wrap = t % c.window <= 1;
        let mut tallies: Vec<&mut Tally> = vec![&mut *tally];
        if wrap {
            if let Some(w) = at_wrap.as_deref_mut() {
                tallies.push(w);
            }
        }
        let bc = window_counts(&bin_shadow);
        let ic = window_counts(&int_shadow);
        let d = c.delta;
        let ctx = |i: u64| move || format!("{c:?} t={t} i={i}");
        // spot-check the fast references against the oracle scans
        if t % 17 == 0 {
            let i = rng.gen_range(1..=bc.len() as u64);
            assert_eq!(bc.reference(Kind::Ss, d, i), stream_reference(Kind::Ss, &bin_shadow, d, i));
            let k = rng.gen_range(1..=bc.total() as u64 + 2);
            assert_eq!(bc.reference(Kind::Iss, d, k), stream_reference(Kind::Iss, &bin_shadow, d, k));
            let k = rng.gen_range(1..=ic.total() as u64 + 2);
            assert_eq!(ic.reference(Kind::Iss, d, k), stream_reference(Kind::Iss, &int_shadow, d, k));
        }
        for tl in tallies.iter_mut() {
            for i in 1..=bc.len() as u64 {
                tl.record("binary-stream.ss_a", Kind::Ss, d, bc.reference(Kind::Ss, d, i), err_u64(bsa.ss_a(i as usize)), ctx(i));
            }
            for k in 1..=bc.total() as u64 {
                tl.record("binary-stream.iss_a", Kind::Iss, d, bc.reference(Kind::Iss, d, k), err_usize(bsa.iss_a(k)), ctx(k));
            }
            if let Some(s) = &sk {
                for i in 1..=ic.len() as u64 {
                    let exact = ic.rank(i as i64) as u64;
                    let ok = s.query(i as usize).map(|e| check_sum_estimate(exact, d, e.twice).0);
                    tl.note("sketch.query", ok == Ok(true), false, || format!("{} S={exact} got {ok:?}", ctx(i)()));
                }
                for k in 1..=ic.total() as u64 {
                    tl.record("sketch.iss_a", Kind::Iss, d, ic.reference(Kind::Iss, d, k), err_usize(s.iss_a(k)), ctx(k));
                }
            }
            if exact {
                for i in 1..=bc.len() as u64 {
                    let want = bc.rank(i as i64);
                    let got = err_u64(bse.ss(i as usize));
                    tl.note("binary-stream-exact.ss", got == Ok(want), false, || format!("{} {got:?} != {want}", ctx(i)()));
                    let want = ic.rank(i as i64);
                    let got = err_u64(ise.ss(i as usize));
                    tl.note("int-stream-exact.ss", got == Ok(want), false, || format!("{} {got:?} != {want}", ctx(i)()));
                }
                for k in 1..=bc.total() as u64 + 1 {
                    let want = bc.select(k as i64);
                    let got = bse.iss(k).ok().map(|v| v as i64);
                    tl.note("binary-stream-exact.iss", got == want, false, || format!("{} {got:?} != {want:?}", ctx(k)()));
                }
                for k in 1..=ic.total() as u64 + 1 {
                    let want = ic.select(k as i64);
                    let got = ise.iss(k).ok().map(|v| v as i64);
                    tl.note("int-stream-exact.iss", got == want, false, || format!("{} {got:?} != {want:?}", ctx(k)()));
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------

#[test]
fn criterion_1_interval_soundness() {
    let _g = serial();
    let start = Instant::now();
    let mut tally = Tally::default();
    for inst in instances() {
        let data = Data::new(&inst);
        let built = Built::new(&inst, &data);
        let refs = Refs::new(&inst, &data);
        sweep(&inst, &data, &built, |q, answer| {
            let r = refs.get(q.src).reference(q.kind, inst.delta, q.i);
            tally.record(q.name, q.kind, inst.delta, r, answer, || format!("{inst:?} {q:?}"));
        });
        let mut rng = inst.rng(2);
        let lo = (inst.delta as usize).max(2);
        let window = rng.gen_range(lo..=lo + 120);
        let case = StreamCase {
            window,
            delta: inst.delta,
            ell: inst.ell,
            len: 2 * window + rng.gen_range(0..=window),
            density: inst.density.min(0.9),
            seed: rng.gen(),
        };
        stream_sweep(case, &mut tally, None, false);
    }
    say(&format!("criterion 1 detail ({} instances, {:.1}s):", INSTANCES, start.elapsed().as_secs_f64()));
    tally.print();
    let failing = tally.failing();
    let summary = if failing.is_empty() {
        format!("{} queries, 0 violations", tally.checked())
    } else {
        format!("{} queries, {} violations in {}", tally.checked(), tally.violations(), failing.join(", "))
    };
    verdict(1, "interval soundness", failing.is_empty(), &summary);
    assert!(failing.is_empty(), "{summary}");
}

#[test]
fn criterion_2_exact_foundations() {
    let _g = serial();
    let mut tally = Tally::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0xc2);

    // bit vectors, exhaustive
    for n in [0usize, 1, 2, 63, 64, 65, 127, 128, 129, 500, 511, 512, 513, 1000, 2047, 2048] {
        for p in [0.0, 0.01, 0.5, 0.99, 1.0] {
            let bits: Vec<bool> = (0..n).map(|_| rng.gen_bool(p)).collect();
            let ones = bits.iter().filter(|&&b| b).count();
            let plain = PlainBitVector::from_bits(bits.iter().copied());
            let sparse = SparseBitVector::from_bits(bits.iter().copied());
            for (name, bv) in [("plain", &plain as &dyn RankSelect), ("sparse", &sparse as &dyn RankSelect)] {
                let ctx = || format!("{name} n={n} p={p}");
                for i in 0..=n {
                    tally.note("bitvec.rank1", bv.rank1(i).ok() == o_rank(&bits, true, i).ok(), false, ctx);
                    tally.note("bitvec.rank0", bv.rank0(i).ok() == o_rank(&bits, false, i).ok(), false, ctx);
                }
                for k in 1..=ones + 1 {
                    tally.note("bitvec.select1", bv.select1(k).ok() == o_select(&bits, true, k).ok(), false, ctx);
                }
                for k in 1..=n - ones + 1 {
                    tally.note("bitvec.select0", bv.select0(k).ok() == o_select(&bits, false, k).ok(), false, ctx);
                }
                tally.note("bitvec.rank1", bv.rank1(n + 1).is_err(), false, ctx);
            }
        }
    }

    // bit vectors, sampled at 10^6
    let n = 1_000_000;
    for p in [0.001, 0.5] {
        let bits: Vec<bool> = (0..n).map(|_| rng.gen_bool(p)).collect();
        let c = Counts::from_weights(bits.iter().map(|&b| b as u64));
        let z = Counts::from_weights(bits.iter().map(|&b| !b as u64));
        let plain = PlainBitVector::from_bits(bits.iter().copied());
        let sparse = SparseBitVector::from_bits(bits.iter().copied());
        for q in 0..10_000 {
            let i = rng.gen_range(0..=n);
            let k1 = rng.gen_range(1..=c.total() + 1);
            let k0 = rng.gen_range(1..=z.total() + 1);
            if q < 20 {
                assert_eq!(c.rank(i as i64) as usize, o_rank(&bits, true, i).unwrap());
                assert_eq!(c.select(k1).map(|v| v as usize), o_select(&bits, true, k1 as usize).ok());
            }
            for (name, bv) in [("plain", &plain as &dyn RankSelect), ("sparse", &sparse as &dyn RankSelect)] {
                let ctx = || format!("{name} n={n} p={p} i={i}");
                tally.note("bitvec.rank1", bv.rank1(i).ok() == Some(c.rank(i as i64) as usize), false, ctx);
                tally.note("bitvec.select1", bv.select1(k1 as usize).ok().map(|v| v as i64) == c.select(k1), false, ctx);
                tally.note("bitvec.select0", bv.select0(k0 as usize).ok().map(|v| v as i64) == z.select(k0), false, ctx);
            }
        }
    }

    // partial sums
    for n in [0usize, 1, 2, 7, 64, 65, 300, 1024, 2048] {
        for alpha in [1u32, 2, 5, 13, 40] {
            let hi = (1u64 << alpha) - 1;
            let vals: Vec<u64> = (0..n).map(|_| if rng.gen_bool(0.3) { 0 } else { rng.gen_range(0..=hi) }).collect();
            let ps = PartialSums::new(&vals, alpha).unwrap();
            let ctx = || format!("psum n={n} alpha={alpha}");
            for i in 0..=n + 1 {
                tally.note("psum.sum", ps.sum(i).ok() == o_sum(&vals, i).ok(), false, ctx);
            }
            let c = Counts::from_weights(vals.iter().copied());
            let mut xs: Vec<u64> = (0..=n).flat_map(|i| {
                let p = c.0[i] as u64;
                [p.saturating_sub(1), p, p + 1]
            }).collect();
            if c.total() <= 4096 {
                xs.extend(0..=c.total() as u64 + 1);
            }
            for x in xs {
                tally.note("psum.search", ps.search(x).ok() == o_search(&vals, x).ok(), false, ctx);
            }
        }
    }
    {
        let n = 1_000_000;
        let vals: Vec<u64> = (0..n).map(|_| rng.gen_range(0..=255)).collect();
        let ps = PartialSums::new(&vals, 8).unwrap();
        let c = Counts::from_weights(vals.iter().copied());
        for q in 0..10_000 {
            let i = rng.gen_range(0..=n);
            let x = rng.gen_range(0..=c.total() as u64);
            // search(x) is the smallest i with sum(i) > x
            let want = c.select(x as i64 + 1).map(|v| v as usize);
            if q < 10 {
                assert_eq!(want, o_search(&vals, x).ok());
                assert_eq!(c.rank(i as i64) as u64, o_sum(&vals, i).unwrap());
            }
            tally.note("psum.sum", ps.sum(i).ok() == Some(c.rank(i as i64) as u64), false, || format!("i={i}"));
            tally.note("psum.search", ps.search(x).ok() == want, false, || format!("x={x}"));
        }
    }

    // exact streams, exhaustive
    for window in [1usize, 2, 3, 5, 64, 65, 100, 257, 1000, 2048] {
        let case = StreamCase { window, delta: 1, ell: 5, len: 3 * window + 3, density: 0.5, seed: window as u64 };
        let mut sub = Tally::default();
        stream_sweep(case, &mut sub, None, true);
        for (name, c) in sub.0 {
            if name.contains("exact") {
                let e = tally.0.entry(name).or_default();
                e.checked += c.checked;
                e.violations += c.violations;
                if e.example.is_none() {
                    e.example = c.example;
                }
            }
        }
    }
    // and the brute-force scans agree with the fast stream reference
    {
        let mut sh = ShadowStream::new(37);
        for t in 0..120u64 {
            sh.push(t * 7 % 4);
            let c = window_counts(&sh);
            for i in 1..=c.len() {
                assert_eq!(o_ss(&sh.hist, 37, i).unwrap() as i64, c.rank(i as i64));
            }
            for k in 1..=c.total() as u64 + 1 {
                assert_eq!(o_iss(&sh.hist, 37, k).ok().map(|v| v as i64), c.select(k as i64));
            }
        }
    }

    // exact streams, sampled at 10^6
    {
        let n = 1_000_000usize;
        let len = 2 * n + n / 2;
        let mut bse = BinaryStreamExact::new(n).unwrap();
        let mut ise = IntStreamExact::new(n, 100).unwrap();
        let mut bp = vec![0i64];
        let mut ip = vec![0i64];
        let mut stops: Vec<usize> = (0..100).map(|_| rng.gen_range(1..=len)).collect();
        stops.sort_unstable();
        let mut next = 0;
        for t in 1..=len {
            let b = rng.gen_bool(0.3);
            let x = rng.gen_range(0..=100u64);
            bse.push(b);
            ise.push(x).unwrap();
            bp.push(bp[t - 1] + b as i64);
            ip.push(ip[t - 1] + x as i64);
            while next < stops.len() && stops[next] == t {
                next += 1;
                let w = t.min(n);
                let ss = |p: &[i64], i: usize| p[t] - p[t - i];
                // smallest i ≤ w with ss(i) ≥ k
                let iss = |p: &[i64], k: i64| {
                    let x = p[..=t].partition_point(|&v| v <= p[t] - k);
                    (x > 0 && t - (x - 1) <= w).then(|| (t - (x - 1)) as i64)
                };
                for _ in 0..100 {
                    let i = rng.gen_range(1..=w);
                    let ctx = || format!("t={t} i={i}");
                    tally.note("binary-stream-exact.ss", bse.ss(i).ok() == Some(ss(&bp, i) as u64), false, ctx);
                    tally.note("int-stream-exact.ss", ise.ss(i).ok() == Some(ss(&ip, i) as u64), false, ctx);
                    let k = rng.gen_range(1..=ss(&bp, w) + 1);
                    tally.note("binary-stream-exact.iss", bse.iss(k as u64).ok().map(|v| v as i64) == iss(&bp, k), false, ctx);
                    let k = rng.gen_range(1..=ss(&ip, w) + 1);
                    tally.note("int-stream-exact.iss", ise.iss(k as u64).ok().map(|v| v as i64) == iss(&ip, k), false, ctx);
                }
            }
        }
    }

    say("criterion 2 detail:");
    tally.print();
    let pass = tally.violations() == 0;
    verdict(2, "exact foundations", pass, &format!("{} queries, {} mismatches", tally.checked(), tally.violations()));
    assert!(pass);
}

#[test]
fn criterion_3_sketch_envelope() {
    let _g = serial();
    let start = Instant::now();
    let mut cells = 0;
    let mut checked = 0u64;
    let mut bad: Vec<String> = Vec::new();
    for ell in [1u64, 5, 255] {
        for n in [64usize, 1024, 65536] {
            // µ = δ/ℓ below, at and above 1; µ < 1 does not exist for ℓ = 1
            let mut deltas = vec![ell / 2, ell, 4 * ell];
            if n <= 1024 {
                deltas.extend([2 * ell + 1, ell * n as u64 / 3, ell * n as u64]);
            }
            deltas.retain(|&d| d >= 1 && d <= ell * n as u64);
            deltas.sort_unstable();
            deltas.dedup();
            for delta in deltas {
                cells += 1;
                let mut rng = ChaCha8Rng::seed_from_u64(ell * 1_000_003 + n as u64 * 31 + delta);
                let mut s = SsaSketch::new(n, ell, delta).unwrap();
                let len = if n > 1024 { n + n / 16 } else { 3 * n };
                // at the largest window a full sweep at every t is out of budget:
                // sweep warm-up, the run-up to the first wrap, everything after it,
                // and every 16th position in between
                let swept = |t: usize| n <= 1024 || t <= 4096 || t + 64 >= n || t % 16 == 0;
                let mut hist: Vec<u64> = Vec::with_capacity(len);
                let mut cell_bad = 0u64;
                let density = [0.1, 0.6, 1.0][(delta % 3) as usize];
                for t in 1..=len {
                    let x = if rng.gen_bool(density) { rng.gen_range(1..=ell) } else { 0 };
                    s.add(x).unwrap();
                    hist.push(x);
                    if !swept(t) {
                        continue;
                    }
                    let w = s.window_len();
                    let o = s.chunk_offset() as usize;
                    let mut exact = 0u64;
                    for i in 1..=w {
                        exact += hist[t - i];
                        let e = s.query(i).unwrap();
                        let (sound, envelope) = check_sum_estimate(exact, delta, e.twice);
                        // past the unflushed suffix the query reaches a completed chunk
                        let crosses = i > o;
                        checked += 1;
                        if !sound || (crosses && !envelope) {
                            cell_bad += 1;
                            if bad.len() < 10 {
                                bad.push(format!("ℓ={ell} n={n} δ={delta} t={t} i={i}: S={exact} Ŝ={e}"));
                            }
                        }
                    }
                }
                let mu = delta as f64 / ell as f64;
                say(&format!(
                    "  ℓ={ell:<3} n={n:<5} δ={delta:<6} µ={mu:<8.3} exact_mode={:<5} violations={cell_bad}",
                    s.params().is_exact()
                ));
            }
        }
    }
    for b in &bad {
        say(&format!("  violation: {b}"));
    }
    let pass = bad.is_empty();
    verdict(
        3,
        "sketch error envelope",
        pass,
        &format!("{cells} cells, {checked} estimates, {:.0}s", start.elapsed().as_secs_f64()),
    );
    assert!(pass);
}

#[test]
fn criterion_4_space_ratios() {
    let _g = serial();
    let n: usize = 1 << 20;
    let nf = n as f64;
    let lg_n = (nf.log2()).ceil();
    let mut rng = ChaCha8Rng::seed_from_u64(0xc4);
    let bits: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    let mut rows: Vec<(String, f64, f64, bool)> = Vec::new();
    let mut row = |name: String, measured: u64, limit: f64| {
        let ratio = measured as f64 / limit;
        rows.push((name, measured as f64, limit, measured as f64 <= limit));
        ratio
    };

    let plain = PlainBitVector::from_bits(bits.iter().copied());
    row("plain ≤ 1.25n".into(), plain.space_bits(), 1.25 * nf);

    let delta = 64u64;
    let blocks = n.div_ceil(delta as usize) as f64;
    let drs = DRankSelectA::new(&bits, delta, Backing::Auto).unwrap();
    row("drank-select δ=64 ≤ 1.5⌈n/δ⌉".into(), drs.space_bits(), 1.5 * blocks);
    let rds = RankDSelectA::new(&bits, delta).unwrap();
    row("rank-dselect δ=64 ≤ 1.5⌈n/δ⌉⌈lg(δ+1)⌉".into(), rds.space_bits(), 1.5 * blocks * ((delta + 1) as f64).log2().ceil());

    let mut bsa = BinaryStreamApprox::new(n, delta).unwrap();
    for _ in 0..n + n / 2 {
        bsa.push(rng.gen_bool(0.5));
    }
    row("binary-stream δ=64 ≤ 1.5⌈n/δ⌉+64⌈lg n⌉".into(), bsa.space_bits(), 1.5 * blocks + 64.0 * lg_n);

    for ell in [1u64, 5, 255] {
        for delta in [ell / 2, ell, 4 * ell, 64 * ell] {
            if delta == 0 {
                continue;
            }
            let mut s = SsaSketch::new(n, ell, delta).unwrap();
            for _ in 0..n + n / 2 {
                s.add(rng.gen_range(0..=ell)).unwrap();
            }
            let f = sketch_formula(n as u64, delta, ell);
            row(format!("sketch ℓ={ell} δ={delta} ≤ 2·formula (exact mode: {})", s.params().is_exact()), s.space_bits(), 2.0 * f);
        }
    }

    say("criterion 4 detail (n = 2^20):");
    for (name, measured, limit, ok) in &rows {
        say(&format!("  {name:<58} measured={measured:<9} limit={limit:<11.1} ratio={:.3} {}", measured / limit, if *ok { "ok" } else { "over" }));
    }
    say(&format!(
        "  lower-bound formulas (reported only): drank δ=64 {:.0}, rank δ=64 {:.0}, bounded ℓ=1 δ=64 {:.0}, bounded ℓ=5 δ=5 {:.0}",
        drank_lower(n as u64, 64),
        rank_lower(n as u64, 64),
        bounded_lower(n as u64, 64, 1),
        bounded_lower(n as u64, 5, 5)
    ));
    let over: Vec<&str> = rows.iter().filter(|r| !r.3).map(|r| r.0.as_str()).collect();
    let pass = over.is_empty();
    let summary = if pass { format!("{} bounds met", rows.len()) } else { format!("over: {}", over.join("; ")) };
    verdict(4, "space ratios", pass, &summary);
    assert!(pass, "{summary}");
}

/// Median-of-batches latency in nanoseconds per operation.
fn p50_ns(mut op: impl FnMut(usize) -> u64, count: usize) -> f64 {
    const BATCH: usize = 32;
    let mut samples = Vec::with_capacity(count / BATCH);
    let mut sink = 0u64;
    for b in 0..count / BATCH {
        let t0 = Instant::now();
        for j in 0..BATCH {
            sink = sink.wrapping_add(op(b * BATCH + j));
        }
        samples.push(t0.elapsed().as_nanos() as f64 / BATCH as f64);
    }
    black_box(sink);
    samples.sort_by(f64::total_cmp);
    samples[samples.len() / 2]
}

fn latencies(n: usize, seed: u64) -> BTreeMap<&'static str, f64> {
    const Q: usize = 1 << 16;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = BTreeMap::new();
    let delta = 64u64;
    let bits: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    let ones = bits.iter().filter(|&&b| b).count();
    let pos: Vec<usize> = (0..Q).map(|_| rng.gen_range(1..=n)).collect();
    let ranks: Vec<usize> = (0..Q).map(|_| rng.gen_range(1..=ones)).collect();
    {
        let s = DRankSelectA::new(&bits, delta, Backing::Auto).unwrap();
        out.insert("drank_a", p50_ns(|q| s.drank_a(pos[q]).unwrap() as u64, Q));
        out.insert("select_a", p50_ns(|q| s.select_a(ranks[q]).unwrap() as u64, Q));
    }
    {
        let s = RankDSelectA::new(&bits, delta).unwrap();
        out.insert("rank_a", p50_ns(|q| s.rank_a(pos[q]).unwrap() as u64, Q));
    }
    drop(bits);
    {
        let mut s = BinaryStreamApprox::new(n, delta).unwrap();
        for _ in 0..n + n / 3 {
            s.push(rng.gen_bool(0.5));
        }
        out.insert("ss_a", p50_ns(|q| s.ss_a(pos[q]).unwrap(), Q));
        let feed: Vec<bool> = (0..Q).map(|_| rng.gen_bool(0.5)).collect();
        out.insert("push", p50_ns(|q| {
            s.push(feed[q]);
            0
        }, Q));
    }
    {
        let ell = 5;
        let mut s = SsaSketch::new(n, ell, 4 * ell).unwrap();
        for _ in 0..n + n / 3 {
            s.add(rng.gen_range(0..=ell)).unwrap();
        }
        out.insert("sketch_query", p50_ns(|q| s.query(pos[q]).unwrap().twice as u64, Q));
        let feed: Vec<u64> = (0..Q).map(|_| rng.gen_range(0..=ell)).collect();
        out.insert("add", p50_ns(|q| {
            s.add(feed[q]).unwrap();
            0
        }, Q));
    }
    out
}

#[test]
fn criterion_5_constant_time() {
    let _g = serial();
    const SEED: u64 = 0xc5;
    let (small, large) = (1usize << 20, 1usize << 24);
    let mut runs: BTreeMap<&'static str, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for rep in 0..3 {
        for (n, big) in [(small, false), (large, true)] {
            for (op, ns) in latencies(n, SEED + rep) {
                let e = runs.entry(op).or_default();
                if big { e.1.push(ns) } else { e.0.push(ns) }
            }
        }
    }
    let median = |v: &mut Vec<f64>| {
        v.sort_by(f64::total_cmp);
        v[v.len() / 2]
    };
    say("criterion 5 detail (p50 ns per op, median of 3 repetitions):");
    let mut worst: (f64, &str) = (0.0, "");
    for (op, (a, b)) in runs.iter_mut() {
        let (a, b) = (median(a), median(b));
        let ratio = b / a;
        say(&format!("  {op:<13} n=2^20 {a:>8.1}  n=2^24 {b:>8.1}  ratio {ratio:.3}"));
        if ratio > worst.0 {
            worst = (ratio, op);
        }
    }
    let pass = worst.0 <= 2.0;
    verdict(5, "constant-time behaviour", pass, &format!("worst ratio {:.3} ({})", worst.0, worst.1));
    assert!(pass);
}

#[test]
fn criterion_6_frame_wrap() {
    let _g = serial();
    let mut all = Tally::default();
    let mut wrap = Tally::default();
    let mut seed = 0xc6;
    for window in [1usize, 2, 7, 64, 100, 256] {
        for delta in [1u64, 3, 8] {
            if delta as usize > window {
                continue;
            }
            for ell in [1u64, 5] {
                seed += 1;
                let case = StreamCase { window, delta, ell, len: 10 * window, density: 0.5, seed };
                stream_sweep(case, &mut all, Some(&mut wrap), true);
            }
        }
    }
    say("criterion 6 detail, wrap positions t ≡ 0, 1 (mod n):");
    wrap.print();
    say("criterion 6 detail, all positions:");
    all.print();
    let failing = wrap.failing();
    let pass = failing.is_empty();
    let summary = if pass {
        format!("{} queries at wrap positions, {} overall, 0 violations", wrap.checked(), all.checked())
    } else {
        format!("{} violations at wrap positions in {}", wrap.violations(), failing.join(", "))
    };
    verdict(6, "frame wrap", pass, &summary);
    assert!(pass, "{summary}");
}

#[test]
fn criterion_7_serialization_round_trip() {
    let _g = serial();
    let mut compared = 0u64;
    let mut differ = 0u64;
    for inst in instances() {
        let data = Data::new(&inst);
        let built = Built::new(&inst, &data);
        let reloaded = built.reload();
        let mut before = Vec::new();
        sweep(&inst, &data, &built, |_, a| before.push(a));
        let mut k = 0;
        sweep(&inst, &data, &reloaded, |q, a| {
            compared += 1;
            if before[k] != a {
                differ += 1;
                if differ <= 5 {
                    say(&format!("  differs: {inst:?} {q:?}: {:?} vs {a:?}", before[k]));
                }
            }
            k += 1;
        });
        assert_eq!(k, before.len());
    }
    let pass = differ == 0;
    verdict(7, "serialization round trip", pass, &format!("{compared} answers compared, {differ} differ"));
    assert!(pass);
}
