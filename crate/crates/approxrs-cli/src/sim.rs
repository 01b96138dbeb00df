//! `stream-sim`: feed a stream through a window structure and answer a
//! query script after each arrival, next to a full-history shadow copy.

use std::io::Write;

use anyhow::{bail, Result};
use approxrs::oracle::{check_sum_estimate, stream_reference, validate_interval, Kind, ShadowStream};
use approxrs::{BinaryStreamApprox, BinaryStreamExact, Error, IntStreamExact, SsaSketch, StructureKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimOp {
    Ss,
    Iss,
    SsA,
    IssA,
}

impl SimOp {
    fn parse(s: &str) -> Option<SimOp> {
        Some(match s {
            "ss" => SimOp::Ss,
            "iss" => SimOp::Iss,
            "ssa" | "ss_a" | "query" => SimOp::SsA,
            "issa" | "iss_a" => SimOp::IssA,
            _ => return None,
        })
    }

    fn name(&self) -> &'static str {
        match self {
            SimOp::Ss => "ss",
            SimOp::Iss => "iss",
            SimOp::SsA => "ssa",
            SimOp::IssA => "issa",
        }
    }

    fn is_sum(&self) -> bool {
        matches!(self, SimOp::Ss | SimOp::SsA)
    }
}

/// One script entry: `[@T] op arg`, where `arg` is a number or `*` for
/// every valid argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimQuery {
    pub at: Option<u64>,
    pub op: SimOp,
    pub arg: Option<u64>,
}

pub fn parse_sim_script(text: &str) -> Result<Vec<SimQuery>> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let bad = |what: &str| Error::Validation(format!("line {line}: {what}"));
        let mut toks: Vec<&str> = l.split_whitespace().collect();
        let mut at = None;
        if let Some(t) = toks.first().and_then(|t| t.strip_prefix('@')) {
            at = Some(t.parse::<u64>().map_err(|_| bad("bad time after @"))?);
            toks.remove(0);
        }
        let [name, arg] = toks[..] else { bail!(bad("expected \"[@T] op arg\"")) };
        let op = SimOp::parse(name).ok_or_else(|| bad(&format!("unknown operation {name:?}")))?;
        let arg = if arg == "*" { None } else { Some(arg.parse::<u64>().map_err(|_| bad("bad argument"))?) };
        out.push(SimQuery { at, op, arg });
    }
    Ok(out)
}

pub enum Sim {
    Binary(BinaryStreamApprox),
    BinaryExact(BinaryStreamExact),
    Int(IntStreamExact),
    Sketch(SsaSketch),
}

impl Sim {
    pub fn new(kind: StructureKind, n: usize, delta: Option<u64>, ell: Option<u64>) -> Result<Sim> {
        let need = |v: Option<u64>, f: &str| v.ok_or_else(|| Error::Param(format!("{kind} needs --{f}")));
        Ok(match kind {
            StructureKind::BinaryStream => Sim::Binary(BinaryStreamApprox::new(n, need(delta, "delta")?)?),
            StructureKind::BinaryStreamExact => Sim::BinaryExact(BinaryStreamExact::new(n)?),
            StructureKind::IntStream => Sim::Int(IntStreamExact::new(n, need(ell, "ell")?)?),
            StructureKind::Sketch => Sim::Sketch(SsaSketch::new(n, need(ell, "ell")?, need(delta, "delta")?)?),
            k => bail!(Error::Param(format!("{k} is not a stream kind"))),
        })
    }

    fn push(&mut self, x: u64) -> Result<()> {
        match self {
            Sim::Binary(_) | Sim::BinaryExact(_) if x > 1 => {
                bail!(Error::Validation(format!("value {x} in a binary stream")))
            }
            Sim::Binary(s) => s.push(x == 1),
            Sim::BinaryExact(s) => s.push(x == 1),
            Sim::Int(s) => s.push(x)?,
            Sim::Sketch(s) => s.add(x)?,
        }
        Ok(())
    }

    fn supports(&self, op: SimOp) -> bool {
        match self {
            Sim::Binary(_) => matches!(op, SimOp::SsA | SimOp::IssA),
            Sim::BinaryExact(_) | Sim::Int(_) => matches!(op, SimOp::Ss | SimOp::Iss),
            Sim::Sketch(_) => op == SimOp::SsA,
        }
    }

    fn delta(&self) -> u64 {
        match self {
            Sim::Binary(s) => s.delta(),
            Sim::Sketch(s) => s.delta(),
            _ => 1,
        }
    }

    fn answer(&self, op: SimOp, i: u64) -> std::result::Result<u64, Error> {
        match (self, op) {
            (Sim::Binary(s), SimOp::SsA) => s.ss_a(i as usize),
            (Sim::Binary(s), SimOp::IssA) => s.iss_a(i).map(|r| r as u64),
            (Sim::BinaryExact(s), SimOp::Ss) => s.ss(i as usize),
            (Sim::BinaryExact(s), SimOp::Iss) => s.iss(i).map(|r| r as u64),
            (Sim::Int(s), SimOp::Ss) => s.ss(i as usize),
            (Sim::Int(s), SimOp::Iss) => s.iss(i).map(|r| r as u64),
            _ => unreachable!("checked by supports"),
        }
    }
}

pub struct SimReport {
    pub rows: u64,
    pub violations: u64,
    pub errors: u64,
}

/// Default script: every valid argument of the structure's main query
/// after every arrival.
pub fn default_script(sim: &Sim) -> Vec<SimQuery> {
    let op = match sim {
        Sim::Binary(_) | Sim::Sketch(_) => SimOp::SsA,
        _ => SimOp::Ss,
    };
    vec![SimQuery { at: None, op, arg: None }]
}

pub fn run(
    mut sim: Sim,
    n: usize,
    stream: &[u64],
    script: &[SimQuery],
    lenient: bool,
    out: &mut dyn Write,
) -> Result<SimReport> {
    if let Some(q) = script.iter().find(|q| !sim.supports(q.op)) {
        bail!(Error::Validation(format!("operation {} not available for this stream kind", q.op.name())));
    }
    let sketch = matches!(sim, Sim::Sketch(_));
    let mut w = csv::Writer::from_writer(out);
    if sketch {
        w.write_record(["t", "i", "estimate_num", "estimate_den", "true_sum", "in_envelope"])?;
    } else {
        w.write_record(["t", "op", "i", "answer", "truth", "in_interval", "error"])?;
    }
    let delta = sim.delta();
    let mut shadow = ShadowStream::new(n);
    let mut report = SimReport { rows: 0, violations: 0, errors: 0 };
    for (k, &x) in stream.iter().enumerate() {
        let t = k as u64 + 1;
        sim.push(x)?;
        shadow.push(x);
        let active: Vec<&SimQuery> = script.iter().filter(|q| q.at.is_none_or(|a| a == t)).collect();
        if active.is_empty() {
            continue;
        }
        let window = shadow.window_len() as u64;
        let sums = shadow.suffix_sums();
        let total = sums.last().copied().unwrap_or(0);
        for q in active {
            let args: Vec<u64> = match q.arg {
                Some(a) => vec![a],
                None if q.op.is_sum() => (1..=window).collect(),
                None => (1..=total).collect(),
            };
            for i in args {
                report.rows += 1;
                if let Sim::Sketch(s) = &sim {
                    match s.query(i as usize) {
                        Ok(e) => {
                            let exact = sums[i as usize - 1];
                            let (sound, envelope) = check_sum_estimate(exact, delta, e.twice);
                            report.violations += !sound as u64;
                            w.write_record([
                                t.to_string(),
                                i.to_string(),
                                e.numerator().to_string(),
                                e.denominator().to_string(),
                                exact.to_string(),
                                envelope.to_string(),
                            ])?;
                        }
                        Err(e) => {
                            report.errors += 1;
                            w.flush()?;
                            if !lenient {
                                bail!(e);
                            }
                        }
                    }
                    continue;
                }
                let outcome = sim.answer(q.op, i);
                let truth = if q.op.is_sum() {
                    shadow.ss(i as usize).ok()
                } else {
                    shadow.iss(i).ok().map(|v| v as u64)
                };
                let ok = match (&outcome, q.op) {
                    (Ok(a), SimOp::SsA | SimOp::IssA) => {
                        let kind = if q.op == SimOp::SsA { Kind::Ss } else { Kind::Iss };
                        let in_domain = if q.op == SimOp::SsA { i <= window } else { i <= total };
                        in_domain && validate_interval(kind, delta, stream_reference(kind, &shadow, delta, i), *a as i64).ok
                    }
                    (Ok(a), _) => truth == Some(*a),
                    (Err(_), _) => truth.is_none(),
                };
                report.violations += !ok as u64;
                let (answer, error) = match &outcome {
                    Ok(a) => (a.to_string(), String::new()),
                    Err(e) => (String::new(), e.to_string()),
                };
                w.write_record([
                    t.to_string(),
                    q.op.name().to_string(),
                    i.to_string(),
                    answer,
                    truth.map_or(String::new(), |v| v.to_string()),
                    ok.to_string(),
                    error,
                ])?;
                if let Err(e) = outcome {
                    report.errors += 1;
                    if !lenient {
                        w.flush()?;
                        bail!(e);
                    }
                }
            }
        }
    }
    w.flush()?;
    Ok(report)
}
