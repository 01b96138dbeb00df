//! `approxrs`: build, query, benchmark and audit approximate rank/select
//! structures, and simulate sliding-window streams.
//!
//! Exit codes: 0 success, 1 I/O or other failure, 2 invalid input or
//! parameters, 3 range or not-found error in a scripted query (unless
//! `--lenient`), 4 an answer failed `--verify`.

mod bench;
mod input;
mod sim;
mod structure;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use approxrs::approx_bits::Backing;
use approxrs::{AuditParams, Error, SpaceAuditReport, StructureKind};
use clap::{Args, Parser, Subcommand};

use structure::{BuildOpts, InputOpts, Structure};

#[derive(Parser)]
#[command(name = "approxrs", version, about = "Approximate rank/select structures and sliding-window sums")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a structure from an input file and serialize it.
    Build(BuildArgs),
    /// Run a query script against a serialized structure.
    Query(QueryArgs),
    /// Time build, queries and updates over a parameter grid.
    Bench(BenchArgs),
    /// Compare measured space with closed-form bounds.
    Audit(AuditArgs),
    /// Feed a stream through a window structure and answer queries as it arrives.
    StreamSim(SimArgs),
}

#[derive(Args)]
struct SourceArgs {
    /// Input file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Input format: raw, text or sparse for bits; bytes or ints for sequences.
    #[arg(long)]
    format: Option<String>,
    /// Bit-string length for sparse input, universe size for multisets.
    #[arg(long)]
    n: Option<u64>,
    /// Alphabet size for sequences.
    #[arg(long)]
    sigma: Option<u32>,
}

impl SourceArgs {
    fn opts(&self) -> InputOpts<'_> {
        InputOpts { format: self.format.as_deref(), n: self.n, sigma: self.sigma }
    }
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    kind: String,
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long)]
    delta: Option<u64>,
    /// Frequency cap for multiset-bounded (defaults to the largest frequency).
    #[arg(long)]
    ell: Option<u64>,
    /// Marker storage for drank-select: auto, plain or sparse.
    #[arg(long, default_value = "auto")]
    backing: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct QueryArgs {
    /// Serialized structure.
    #[arg(long)]
    structure: PathBuf,
    /// One `op arg [arg]` per line.
    #[arg(long)]
    script: PathBuf,
    /// Check every answer against a brute-force oracle over the original input.
    #[arg(long)]
    verify: bool,
    #[command(flatten)]
    source: SourceArgs,
    /// Report range and not-found errors in the CSV instead of stopping.
    #[arg(long)]
    lenient: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated kinds.
    #[arg(long, value_delimiter = ',')]
    kind: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "65536")]
    n: Vec<u64>,
    #[arg(long, value_delimiter = ',', default_value = "64")]
    delta: Vec<u64>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    ell: Vec<u64>,
    #[arg(long, default_value_t = 4)]
    sigma: u32,
    #[arg(long, default_value_t = 1)]
    reps: u32,
    /// Queries timed per cell and operation.
    #[arg(long, default_value_t = 100_000)]
    queries: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AuditArgs {
    /// Kind for formula mode; taken from the file when --structure is given.
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    structure: Option<PathBuf>,
    #[arg(long)]
    n: Option<u64>,
    /// Ones of a bit-string or items of a multiset.
    #[arg(long)]
    m: Option<u64>,
    #[arg(long)]
    delta: Option<u64>,
    #[arg(long)]
    ell: Option<u64>,
    #[arg(long)]
    sigma: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimArgs {
    /// binary (approximate), binary-exact, int (sketch) or int-exact.
    #[arg(long)]
    kind: String,
    /// Window length.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    delta: Option<u64>,
    #[arg(long)]
    ell: Option<u64>,
    /// Stream values, one per line, or a raw bit file with --format raw.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "lines")]
    format: String,
    /// `[@T] op arg` lines; defaults to every valid main query after every arrival.
    #[arg(long)]
    script: Option<PathBuf>,
    /// Exit with status 4 if any answer breaks its contract.
    #[arg(long)]
    verify: bool,
    #[arg(long)]
    lenient: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// An answer failed `--verify`.
#[derive(Debug)]
struct VerifyFailed(u64);

impl std::fmt::Display for VerifyFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} answer(s) failed verification", self.0)
    }
}

impl std::error::Error for VerifyFailed {}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<VerifyFailed>().is_some() {
        return 4;
    }
    match e.downcast_ref::<Error>() {
        Some(Error::Range { .. } | Error::NotFound { .. }) => 3,
        Some(_) => 2,
        None => 1,
    }
}

fn parse_kind(s: &str) -> Result<StructureKind> {
    Ok(match s {
        "binary" => StructureKind::BinaryStream,
        "binary-exact" => StructureKind::BinaryStreamExact,
        "int" => StructureKind::Sketch,
        "int-exact" => StructureKind::IntStream,
        _ => s.parse()?,
    })
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_audit(out: &mut dyn Write, reports: &[SpaceAuditReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SpaceAuditReport::CSV_HEADER)?;
    for r in reports {
        w.write_record(r.csv_record())?;
    }
    w.flush()?;
    Ok(())
}

fn required<'a>(p: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    p.as_deref().ok_or_else(|| Error::Param(format!("--{flag} is required")).into())
}

fn cmd_build(a: &BuildArgs) -> Result<()> {
    let kind = parse_kind(&a.kind)?;
    let src = structure::load_source(kind, required(&a.source.input, "input")?, a.source.opts())?;
    let backing = match a.backing.as_str() {
        "auto" => Backing::Auto,
        "plain" => Backing::Plain,
        "sparse" => Backing::Sparse,
        b => bail!(Error::Param(format!("unknown backing {b:?}"))),
    };
    let s = Structure::build(kind, &src, BuildOpts { delta: a.delta, ell: a.ell, backing })?;
    std::fs::write(&a.out, s.to_bytes()).with_context(|| format!("writing {}", a.out.display()))?;
    let report = SpaceAuditReport::measured(kind, s.audit_params(), s.space_bits());
    write_audit(&mut *output(None)?, &[report])
}

fn cmd_query(a: &QueryArgs) -> Result<()> {
    let s = Structure::from_bytes(&input::read_bytes(&a.structure)?)?;
    let two_args = s.kind() == StructureKind::Sequence;
    let script = structure::parse_script(&input::read_text(&a.script)?, two_args)?;
    let src = if a.verify {
        Some(structure::load_source(s.kind(), required(&a.source.input, "input")?, a.source.opts())?)
    } else {
        None
    };
    let mut out = output(a.out.as_deref())?;
    let mut w = csv::Writer::from_writer(&mut out);
    let mut header = vec!["line", "op", "args", "answer", "error"];
    if a.verify {
        header.extend(["in_interval", "detail"]);
    }
    w.write_record(&header)?;
    let mut failures = 0u64;
    for q in &script {
        let outcome = s.query(q);
        let args = q.args.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
        let (answer, error) = match &outcome {
            Ok(v) => (v.to_string(), String::new()),
            Err(e) => (String::new(), e.to_string()),
        };
        let mut row = vec![q.line.to_string(), q.op.name().to_string(), args, answer, error];
        if let Some(src) = &src {
            let (ok, detail) = s.verify(src, q, &outcome);
            failures += !ok as u64;
            row.extend([ok.to_string(), detail]);
        }
        w.write_record(&row)?;
        if let Err(e) = outcome {
            let stop = !a.lenient || matches!(e, Error::Validation(_));
            if stop {
                w.flush()?;
                return Err(e.into());
            }
        }
    }
    w.flush()?;
    drop(w);
    out.flush()?;
    if failures > 0 {
        bail!(VerifyFailed(failures));
    }
    Ok(())
}

fn cmd_bench(a: &BenchArgs) -> Result<()> {
    if a.kind.is_empty() || a.n.is_empty() || a.delta.is_empty() || a.ell.is_empty() {
        bail!(Error::Param("bench grids must be non-empty".into()));
    }
    let mut cells = Vec::new();
    for k in &a.kind {
        let kind = parse_kind(k)?;
        for &n in &a.n {
            for &delta in &a.delta {
                for &ell in &a.ell {
                    for rep in 0..a.reps {
                        cells.push(bench::Cell { kind, n, delta, ell, sigma: a.sigma, rep });
                    }
                }
            }
        }
    }
    let rows = bench::run(&cells, a.seed, a.queries)?;
    let mut out = output(a.out.as_deref())?;
    let mut w = csv::Writer::from_writer(&mut out);
    w.write_record(bench::HEADER)?;
    for r in &rows {
        w.write_record(r.record())?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_audit(a: &AuditArgs) -> Result<()> {
    let report = match &a.structure {
        Some(path) => {
            let s = Structure::from_bytes(&input::read_bytes(path)?)?;
            SpaceAuditReport::measured(s.kind(), s.audit_params(), s.space_bits())
        }
        None => {
            let kind = parse_kind(a.kind.as_deref().ok_or_else(|| Error::Param("--kind or --structure is required".into()))?)?;
            let p = AuditParams {
                n: a.n.ok_or_else(|| Error::Param("formula mode needs --n".into()))?,
                m: a.m.unwrap_or(0),
                delta: a.delta.unwrap_or(1),
                ell: a.ell.unwrap_or(1),
                sigma: a.sigma.unwrap_or(0),
            };
            SpaceAuditReport::formulas(kind, p)
        }
    };
    write_audit(&mut *output(a.out.as_deref())?, &[report])
}

fn cmd_stream_sim(a: &SimArgs) -> Result<()> {
    let kind = parse_kind(&a.kind)?;
    let stream: Vec<u64> = match a.format.as_str() {
        "lines" => input::parse_ints(&input::read_text(&a.input)?)?,
        "raw" => input::parse_raw_bits(&input::read_bytes(&a.input)?)?.into_iter().map(u64::from).collect(),
        f => bail!(Error::Param(format!("unknown stream format {f:?} (lines, raw)"))),
    };
    let sim = sim::Sim::new(kind, a.n, a.delta, a.ell)?;
    let script = match &a.script {
        Some(p) => sim::parse_sim_script(&input::read_text(p)?)?,
        None => sim::default_script(&sim),
    };
    let mut out = output(a.out.as_deref())?;
    let report = sim::run(sim, a.n, &stream, &script, a.lenient, &mut out)?;
    out.flush()?;
    if a.verify && report.violations > 0 {
        bail!(VerifyFailed(report.violations));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Query(a) => cmd_query(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Audit(a) => cmd_audit(a),
        Command::StreamSim(a) => cmd_stream_sim(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
