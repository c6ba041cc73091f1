//! The `gaplab` command line.
//!
//! One-shot commands (`sample`, `spectrum`, `gap`) print CSV on stdout and a
//! JSON summary on stderr (or `--out`). Experiment commands (`scan`, `orbit`,
//! `charvar`, `lps`) write a record file and print its summary line.

pub mod tuple_file;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use gaplab_core::eigen;
use gaplab_core::lab::{self, lps_preset, ramanujan_bound, ExperimentConfig, ExperimentKind, RunOptions};
use gaplab_core::real::{fmt, fmt_csv, json as num};
use gaplab_core::seed::{derived_stream, tag};
use gaplab_core::spectral::{
    inf_max_displacement, lambda1_estimate_with, level_gap_bounds, minmax_gap_estimate, pgap_of,
    DEFAULT_ITERS, DEFAULT_RESTARTS, DEFAULT_THRESHOLD,
};
use gaplab_core::{Error, IrrepLevel, Result, Tuple};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "gaplab", version, about = "Spectral gaps of random SU(2) tuples")]
pub struct Cli {
    /// Worker threads [default: one per core]
    #[arg(long, global = true, env = "GAPLAB_THREADS", hide_env_values = true, value_name = "INT")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw Haar tuples and print them as quaternion rows
    Sample(SampleArgs),
    /// Top eigenvalue of the averaging operator on each level
    Spectrum(SpectrumArgs),
    /// Per-level gap bounds, optionally with the min-max optimizer
    Gap(GapArgs),
    /// Random Nielsen walk from one tuple, recording the gap at each step
    Orbit(OrbitArgs),
    /// Pairs on a commutator-trace level set, with walks along the fiber
    Charvar(CharvarArgs),
    /// Haar sample of tuples with their cutoff spectra
    Scan(ScanArgs),
    /// Per-level spectrum of the three-generator LPS preset
    Lps(LpsArgs),
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Generators per tuple
    #[arg(long, value_name = "INT", default_value_t = 2)]
    pub n: usize,
    /// Number of tuples
    #[arg(long, value_name = "INT")]
    pub count: usize,
    /// Root seed
    #[arg(long, value_name = "U64")]
    pub seed: u64,
}

#[derive(Debug, Args)]
#[group(id = "source", required = true, multiple = false)]
pub struct TupleSource {
    /// Draw a Haar tuple from this seed
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    /// Read the tuple from a file of `w x y z` lines
    #[arg(long, value_name = "PATH")]
    pub tuple_file: Option<PathBuf>,
    /// Use the LPS preset (1+2i)/√5, (1+2j)/√5, (1+2k)/√5
    #[arg(long)]
    pub lps: bool,
}

#[derive(Debug, Args)]
pub struct SummaryOut {
    /// Write the JSON summary here instead of stderr
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub source: TupleSource,
    /// Generators for a Haar tuple [default: 2]; must match a tuple file
    #[arg(long, value_name = "INT")]
    pub n: Option<usize>,
    /// Highest level k
    #[arg(long, value_name = "INT", default_value_t = 40)]
    pub cutoff: usize,
    /// Gap indicator threshold
    #[arg(long, value_name = "REAL", default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
    /// Eigensolver: auto, dense or lanczos
    #[arg(long, value_name = "NAME", default_value = eigen::DEFAULT_SOLVER)]
    pub solver: String,
    #[command(flatten)]
    pub out: SummaryOut,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("levels").required(true).args(["level", "cutoff"])))]
pub struct GapArgs {
    #[command(flatten)]
    pub source: TupleSource,
    /// Generators for a Haar tuple [default: 2]; must match a tuple file
    #[arg(long, value_name = "INT")]
    pub n: Option<usize>,
    /// A single level k
    #[arg(long, value_name = "INT", conflicts_with = "cutoff")]
    pub level: Option<usize>,
    /// Every level k = 1..=cutoff
    #[arg(long, value_name = "INT")]
    pub cutoff: Option<usize>,
    /// Also run the min-max optimizer
    #[arg(long)]
    pub minmax: bool,
    /// Optimizer starts
    #[arg(long, value_name = "INT", default_value_t = DEFAULT_RESTARTS)]
    pub restarts: usize,
    /// Optimizer iterations per start
    #[arg(long, value_name = "INT", default_value_t = DEFAULT_ITERS)]
    pub iters: usize,
    #[command(flatten)]
    pub out: SummaryOut,
}

#[derive(Debug, Args)]
pub struct RecordArgs {
    /// Root seed
    #[arg(long, value_name = "U64")]
    pub seed: u64,
    /// Directory for the record file
    #[arg(long, value_name = "PATH", default_value = ".")]
    pub out_dir: PathBuf,
    /// Continue an interrupted run from its record file
    #[arg(long)]
    pub resume: bool,
    /// Stop after this many rows, leaving the record resumable
    #[arg(long, value_name = "INT")]
    pub stop_after: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Generators per tuple
    #[arg(long, value_name = "INT", default_value_t = 2)]
    pub n: usize,
    /// Highest level k
    #[arg(long, value_name = "INT", default_value_t = 40)]
    pub cutoff: usize,
    /// Number of Haar tuples
    #[arg(long, value_name = "INT", default_value_t = 100)]
    pub samples: usize,
    /// Gap indicator threshold
    #[arg(long, value_name = "REAL", default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
    #[command(flatten)]
    pub record: RecordArgs,
}

#[derive(Debug, Args)]
pub struct OrbitArgs {
    /// Generators per tuple
    #[arg(long, value_name = "INT", default_value_t = 3)]
    pub n: usize,
    /// Walk length (one row per step)
    #[arg(long, value_name = "INT", default_value_t = 1000)]
    pub walk: usize,
    /// Highest level k
    #[arg(long, value_name = "INT", default_value_t = 10)]
    pub cutoff: usize,
    /// Gap indicator threshold
    #[arg(long, value_name = "REAL", default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
    /// Start from the identity tuple instead of a Haar tuple
    #[arg(long)]
    pub identity_start: bool,
    #[command(flatten)]
    pub record: RecordArgs,
}

#[derive(Debug, Args)]
pub struct CharvarArgs {
    /// Commutator trace of the level set, in (-2, 2)
    #[arg(long, value_name = "REAL", default_value_t = 0.0, allow_hyphen_values = true)]
    pub target: f64,
    /// Acceptance half-width around the target
    #[arg(long, value_name = "REAL", default_value_t = 0.05)]
    pub tol: f64,
    /// Accepted pairs (one row each)
    #[arg(long, value_name = "INT", default_value_t = 100)]
    pub samples: usize,
    /// Nielsen walk length from each pair
    #[arg(long, value_name = "INT", default_value_t = 1000)]
    pub walk: usize,
    /// Highest level k
    #[arg(long, value_name = "INT", default_value_t = 10)]
    pub cutoff: usize,
    /// Gap indicator threshold
    #[arg(long, value_name = "REAL", default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
    /// Haar draws allowed per accepted pair
    #[arg(long, value_name = "INT", default_value_t = 10_000_000)]
    pub max_tries: u64,
    #[command(flatten)]
    pub record: RecordArgs,
}

#[derive(Debug, Args)]
pub struct LpsArgs {
    /// Highest level k
    #[arg(long, value_name = "INT", default_value_t = 24)]
    pub cutoff: usize,
    #[command(flatten)]
    pub record: RecordArgs,
}

/// Where output goes; tests substitute buffers.
pub struct Io<'a> {
    pub stdout: &'a mut (dyn Write + Send),
    pub stderr: &'a mut (dyn Write + Send),
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_io() || matches!(e, Error::Json(_)) {
        EXIT_IO
    } else if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_INPUT
    }
}

/// Parses `args` and runs the command, returning the exit status.
pub fn main_with<I, T>(args: I, io: &mut Io<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { io.stderr } else { io.stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match run(&cli, io) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(io.stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    if threads == Some(0) {
        return Err(Error::InvalidInput("--threads must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))
}

pub fn run(cli: &Cli, io: &mut Io<'_>) -> Result<()> {
    let workers = pool(cli.threads)?;
    workers.install(|| match &cli.command {
        Command::Sample(a) => cmd_sample(a, io),
        Command::Spectrum(a) => cmd_spectrum(a, io),
        Command::Gap(a) => cmd_gap(a, io),
        Command::Scan(a) => {
            let mut c = ExperimentConfig::new(ExperimentKind::ZeroOneScan, a.record.seed);
            c.n = a.n;
            c.cutoff = a.cutoff;
            c.samples = a.samples;
            c.threshold = a.threshold;
            cmd_record(c, &a.record, cli.threads, io)
        }
        Command::Orbit(a) => {
            let mut c = ExperimentConfig::new(ExperimentKind::OrbitInvariance, a.record.seed);
            c.n = a.n;
            c.walk_length = a.walk;
            c.cutoff = a.cutoff;
            c.threshold = a.threshold;
            c.identity_start = a.identity_start;
            cmd_record(c, &a.record, cli.threads, io)
        }
        Command::Charvar(a) => {
            let mut c = ExperimentConfig::new(ExperimentKind::LevelSetWalk, a.record.seed);
            c.target = Some(a.target);
            c.tol = Some(a.tol);
            c.samples = a.samples;
            c.walk_length = a.walk;
            c.cutoff = a.cutoff;
            c.threshold = a.threshold;
            c.max_tries = Some(a.max_tries);
            cmd_record(c, &a.record, cli.threads, io)
        }
        Command::Lps(a) => {
            let mut c = ExperimentConfig::new(ExperimentKind::LpsBenchmark, a.record.seed);
            c.cutoff = a.cutoff;
            cmd_record(c, &a.record, cli.threads, io)
        }
    })
}

/// Tuple `index` of the Haar stream rooted at `seed`.
pub fn haar_tuple(seed: u64, n: usize, index: u64) -> Result<Tuple> {
    Tuple::haar(n, &mut derived_stream(seed, tag("sample"), index))
}

fn resolve_tuple(src: &TupleSource, n: Option<usize>) -> Result<(Tuple, &'static str)> {
    let (t, kind) = if let Some(path) = &src.tuple_file {
        (tuple_file::load(path)?, "file")
    } else if src.lps {
        (lps_preset(), "lps")
    } else {
        let seed = src.seed.expect("clap enforces a tuple source");
        (haar_tuple(seed, n.unwrap_or(2), 0)?, "haar")
    };
    if let Some(n) = n {
        if n != t.len() {
            return Err(Error::InvalidInput(format!(
                "--n {n} does not match the {}-generator tuple",
                t.len()
            )));
        }
    }
    Ok((t, kind))
}

fn emit_summary(summary: &Value, out: &SummaryOut, io: &mut Io<'_>) -> Result<()> {
    let line = format!("{summary}\n");
    match &out.out {
        Some(path) => std::fs::write(path, line)?,
        None => io.stderr.write_all(line.as_bytes())?,
    }
    Ok(())
}

fn cmd_sample(a: &SampleArgs, io: &mut Io<'_>) -> Result<()> {
    let mut buf = String::from("tuple,generator,w,x,y,z\n");
    for i in 0..a.count {
        let t = haar_tuple(a.seed, a.n, i as u64)?;
        for (j, g) in t.elements().iter().enumerate() {
            let [w, x, y, z] = g.components();
            buf.push_str(&format!("{i},{},{},{},{},{}\n", j + 1, fmt(w), fmt(x), fmt(y), fmt(z)));
        }
    }
    io.stdout.write_all(buf.as_bytes())?;
    Ok(())
}

fn cmd_spectrum(a: &SpectrumArgs, io: &mut Io<'_>) -> Result<()> {
    let (t, source) = resolve_tuple(&a.source, a.n)?;
    let solver = eigen::solver(&a.solver)?;
    let report = lambda1_estimate_with(&t, a.cutoff, solver)?;
    let mut buf = String::from("k,lambda_max\n");
    for (k, l) in report.levels() {
        buf.push_str(&format!("{k},{}\n", fmt(l)));
    }
    io.stdout.write_all(buf.as_bytes())?;

    let mut summary = json!({
        "source": source,
        "n": report.n,
        "cutoff": report.cutoff,
        "solver": solver.name(),
        "lambda1": num(report.lambda1),
        "lambda1_is_lower_bound": report.lower_bound,
        "gap_proxy": num(report.gap_proxy),
        "threshold": num(a.threshold),
        "pgap": pgap_of(&report, a.threshold)?,
    });
    if a.source.lps {
        summary["ramanujan_bound"] = num(ramanujan_bound());
        summary["margin"] = num(ramanujan_bound() - report.lambda1);
    }
    emit_summary(&summary, &a.out, io)
}

fn cmd_gap(a: &GapArgs, io: &mut Io<'_>) -> Result<()> {
    let (t, source) = resolve_tuple(&a.source, a.n)?;
    let levels: Vec<usize> = match (a.level, a.cutoff) {
        (Some(k), _) => vec![k],
        (None, Some(j)) => (1..=j).collect(),
        (None, None) => unreachable!("clap enforces --level or --cutoff"),
    };
    let mut buf = String::from("k,lambda_max,lower,upper,minmax_estimate\n");
    let mut rows = Vec::with_capacity(levels.len());
    for &k in &levels {
        let level = IrrepLevel::new(k)?;
        let g = if a.minmax {
            minmax_gap_estimate(&t, level, a.restarts, a.iters)?
        } else {
            level_gap_bounds(&t, level)?
        };
        buf.push_str(&format!(
            "{},{},{},{},{}\n",
            g.k,
            fmt(g.lambda_max),
            fmt(g.lower),
            fmt(g.upper),
            fmt_csv(g.minmax_estimate)
        ));
        rows.push(g);
    }
    io.stdout.write_all(buf.as_bytes())?;

    let min_of = |f: fn(&gaplab_core::LevelGap) -> f64| {
        num(rows.iter().map(f).fold(f64::INFINITY, f64::min))
    };
    let mut summary = json!({
        "source": source,
        "n": t.len(),
        "levels": levels.len(),
        "min_lower": min_of(|g| g.lower),
        "min_upper": min_of(|g| g.upper),
    });
    if a.minmax {
        summary["min_minmax_estimate"] = min_of(|g| g.minmax_estimate.unwrap_or(f64::NAN));
    }
    if let Some(j) = a.cutoff {
        summary["inf_max_displacement"] = num(inf_max_displacement(&t, j)?);
    }
    emit_summary(&summary, &a.out, io)
}

fn cmd_record(c: ExperimentConfig, r: &RecordArgs, threads: Option<usize>, io: &mut Io<'_>) -> Result<()> {
    c.validate()?;
    let opts = RunOptions {
        out_dir: r.out_dir.clone(),
        threads,
        resume: r.resume,
        stop_after: r.stop_after,
    };
    let path = r.out_dir.join(c.file_name());
    let outcome = lab::run(&c, &opts).map_err(|e| {
        if e.is_io() || e.is_numerical() {
            let _ = writeln!(
                io.stderr,
                "note: {} keeps the completed rows; rerun the same command with --resume to continue",
                path.display()
            );
        }
        e
    })?;
    writeln!(io.stderr, "record: {}", outcome.path.display())?;
    match &outcome.record.summary {
        Some(s) => writeln!(io.stdout, "{s}")?,
        None => writeln!(
            io.stderr,
            "stopped after {} of {} rows; rerun with --resume to continue",
            outcome.record.rows.len(),
            c.row_count()
        )?,
    }
    Ok(())
}
