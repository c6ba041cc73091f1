//! Seeded, resumable experiment drivers with line-delimited JSON records.
//!
//! A record file holds a config line, one line per row and a summary line.
//! Row `i` draws from its own stream derived from `(seed, kind, i)`, so rows
//! are identical whatever the thread count, and an interrupted run can be
//! resumed from the rows already on disk.

mod config;
mod experiments;
mod record;

use std::fs::OpenOptions;
use std::io::Write;
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::Instant;

use serde_json::Value;

pub use config::{ExperimentConfig, ExperimentKind};
pub use experiments::{
    lps_preset, ramanujan_bound, walk_sample_ks, LevelSetWalk, LpsBenchmark, OrbitInvariance,
    ZeroOneScan, HIST_BINS, LEMMA_SLACK,
};
pub use record::{tuple_digest, Row, RunRecord, DIGEST_QUANTUM};

use crate::error::{Error, Result};
use crate::registry::Registry;

/// Rows computed between flushes to disk.
pub const CHUNK: usize = 32;

pub trait Experiment: Send + Sync {
    fn kind(&self) -> ExperimentKind;

    /// Rows `range` of the run described by `c`, in index order.
    fn rows(&self, c: &ExperimentConfig, range: Range<usize>) -> Result<Vec<Row>>;

    /// Summary statistics, a pure function of the config and the rows.
    fn summarize(&self, c: &ExperimentConfig, rows: &[Row]) -> Value;
}

pub fn registry() -> &'static Registry<dyn Experiment> {
    static REG: OnceLock<Registry<dyn Experiment>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut r: Registry<dyn Experiment> = Registry::new("experiment");
        r.register("zero_one_scan", Box::new(ZeroOneScan));
        r.register("orbit_invariance", Box::new(OrbitInvariance));
        r.register("level_set_walk", Box::new(LevelSetWalk));
        r.register("lps_benchmark", Box::new(LpsBenchmark));
        r
    })
}

pub fn experiment(kind: ExperimentKind) -> &'static dyn Experiment {
    registry().get(kind.name()).expect("every kind is registered")
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    /// Worker threads; `None` uses one per core.
    pub threads: Option<usize>,
    /// Continue from the rows already in the record file.
    pub resume: bool,
    /// Stop after this many rows without writing a summary.
    pub stop_after: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub path: PathBuf,
    pub record: RunRecord,
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))
}

/// Recomputes the summary of a record from its rows.
pub fn summarize(record: &RunRecord) -> Value {
    experiment(record.config.kind).summarize(&record.config, &record.rows)
}

/// Runs an experiment without touching the filesystem.
pub fn run_in_memory(config: &ExperimentConfig, threads: Option<usize>) -> Result<RunRecord> {
    config.validate()?;
    let clock = Instant::now();
    let exp = experiment(config.kind);
    let mut record = RunRecord::new(config.clone());
    record.rows = pool(threads)?.install(|| exp.rows(config, 0..config.row_count()))?;
    record.summary = Some(exp.summarize(config, &record.rows));
    record.wall_clock_secs = Some(clock.elapsed().as_secs_f64());
    Ok(record)
}

fn append(path: &Path, lines: &[String]) -> Result<()> {
    let mut f = OpenOptions::new().append(true).open(path)?;
    let mut buf = String::new();
    for l in lines {
        buf.push_str(l);
        buf.push('\n');
    }
    f.write_all(buf.as_bytes())?;
    f.sync_data()?;
    Ok(())
}

/// Runs (or resumes) an experiment, writing `<out_dir>/<kind>-<seed>-<hash8>.jsonl`.
///
/// Rows are flushed in chunks of [`CHUNK`]. On any error the file holds the
/// config line and every row completed so far, and a rerun with
/// `resume = true` picks up from there.
pub fn run(config: &ExperimentConfig, opts: &RunOptions) -> Result<RunOutcome> {
    config.validate()?;
    let clock = Instant::now();
    let exp = experiment(config.kind);
    let path = opts.out_dir.join(config.file_name());
    let total = config.row_count();

    let mut record = RunRecord::new(config.clone());
    if opts.resume && path.exists() {
        let existing = RunRecord::read(&path)?;
        if existing.config_hash != record.config_hash || existing.config != *config {
            return Err(Error::Record(format!(
                "{} was written by a different config",
                path.display()
            )));
        }
        if existing.is_complete() && existing.rows.len() == total {
            return Ok(RunOutcome {
                path,
                record: existing,
            });
        }
        record.rows = existing.rows;
        record.rows.truncate(total);
    }
    // rewrite the head so an interrupted tail line is discarded
    record.write(&path)?;

    let end = opts.stop_after.map_or(total, |s| s.min(total));
    let workers = pool(opts.threads)?;
    let mut next = record.rows.len();
    while next < end {
        let stop = (next + CHUNK).min(end);
        let rows = workers.install(|| exp.rows(config, next..stop))?;
        let lines = rows.iter().map(RunRecord::row_line).collect::<Result<Vec<_>>>()?;
        append(&path, &lines)?;
        record.rows.extend(rows);
        next = stop;
    }

    if record.rows.len() == total {
        let summary = exp.summarize(config, &record.rows);
        let secs = clock.elapsed().as_secs_f64();
        append(&path, &[RunRecord::summary_line(&summary, secs)])?;
        record.summary = Some(summary);
        record.wall_clock_secs = Some(secs);
    }
    Ok(RunOutcome { path, record })
}
