use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::config::{hex, ExperimentConfig};
use crate::error::{Error, Result};
use crate::group::Tuple;
use crate::real;

/// One row of a run. Fields not produced by an experiment are omitted.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub digest: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none", rename = "move")]
    pub step: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word_length: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none", serialize_with = "real::ser_opt")]
    pub lambda_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", serialize_with = "real::ser_opt_vec")]
    pub per_level: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none", serialize_with = "real::ser_opt")]
    pub lambda1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", serialize_with = "real::ser_opt")]
    pub gap_proxy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pgap: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lemma_check: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none", serialize_with = "real::ser_opt")]
    pub commutator_trace: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", serialize_with = "real::ser_opt")]
    pub g_drift: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", serialize_with = "real::ser_opt")]
    pub x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tries: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub walk_hist: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Row {
    pub fn new(index: usize) -> Self {
        Row {
            index,
            ..Row::default()
        }
    }
}

/// Quantization step applied to canonical forms before hashing.
pub const DIGEST_QUANTUM: f64 = 1e-6;

/// 16 hex characters of sha256 over the quantized canonical form, so that
/// conjugate tuples share a digest.
pub fn tuple_digest(t: &Tuple) -> String {
    let mut h = Sha256::new();
    for g in t.canonical_form().elements() {
        for c in g.components() {
            let q = (c / DIGEST_QUANTUM).round() as i64;
            h.update(q.to_le_bytes());
        }
    }
    hex(&h.finalize())[..16].to_string()
}

/// A run as persisted: config line, row lines, summary line.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub version: String,
    pub rows: Vec<Row>,
    /// Absent while a run is incomplete.
    pub summary: Option<Value>,
    pub wall_clock_secs: Option<f64>,
}

impl RunRecord {
    pub fn new(config: ExperimentConfig) -> Self {
        RunRecord {
            config_hash: config.hash(),
            config,
            version: crate::VERSION.to_string(),
            rows: Vec::new(),
            summary: None,
            wall_clock_secs: None,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.summary.is_some()
    }

    pub fn header_line(&self) -> Result<String> {
        Ok(json!({
            "config": serde_json::to_value(&self.config)?,
            "config_hash": self.config_hash,
            "version": self.version,
        })
        .to_string())
    }

    pub fn row_line(row: &Row) -> Result<String> {
        Ok(serde_json::to_string(row)?)
    }

    pub fn summary_line(summary: &Value, wall_clock_secs: f64) -> String {
        json!({ "summary": summary, "wall_clock_secs": real::json(wall_clock_secs) }).to_string()
    }

    /// Everything except the wall clock, as it would be written.
    pub fn deterministic_lines(&self) -> Result<Vec<String>> {
        let mut out = vec![self.header_line()?];
        for r in &self.rows {
            out.push(Self::row_line(r)?);
        }
        if let Some(s) = &self.summary {
            out.push(s.to_string());
        }
        Ok(out)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(File::create(path)?);
        writeln!(f, "{}", self.header_line()?)?;
        for r in &self.rows {
            writeln!(f, "{}", Self::row_line(r)?)?;
        }
        if let Some(s) = &self.summary {
            writeln!(f, "{}", Self::summary_line(s, self.wall_clock_secs.unwrap_or(0.0)))?;
        }
        f.flush()?;
        Ok(())
    }

    /// Reads a record, tolerating an interrupted tail: a final line that is
    /// not newline-terminated or does not parse is dropped.
    pub fn read(path: &Path) -> Result<RunRecord> {
        let mut reader = BufReader::new(File::open(path)?);
        let mut lines = Vec::new();
        loop {
            let mut buf = String::new();
            if reader.read_line(&mut buf)? == 0 {
                break;
            }
            if !buf.ends_with('\n') {
                break;
            }
            buf.pop();
            lines.push(buf);
        }
        let mut it = lines.into_iter();
        let head: Value = serde_json::from_str(
            &it.next()
                .ok_or_else(|| Error::Record(format!("{} is empty", path.display())))?,
        )?;
        let config: ExperimentConfig = serde_json::from_value(
            head.get("config")
                .cloned()
                .ok_or_else(|| Error::Record("first line has no config".into()))?,
        )?;
        let field = |k: &str| {
            head.get(k)
                .and_then(Value::as_str)
                .map(str::to_string)
                .ok_or_else(|| Error::Record(format!("first line has no {k}")))
        };
        let mut rec = RunRecord {
            config_hash: field("config_hash")?,
            version: field("version")?,
            config,
            rows: Vec::new(),
            summary: None,
            wall_clock_secs: None,
        };
        for line in it {
            let v: Value = match serde_json::from_str(&line) {
                Ok(v) => v,
                Err(_) => break,
            };
            if let Some(s) = v.get("summary") {
                rec.summary = Some(s.clone());
                rec.wall_clock_secs = v.get("wall_clock_secs").and_then(Value::as_f64);
                break;
            }
            rec.rows.push(serde_json::from_value(v)?);
        }
        for (i, r) in rec.rows.iter().enumerate() {
            if r.index != i {
                return Err(Error::Record(format!("row {i} carries index {}", r.index)));
            }
        }
        Ok(rec)
    }
}
