use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::real;
use crate::spectral::DEFAULT_THRESHOLD;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    ZeroOneScan,
    OrbitInvariance,
    LevelSetWalk,
    LpsBenchmark,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 4] = [
        ExperimentKind::ZeroOneScan,
        ExperimentKind::OrbitInvariance,
        ExperimentKind::LevelSetWalk,
        ExperimentKind::LpsBenchmark,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::ZeroOneScan => "zero_one_scan",
            ExperimentKind::OrbitInvariance => "orbit_invariance",
            ExperimentKind::LevelSetWalk => "level_set_walk",
            ExperimentKind::LpsBenchmark => "lps_benchmark",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Everything that determines the rows of a run. Execution knobs (threads,
/// output directory, resume) live in [`super::RunOptions`] and do not enter
/// the config hash.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub n: usize,
    pub cutoff: usize,
    pub samples: usize,
    pub walk_length: usize,
    #[serde(serialize_with = "real::ser")]
    pub threshold: f64,
    pub seed: u64,
    #[serde(default, serialize_with = "real::ser_opt", skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    #[serde(default, serialize_with = "real::ser_opt", skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_tries: Option<u64>,
    #[serde(default)]
    pub identity_start: bool,
}

impl ExperimentConfig {
    /// Defaults for `kind`.
    pub fn new(kind: ExperimentKind, seed: u64) -> Self {
        let base = ExperimentConfig {
            kind,
            n: 2,
            cutoff: 40,
            samples: 100,
            walk_length: 0,
            threshold: DEFAULT_THRESHOLD,
            seed,
            target: None,
            tol: None,
            max_tries: None,
            identity_start: false,
        };
        match kind {
            ExperimentKind::ZeroOneScan => base,
            ExperimentKind::OrbitInvariance => ExperimentConfig {
                n: 3,
                cutoff: 10,
                samples: 1,
                walk_length: 1000,
                ..base
            },
            ExperimentKind::LevelSetWalk => ExperimentConfig {
                cutoff: 10,
                walk_length: 1000,
                target: Some(0.0),
                tol: Some(0.05),
                max_tries: Some(10_000_000),
                ..base
            },
            ExperimentKind::LpsBenchmark => ExperimentConfig {
                n: 3,
                cutoff: 24,
                samples: 1,
                ..base
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        if self.cutoff == 0 {
            return bad("cutoff must be at least 1".into());
        }
        if self.samples == 0 {
            return bad("samples must be at least 1".into());
        }
        if !(self.threshold > 0.0) || !self.threshold.is_finite() {
            return bad(format!("threshold must be positive, got {}", self.threshold));
        }
        match self.kind {
            ExperimentKind::ZeroOneScan => Ok(()),
            ExperimentKind::OrbitInvariance if self.walk_length == 0 => {
                bad("orbit_invariance needs walk_length >= 1".into())
            }
            ExperimentKind::OrbitInvariance => Ok(()),
            ExperimentKind::LevelSetWalk => {
                if self.n != 2 {
                    return bad(format!("level_set_walk needs n = 2, got {}", self.n));
                }
                match (self.target, self.tol, self.max_tries) {
                    (Some(t), Some(tol), Some(m)) => {
                        if !(t > -2.0 && t < 2.0) {
                            return bad(format!("target must lie in (-2, 2), got {t}"));
                        }
                        if !(tol > 0.0) {
                            return bad(format!("tol must be positive, got {tol}"));
                        }
                        if m == 0 {
                            return bad("max_tries must be at least 1".into());
                        }
                        Ok(())
                    }
                    _ => bad("level_set_walk needs target, tol and max_tries".into()),
                }
            }
            ExperimentKind::LpsBenchmark if self.n != 3 => {
                bad(format!("lps_benchmark needs n = 3, got {}", self.n))
            }
            ExperimentKind::LpsBenchmark => Ok(()),
        }
    }

    /// Canonical JSON: object keys sorted, reals at 17 digits.
    pub fn canonical_json(&self) -> String {
        let v: Value = serde_json::to_value(self).expect("config serializes");
        v.to_string()
    }

    /// Hex sha256 of [`Self::canonical_json`].
    pub fn hash(&self) -> String {
        hex(&Sha256::digest(self.canonical_json().as_bytes()))
    }

    /// `<kind>-<seed>-<hash8>.jsonl`
    pub fn file_name(&self) -> String {
        format!("{}-{}-{}.jsonl", self.kind, self.seed, &self.hash()[..8])
    }

    /// Number of rows a complete run produces.
    pub fn row_count(&self) -> usize {
        match self.kind {
            ExperimentKind::ZeroOneScan | ExperimentKind::LevelSetWalk => self.samples,
            ExperimentKind::OrbitInvariance => self.walk_length,
            ExperimentKind::LpsBenchmark => self.cutoff,
        }
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
