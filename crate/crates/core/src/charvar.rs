//! The two-generator character variety in trace coordinates.
//!
//! A pair `(a, b)` up to simultaneous conjugation is determined by
//! `(x, y, z) = (tr a, tr b, tr ab)`. The commutator trace factors through
//! these coordinates as `κ = x² + y² + z² − xyz − 2` and is invariant under
//! every Nielsen move, so its level sets are unions of orbits.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{ConjClass, GroupElement, Tuple};
use crate::nielsen::NielsenMove;

/// Slack allowed on traces before clamping into `[-2, 2]`.
pub const CLASS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl CharPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn fricke(&self) -> f64 {
        fricke(self)
    }

    pub fn distance(&self, other: &CharPoint) -> f64 {
        (self.x - other.x)
            .abs()
            .max((self.y - other.y).abs())
            .max((self.z - other.z).abs())
    }
}

fn require_pair(t: &Tuple) -> Result<(&GroupElement, &GroupElement)> {
    match t.elements() {
        [a, b] => Ok((a, b)),
        e => Err(Error::InvalidInput(format!(
            "trace coordinates need a pair, got n = {}",
            e.len()
        ))),
    }
}

pub fn trace_coords(t: &Tuple) -> Result<CharPoint> {
    let (a, b) = require_pair(t)?;
    Ok(CharPoint::new(a.trace(), b.trace(), a.mul(b).trace()))
}

/// `tr(a b a⁻¹ b⁻¹)`, by direct multiplication.
pub fn commutator(t: &Tuple) -> Result<GroupElement> {
    let (a, b) = require_pair(t)?;
    Ok(a.mul(b).mul(&a.inv()).mul(&b.inv()))
}

pub fn commutator_trace(t: &Tuple) -> Result<f64> {
    commutator(t).map(|c| c.trace())
}

pub fn fricke(p: &CharPoint) -> f64 {
    let CharPoint { x, y, z } = *p;
    x * x + y * y + z * z - x * y * z - 2.0
}

pub fn class_of(v: f64) -> Result<ConjClass> {
    if !(v.abs() <= 2.0 + CLASS_TOL) {
        return Err(Error::InvalidInput(format!("trace {v} outside [-2, 2]")));
    }
    ConjClass::from_trace(v.clamp(-2.0, 2.0))
}

/// The polynomial map induced on `(x, y, z)` by a move on pairs.
pub fn nielsen_on_traces(m: NielsenMove, p: &CharPoint) -> Result<CharPoint> {
    m.validate(2)?;
    let CharPoint { x, y, z } = *p;
    // tr(AB) + tr(AB⁻¹) = tr A · tr B
    Ok(match m {
        NielsenMove::Swap(..) => CharPoint::new(y, x, z),
        NielsenMove::Invert(_) => CharPoint::new(x, y, x * y - z),
        NielsenMove::RightMul(1, _) | NielsenMove::LeftMul(1, _) => CharPoint::new(z, y, y * z - x),
        NielsenMove::RightMul(..) | NielsenMove::LeftMul(..) => CharPoint::new(x, z, x * z - y),
    })
}

/// An accepted pair and the number of Haar draws it took.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSetSample {
    pub pair: Tuple,
    pub tries: u64,
}

/// Rejection-samples a Haar pair with `|commutator_trace − target| ≤ tol`.
pub fn sample_level_set<R: Rng + ?Sized>(
    target: f64,
    tol: f64,
    rng: &mut R,
    max_tries: u64,
) -> Result<LevelSetSample> {
    if !(target > -2.0 && target < 2.0) {
        return Err(Error::InvalidInput(format!("target {target} must lie in (-2, 2)")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tol must be positive, got {tol}")));
    }
    for tries in 1..=max_tries {
        let pair = Tuple::haar(2, rng)?;
        if (commutator_trace(&pair)? - target).abs() <= tol {
            return Ok(LevelSetSample { pair, tries });
        }
    }
    Err(Error::Exhausted {
        tries: max_tries,
        rate: 0.0,
    })
}

/// Draws `count` accepted pairs from one stream, sharing a `max_tries` budget.
///
/// On exhaustion the error carries the acceptance rate seen so far.
pub fn sample_level_set_batch<R: Rng + ?Sized>(
    target: f64,
    tol: f64,
    rng: &mut R,
    count: usize,
    max_tries: u64,
) -> Result<(Vec<Tuple>, u64)> {
    let mut out = Vec::with_capacity(count);
    let mut used = 0;
    while out.len() < count {
        match sample_level_set(target, tol, rng, max_tries - used) {
            Ok(s) => {
                used += s.tries;
                out.push(s.pair);
            }
            Err(Error::Exhausted { .. }) => {
                return Err(Error::Exhausted {
                    tries: max_tries,
                    rate: out.len() as f64 / max_tries as f64,
                })
            }
            Err(e) => return Err(e),
        }
    }
    Ok((out, used))
}
