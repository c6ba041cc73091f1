//! Averaging operators and gap functionals, level by level.
//!
//! For a tuple `t = (t_1, …, t_n)` the operator `Σ_i π_k(t_i) + π_k(t_i)†` is
//! built on each level `k ≥ 1`. Its top eigenvalue over `k = 1..=J` is a lower
//! bound for `λ₁` (a supremum over infinitely many levels), and
//! `2n − λ₁` is the gap proxy.
//!
//! The min-max gap `min_{‖v‖=1} max_i ‖(π_k(t_i) − I)v‖` is bracketed by the
//! identity `Σ_i ‖(π_k(t_i) − I)v‖² = ⟨(2n·I − A)v, v⟩`:
//!
//! ```text
//!   √((2n − λ_max)/n)  ≤  min-max gap  ≤  √(2n − λ_max)
//! ```

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::{default_solver, EigenSolver};
use crate::error::{Error, Result};
use crate::group::Tuple;
use crate::irreps::{eigen_angles, irrep_ladder, irrep_matrix, IrrepLevel};
use crate::seed;

/// Default level cutoff for `λ₁` sweeps.
pub const DEFAULT_CUTOFF: usize = 40;
/// Default threshold for the gap indicator.
pub const DEFAULT_THRESHOLD: f64 = 1e-3;
pub const DEFAULT_RESTARTS: usize = 16;
pub const DEFAULT_ITERS: usize = 400;

/// `Σ_i π_k(t_i) + π_k(t_i)†` on one level.
#[derive(Debug, Clone, PartialEq)]
pub struct AveragingOperator {
    level: IrrepLevel,
    n: usize,
    matrix: DMatrix<Complex64>,
}

impl AveragingOperator {
    pub fn level(&self) -> IrrepLevel {
        self.level
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// `max |A − A†|` over entries.
    pub fn hermitian_residual(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Top eigenvalue through the default solver.
    pub fn lambda_max(&self) -> Result<f64> {
        self.lambda_max_with(default_solver())
    }

    pub fn lambda_max_with(&self, solver: &dyn EigenSolver) -> Result<f64> {
        solver
            .lambda_max(&self.matrix)
            .map_err(|u| Error::NoConvergence {
                k: self.level.k(),
                iterations: u.iterations,
                residual: u.residual,
            })
    }

    /// Full ascending spectrum (dense).
    pub fn spectrum(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.matrix.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

fn sum_with_adjoints<'a, I: Iterator<Item = &'a DMatrix<Complex64>>>(
    d: usize,
    mats: I,
) -> DMatrix<Complex64> {
    let mut a = DMatrix::zeros(d, d);
    for u in mats {
        a += u;
        a += u.adjoint();
    }
    a
}

pub fn averaging_operator(t: &Tuple, level: IrrepLevel) -> AveragingOperator {
    let reps: Vec<_> = t
        .elements()
        .iter()
        .map(|g| irrep_matrix(level, g).into_entries())
        .collect();
    AveragingOperator {
        level,
        n: t.len(),
        matrix: sum_with_adjoints(level.dim(), reps.iter()),
    }
}

/// Operators for every level `1..=cutoff`, sharing one recursion per element.
pub fn averaging_operators(t: &Tuple, cutoff: usize) -> Vec<AveragingOperator> {
    let ladders: Vec<_> = t.elements().iter().map(|g| irrep_ladder(cutoff, g)).collect();
    (1..=cutoff)
        .map(|k| {
            let level = IrrepLevel::any(k);
            AveragingOperator {
                level,
                n: t.len(),
                matrix: sum_with_adjoints(level.dim(), ladders.iter().map(|l| l[k].entries())),
            }
        })
        .collect()
}

/// Cutoff aggregate of per-level top eigenvalues.
///
/// `lambda1` is a lower bound for the true `λ₁`: it is a maximum over the
/// finitely many levels `1..=cutoff` of a supremum over all levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub n: usize,
    pub cutoff: usize,
    /// `lambda_max` for `k = 1..=cutoff`, index `k − 1`.
    pub per_level: Vec<f64>,
    pub lambda1: f64,
    pub gap_proxy: f64,
    pub lower_bound: bool,
}

impl SpectralReport {
    pub fn from_levels(n: usize, per_level: Vec<f64>) -> Self {
        let cutoff = per_level.len();
        let lambda1 = per_level.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self {
            n,
            cutoff,
            gap_proxy: gap_proxy(n, lambda1),
            per_level,
            lambda1,
            lower_bound: true,
        }
    }

    /// `λ₁` estimate at a smaller cutoff `j ≤ cutoff`.
    pub fn lambda1_at(&self, j: usize) -> f64 {
        self.per_level[..j]
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn gap_proxy_at(&self, j: usize) -> f64 {
        gap_proxy(self.n, self.lambda1_at(j))
    }

    /// `(k, lambda_max)` pairs.
    pub fn levels(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.per_level.iter().enumerate().map(|(i, &l)| (i + 1, l))
    }
}

/// `2n − λ₁`, clamped to `[0, 2n]`.
pub fn gap_proxy(n: usize, lambda1: f64) -> f64 {
    let two_n = 2.0 * n as f64;
    (two_n - lambda1).clamp(0.0, two_n)
}

pub fn lambda1_estimate(t: &Tuple, cutoff: usize) -> Result<SpectralReport> {
    lambda1_estimate_with(t, cutoff, default_solver())
}

pub fn lambda1_estimate_with(
    t: &Tuple,
    cutoff: usize,
    solver: &dyn EigenSolver,
) -> Result<SpectralReport> {
    if cutoff == 0 {
        return Err(Error::InvalidInput("cutoff must be at least 1".into()));
    }
    let per_level = averaging_operators(t, cutoff)
        .par_iter()
        .map(|a| a.lambda_max_with(solver))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralReport::from_levels(t.len(), per_level))
}

/// `min_{‖v‖=1} ‖(π_k(t_i) − I)v‖` for each generator, from the eigenangles:
/// the smallest of `2|sin(θ/2)|`.
pub fn per_gen_min_displacement(t: &Tuple, level: IrrepLevel) -> Vec<f64> {
    t.elements()
        .iter()
        .map(|g| {
            eigen_angles(level, g)
                .into_iter()
                .map(|theta| 2.0 * (theta / 2.0).sin().abs())
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// `min_{k ≤ cutoff} max_i min_{‖v‖=1} ‖(π_k(t_i) − I)v‖`.
///
/// This infimum-of-maxima takes the minimum over `v` separately for each
/// generator. On every even level each single element fixes the weight-zero
/// vector of its own torus, so the value is `0` for every tuple once
/// `cutoff ≥ 2`. The
/// operative gap is the min-max functional in [`minmax_gap_estimate`], where
/// one vector must be moved by some generator.
pub fn inf_max_displacement(t: &Tuple, cutoff: usize) -> Result<f64> {
    if cutoff == 0 {
        return Err(Error::InvalidInput("cutoff must be at least 1".into()));
    }
    Ok((1..=cutoff)
        .map(|k| {
            per_gen_min_displacement(t, IrrepLevel::any(k))
                .into_iter()
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min))
}

/// Per-level gap data; `minmax_estimate` is filled only by the optimizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelGap {
    pub k: usize,
    pub lambda_max: f64,
    pub lower: f64,
    pub upper: f64,
    pub minmax_estimate: Option<f64>,
}

impl LevelGap {
    fn from_lambda(n: usize, k: usize, lambda_max: f64) -> Self {
        let slack = (2.0 * n as f64 - lambda_max).max(0.0);
        Self {
            k,
            lambda_max,
            lower: (slack / n as f64).sqrt(),
            upper: slack.sqrt(),
            minmax_estimate: None,
        }
    }
}

pub fn level_gap_bounds(t: &Tuple, level: IrrepLevel) -> Result<LevelGap> {
    let lambda = averaging_operator(t, level).lambda_max()?;
    Ok(LevelGap::from_lambda(t.len(), level.k(), lambda))
}

/// The Hermitian forms `Q_i = (U_i − I)†(U_i − I) = 2I − U_i − U_i†`.
fn displacement_forms(t: &Tuple, level: IrrepLevel) -> Vec<DMatrix<Complex64>> {
    let d = level.dim();
    let two = DMatrix::<Complex64>::identity(d, d) * Complex64::from(2.0);
    t.elements()
        .iter()
        .map(|g| {
            let u = irrep_matrix(level, g).into_entries();
            &two - &u - u.adjoint()
        })
        .collect()
}

type CVec = DVector<Complex64>;

fn quad(q: &DMatrix<Complex64>, v: &CVec) -> f64 {
    v.dotc(&(q * v)).re.max(0.0)
}

/// `max_i ‖(U_i − I) v‖` for a unit vector `v`.
fn minmax_objective(forms: &[DMatrix<Complex64>], v: &CVec) -> f64 {
    forms
        .iter()
        .map(|q| quad(q, v))
        .fold(0.0, f64::max)
        .sqrt()
}

/// Log-sum-exp smoothing of `max_i v†Q_i v` at temperature `tau`, with its
/// Euclidean gradient.
fn smoothed(forms: &[DMatrix<Complex64>], v: &CVec, tau: f64) -> (f64, CVec) {
    let qv: Vec<CVec> = forms.iter().map(|q| q * v).collect();
    let vals: Vec<f64> = qv.iter().map(|w| v.dotc(w).re).collect();
    let top = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = vals.iter().map(|x| ((x - top) / tau).exp()).collect();
    let total: f64 = weights.iter().sum();
    let value = top + tau * total.ln();
    let mut grad = CVec::zeros(v.len());
    for (w, x) in weights.iter().zip(&qv) {
        grad.axpy(Complex64::from(2.0 * w / total), x, Complex64::new(1.0, 0.0));
    }
    (value, grad)
}

fn normalized(v: CVec) -> CVec {
    let n = v.norm();
    v / Complex64::from(n)
}

/// Projected gradient descent on the unit sphere for the smoothed objective,
/// annealing the temperature toward zero. Returns the best exact value seen.
fn descend(forms: &[DMatrix<Complex64>], start: CVec, iters: usize) -> f64 {
    const STAGES: usize = 8;
    let per_stage = (iters / STAGES).max(1);
    let mut v = normalized(start);
    let mut best = minmax_objective(forms, &v);
    let mut tau = 0.5;
    let mut step = 0.5;
    for _ in 0..STAGES {
        for _ in 0..per_stage {
            let (f, g) = smoothed(forms, &v, tau);
            let radial = v.dotc(&g).re;
            let tangent = &g - &v * Complex64::from(radial);
            let gnorm2 = tangent.norm_squared();
            if gnorm2 < 1e-30 {
                break;
            }
            // Armijo backtracking along the retracted direction
            let mut accepted = false;
            for _ in 0..40 {
                let trial = normalized(&v - &tangent * Complex64::from(step));
                let (ft, _) = smoothed(forms, &trial, tau);
                if ft <= f - 1e-4 * step * gnorm2 {
                    v = trial;
                    accepted = true;
                    step *= 2.0;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
            best = best.min(minmax_objective(forms, &v));
        }
        tau *= 0.1;
        step = step.max(1e-3);
    }
    best
}

/// Best-effort numerical minimum of `max_i ‖(π_k(t_i) − I)v‖` over unit `v`.
///
/// The first start is the top eigenvector of the averaging operator (so the
/// result never exceeds `upper`); the remaining `restarts − 1` starts are
/// random. The estimate is an upper estimate of the true min-max.
pub fn minmax_gap_estimate(
    t: &Tuple,
    level: IrrepLevel,
    restarts: usize,
    iters: usize,
) -> Result<LevelGap> {
    let op = averaging_operator(t, level);
    let eig = SymmetricEigen::new(op.matrix.clone());
    let top = eig.eigenvalues.imax();
    let lambda = op.lambda_max()?;
    let mut gap = LevelGap::from_lambda(t.len(), level.k(), lambda);

    let forms = displacement_forms(t, level);
    let d = level.dim();
    let mut starts: Vec<CVec> = vec![eig.eigenvectors.column(top).into_owned()];
    for r in 1..restarts.max(1) {
        let mut rng = seed::derived_stream(0x6d69_6e6d_6178, level.k() as u64, r as u64);
        starts.push(CVec::from_fn(d, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        }));
    }
    let best = starts
        .into_par_iter()
        .map(|s| descend(&forms, s, iters))
        .reduce(|| f64::INFINITY, f64::min);
    gap.minmax_estimate = Some(best);
    Ok(gap)
}

/// `1` when the gap proxy at `cutoff` exceeds `threshold`, else `0`.
///
/// A finite-cutoff stand-in for the indicator of a positive gap.
pub fn pgap_indicator(t: &Tuple, cutoff: usize, threshold: f64) -> Result<u8> {
    let report = lambda1_estimate(t, cutoff)?;
    pgap_of(&report, threshold)
}

pub fn pgap_of(report: &SpectralReport, threshold: f64) -> Result<u8> {
    if !(threshold > 0.0) {
        return Err(Error::InvalidInput(format!(
            "threshold must be positive, got {threshold}"
        )));
    }
    Ok(u8::from(report.gap_proxy > threshold))
}
