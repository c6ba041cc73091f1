//! Irreducible unitary representations of SU(2).
//!
//! Level `k` is the action on homogeneous polynomials of degree `k` in two
//! variables, `(π(g) p)(u, v) = p((u, v) M(g))`, written in the orthonormal
//! basis `f_m = √C(k,m) · u^(k-m) v^m`, `m = 0..=k`. Each level occurs in
//! `L²₀(SU(2))` (with multiplicity `k + 1`, which does not affect spectra).

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupElement;

/// A Peter–Weyl level, indexed by `k = 2·spin`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IrrepLevel {
    k: usize,
}

impl IrrepLevel {
    /// A level of `L²₀`, so `k ≥ 1`.
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput(
                "level k = 0 is the constants and is excluded from L²₀".into(),
            ));
        }
        Ok(Self { k })
    }

    /// Includes the trivial level `k = 0`; meant for tests and diagnostics.
    pub fn any(k: usize) -> Self {
        Self { k }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.k + 1
    }

    /// `j(j+1)` with `j = k/2`; the Laplace eigenvalue up to the metric scale.
    pub fn casimir(&self) -> f64 {
        let k = self.k as f64;
        k * (k + 2.0) / 4.0
    }

    pub fn is_integer_spin(&self) -> bool {
        self.k % 2 == 0
    }
}

/// The `(k+1)×(k+1)` unitary image of a group element at one level.
#[derive(Debug, Clone, PartialEq)]
pub struct RepMatrix {
    level: IrrepLevel,
    entries: DMatrix<Complex64>,
}

impl RepMatrix {
    pub fn level(&self) -> IrrepLevel {
        self.level
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<Complex64> {
        self.entries
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }
}

/// Builds `π_k(g)` by raising the degree one step at a time.
///
/// Column `n` of level `k+1` is the column of level `k` multiplied by the
/// linear form `a u + c v` (or `b u + d v` for the shifted column); the
/// variant with the larger normalizing divisor is used so that no step
/// amplifies rounding error by more than `√2`.
pub fn irrep_matrix(level: IrrepLevel, g: &GroupElement) -> RepMatrix {
    let mut out = None;
    raise_degree(level.k, g, |k, block| {
        if k == level.k {
            out = Some(block);
        }
    });
    RepMatrix {
        level,
        entries: out.expect("target level is always reached"),
    }
}

/// `π_0(g), π_1(g), …, π_{k_max}(g)` from a single pass of the recursion.
pub fn irrep_ladder(k_max: usize, g: &GroupElement) -> Vec<RepMatrix> {
    let mut out = Vec::with_capacity(k_max + 1);
    raise_degree(k_max, g, |k, entries| {
        out.push(RepMatrix {
            level: IrrepLevel::any(k),
            entries,
        })
    });
    out
}

fn raise_degree<F: FnMut(usize, DMatrix<Complex64>)>(k_max: usize, g: &GroupElement, mut emit: F) {
    let m = g.matrix();
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);

    // column-major scratch; level j lives in the leading (j+1)x(j+1) block
    let dim = k_max + 1;
    let zero = Complex64::new(0.0, 0.0);
    let mut cur = vec![zero; dim * dim];
    let mut next = cur.clone();
    cur[0] = Complex64::new(1.0, 0.0);
    let sqrt: Vec<f64> = (0..=dim).map(|i| (i as f64).sqrt()).collect();
    let block = |buf: &[Complex64], k: usize| {
        DMatrix::from_fn(k + 1, k + 1, |r, col| buf[col * dim + r])
    };
    emit(0, block(&cur, 0));

    for k in 0..k_max {
        for n_new in 0..=k + 1 {
            let use_left = k + 1 - n_new >= n_new;
            let (src, p, q, div) = if use_left {
                (n_new, a, c, sqrt[k + 1 - n_new])
            } else {
                (n_new - 1, b, d, sqrt[n_new])
            };
            for row in 0..=k + 1 {
                let mut acc = zero;
                if row <= k {
                    acc += p * cur[src * dim + row] * sqrt[k + 1 - row];
                }
                if row >= 1 {
                    acc += q * cur[src * dim + row - 1] * sqrt[row];
                }
                next[n_new * dim + row] = acc / div;
            }
        }
        std::mem::swap(&mut cur, &mut next);
        emit(k + 1, block(&cur, k + 1));
    }
}

/// `χ_k(g) = Σ_m e^{i(k-2m)α} = sin((k+1)α) / sin α`, with the limits
/// `k+1` at `α = 0` and `(-1)^k (k+1)` at `α = π`.
pub fn character(level: IrrepLevel, g: &GroupElement) -> f64 {
    character_of_angle(level.k, g.angle())
}

pub fn character_of_angle(k: usize, alpha: f64) -> f64 {
    let s = alpha.sin();
    if s.abs() < 1e-7 {
        // the closed form loses digits near the poles; sum the weights instead
        return (0..=k)
            .map(|m| ((k as f64 - 2.0 * m as f64) * alpha).cos())
            .sum();
    }
    ((k as f64 + 1.0) * alpha).sin() / s
}

/// Arguments of the eigenvalues of `π_k(g)`: `(k - 2m)·α` for `m = 0..=k`.
pub fn eigen_angles(level: IrrepLevel, g: &GroupElement) -> Vec<f64> {
    let alpha = g.angle();
    let k = level.k as f64;
    (0..=level.k).map(|m| (k - 2.0 * m as f64) * alpha).collect()
}
