//! Largest-eigenvalue solvers for dense Hermitian matrices.
//!
//! Two independent routes are registered: a full dense decomposition and a
//! restarted Lanczos iteration with full reorthogonalization. `auto` picks
//! dense up to [`DENSE_LIMIT`] and Lanczos above.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use crate::registry::Registry;
use crate::seed;

/// Dimension up to which `auto` uses the dense path.
pub const DENSE_LIMIT: usize = 512;

/// Residual bound `‖Av − θv‖` accepted by the iterative path.
pub const RESIDUAL_TOL: f64 = 1e-10;

pub const DEFAULT_SOLVER: &str = "auto";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unconverged {
    pub iterations: usize,
    pub residual: f64,
}

pub trait EigenSolver: Send + Sync {
    fn name(&self) -> &'static str;

    /// Largest eigenvalue of a Hermitian matrix.
    fn lambda_max(&self, a: &DMatrix<Complex64>) -> Result<f64, Unconverged>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Dense;

impl EigenSolver for Dense {
    fn name(&self) -> &'static str {
        "dense"
    }

    fn lambda_max(&self, a: &DMatrix<Complex64>) -> Result<f64, Unconverged> {
        let eig = SymmetricEigen::new(a.clone());
        Ok(eig.eigenvalues.max())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Lanczos {
    pub krylov_dim: usize,
    pub max_restarts: usize,
    pub tol: f64,
}

impl Default for Lanczos {
    fn default() -> Self {
        Self {
            krylov_dim: 96,
            max_restarts: 200,
            tol: RESIDUAL_TOL,
        }
    }
}

type CVec = DVector<Complex64>;

fn random_unit(d: usize, rng: &mut seed::Stream) -> CVec {
    let v = CVec::from_fn(d, |_, _| {
        Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let n = v.norm();
    v / Complex64::from(n)
}

fn orthogonalize(w: &mut CVec, basis: &[CVec]) {
    // two passes of classical Gram-Schmidt
    for _ in 0..2 {
        for v in basis {
            let c = v.dotc(w);
            w.axpy(-c, v, Complex64::new(1.0, 0.0));
        }
    }
}

impl EigenSolver for Lanczos {
    fn name(&self) -> &'static str {
        "lanczos"
    }

    fn lambda_max(&self, a: &DMatrix<Complex64>) -> Result<f64, Unconverged> {
        let d = a.nrows();
        assert!(d > 0 && a.is_square(), "lambda_max needs a nonempty square matrix");
        if d == 1 {
            return Ok(a[(0, 0)].re);
        }
        let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
        let mut rng = seed::stream(0x1a2c_205e_ed00_0001);
        let mut start = random_unit(d, &mut rng);
        let m = self.krylov_dim.clamp(2, d);
        let mut iterations = 0;
        let mut residual = f64::INFINITY;

        for _ in 0..self.max_restarts {
            let mut basis: Vec<CVec> = Vec::with_capacity(m);
            let mut alpha = Vec::with_capacity(m);
            let mut beta: Vec<f64> = Vec::with_capacity(m);
            let mut q = start.clone();
            for j in 0..m {
                basis.push(q.clone());
                let mut w = a * &q;
                iterations += 1;
                alpha.push(q.dotc(&w).re);
                orthogonalize(&mut w, &basis);
                if j + 1 == m {
                    break;
                }
                let b = w.norm();
                if b < 1e-12 * scale {
                    // invariant subspace: continue with a fresh direction, decoupled
                    let mut fresh = random_unit(d, &mut rng);
                    orthogonalize(&mut fresh, &basis);
                    let n = fresh.norm();
                    beta.push(0.0);
                    q = fresh / Complex64::from(n);
                } else {
                    beta.push(b);
                    q = w / Complex64::from(b);
                }
            }

            let k = alpha.len();
            let t = DMatrix::<f64>::from_fn(k, k, |r, c| {
                if r == c {
                    alpha[r]
                } else if r + 1 == c {
                    beta[r]
                } else if c + 1 == r {
                    beta[c]
                } else {
                    0.0
                }
            });
            let eig = SymmetricEigen::new(t);
            let top = eig.eigenvalues.imax();
            let theta = eig.eigenvalues[top];
            let s = eig.eigenvectors.column(top);
            let mut y = CVec::zeros(d);
            for (i, v) in basis.iter().enumerate() {
                y.axpy(Complex64::from(s[i]), v, Complex64::new(1.0, 0.0));
            }
            let n = y.norm();
            y /= Complex64::from(n);
            let r = a * &y - &y * Complex64::from(theta);
            residual = r.norm();
            if residual < self.tol {
                return Ok(theta);
            }
            start = y;
        }
        Err(Unconverged {
            iterations,
            residual,
        })
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Auto {
    pub lanczos: Lanczos,
}

impl EigenSolver for Auto {
    fn name(&self) -> &'static str {
        "auto"
    }

    fn lambda_max(&self, a: &DMatrix<Complex64>) -> Result<f64, Unconverged> {
        if a.nrows() <= DENSE_LIMIT {
            Dense.lambda_max(a)
        } else {
            self.lanczos.lambda_max(a)
        }
    }
}

/// The built-in solver registry: `dense`, `lanczos`, `auto`.
pub fn registry() -> &'static Registry<dyn EigenSolver> {
    static REG: OnceLock<Registry<dyn EigenSolver>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut r: Registry<dyn EigenSolver> = Registry::new("eigensolver");
        r.register("dense", Box::new(Dense));
        r.register("lanczos", Box::new(Lanczos::default()));
        r.register("auto", Box::new(Auto::default()));
        r
    })
}

pub fn solver(name: &str) -> crate::Result<&'static dyn EigenSolver> {
    registry().get(name)
}

pub fn default_solver() -> &'static dyn EigenSolver {
    solver(DEFAULT_SOLVER).expect("auto is registered")
}
