//! Averaging-operator spectra against a second construction of the irreps:
//! the exponential of spin-j angular momentum matrices.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use proptest::prelude::*;

use gaplab_core::seed::stream;
use gaplab_core::spectral::{averaging_operator, gap_proxy, lambda1_estimate, level_gap_bounds};
use gaplab_core::{GroupElement, IrrepLevel, Tuple};

fn spin_matrices(k: usize) -> [DMatrix<Complex64>; 3] {
    let d = k + 1;
    let j = k as f64 / 2.0;
    let mut jz = DMatrix::zeros(d, d);
    let mut jp = DMatrix::zeros(d, d);
    for a in 0..d {
        let m = j - a as f64;
        jz[(a, a)] = Complex64::from(m);
        if a > 0 {
            jp[(a - 1, a)] = Complex64::from((j * (j + 1.0) - m * (m + 1.0)).sqrt());
        }
    }
    let jm = jp.adjoint();
    let i = Complex64::new(0.0, 1.0);
    let jx = (&jp + &jm) * Complex64::from(0.5);
    let jy = (&jp - &jm) / (i * 2.0);
    [jx, jy, jz]
}

fn exp_irrep(k: usize, g: &GroupElement) -> DMatrix<Complex64> {
    let [w, x, y, z] = g.components();
    let s = (x * x + y * y + z * z).sqrt();
    let alpha = s.atan2(w);
    if s == 0.0 {
        return DMatrix::identity(k + 1, k + 1) * Complex64::from(w.signum().powi(k as i32));
    }
    let [jx, jy, jz] = spin_matrices(k);
    let gen = (jx * Complex64::from(x / s) + jy * Complex64::from(y / s) + jz * Complex64::from(z / s))
        * Complex64::new(0.0, 2.0 * alpha);
    gen.exp()
}

fn sorted_spectrum(m: DMatrix<Complex64>) -> Vec<f64> {
    let mut e: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

#[test]
fn spectra_agree_with_exponential_construction() {
    let mut rng = stream(0x0ac1e);
    for n in [2, 3] {
        for _ in 0..10 {
            let t = Tuple::haar(n, &mut rng).unwrap();
            for k in 1..=12 {
                let d = k + 1;
                let mut oracle = DMatrix::<Complex64>::zeros(d, d);
                for g in t.elements() {
                    let u = exp_irrep(k, g);
                    oracle += &u + u.adjoint();
                }
                let ours = averaging_operator(&t, IrrepLevel::new(k).unwrap());
                let a = sorted_spectrum(ours.matrix().clone());
                let b = sorted_spectrum(oracle);
                for (x, y) in a.iter().zip(&b) {
                    assert!((x - y).abs() < 1e-9, "n={n} k={k}: {x} vs {y}");
                }
            }
        }
    }
}

#[test]
fn identity_tuple_has_no_gap() {
    let t = Tuple::identity(3).unwrap();
    let r = lambda1_estimate(&t, 5).unwrap();
    assert_eq!(r.lambda1, 6.0);
    assert_eq!(r.gap_proxy, 0.0);
    let g = level_gap_bounds(&t, IrrepLevel::new(2).unwrap()).unwrap();
    assert_eq!((g.lower, g.upper), (0.0, 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gap_proxy_is_monotone_and_clamped(seed in any::<u64>(), n in 2usize..4) {
        let t = Tuple::haar(n, &mut stream(seed)).unwrap();
        let r = lambda1_estimate(&t, 12).unwrap();
        for j in 1..12 {
            prop_assert!(r.gap_proxy_at(j + 1) <= r.gap_proxy_at(j));
        }
        prop_assert!(r.gap_proxy >= 0.0 && r.gap_proxy <= 2.0 * n as f64);
        prop_assert_eq!(gap_proxy(n, r.lambda1), r.gap_proxy);
    }

    #[test]
    fn spectra_are_conjugation_invariant(seed in any::<u64>(), k in 1usize..10) {
        let mut rng = stream(seed);
        let t = Tuple::haar(3, &mut rng).unwrap();
        let h = GroupElement::haar(&mut rng);
        let level = IrrepLevel::new(k).unwrap();
        let a = averaging_operator(&t, level).lambda_max().unwrap();
        let b = averaging_operator(&t.conjugate_by(&h), level).lambda_max().unwrap();
        let c = averaging_operator(&t.canonical_form(), level).lambda_max().unwrap();
        prop_assert!((a - b).abs() < 1e-10 && (a - c).abs() < 1e-10);
    }
}
