//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Pass a substring to run a subset.

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde_json::Value;

use gaplab_core::charvar::{commutator_trace, fricke, nielsen_on_traces, trace_coords};
use gaplab_core::irreps::{eigen_angles, irrep_matrix};
use gaplab_core::lab::{self, ExperimentConfig, ExperimentKind};
use gaplab_core::seed::{derived_stream, stream, Stream};
use gaplab_core::spectral::{
    averaging_operator, averaging_operators, inf_max_displacement, lambda1_estimate,
    level_gap_bounds, minmax_gap_estimate,
};
use gaplab_core::stats::{ks_statistic, semicircle_cdf};
use gaplab_core::{GroupElement, IrrepLevel, NielsenMove, Tuple, Word};

/// Per-level top eigenvalues of the LPS preset for k = 1..=24, from an
/// independent exponential-map construction run before the build.
const LPS_ORACLE: [f64; 24] = [
    2.683281573, -0.4, -1.6099689438, 2.16, 2.683281573, 3.44, 1.8246314696, 2.416,
    2.3360029504, 3.8246897276, 3.292418169, 3.597696, 4.3758526567, 4.0109824,
    2.421568376, 3.2130816, 3.1998454752, 3.892933337, 3.7247253555, 3.3111714419,
    3.0807576349, 3.904179852, 4.135619147, 3.6003594357,
];

/// Frozen band for the LPS maximum over k ≤ 24.
const LPS_BAND: (f64, f64) = (-0.2, 1e-8);

/// Frozen Kesten-line slack for n = 2, J = 40.
const KESTEN_SLACK: f64 = 0.15;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn random_unit(d: usize, rng: &mut Stream) -> DVector<Complex64> {
    let v = DVector::from_fn(d, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let n = v.norm();
    v / Complex64::from(n)
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn representation_correctness() -> Verdict {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let clock = Instant::now();
    let (mut unit, mut chr, mut eig) = (0.0f64, 0.0f64, 0.0f64);
    one.install(|| {
        let mut rng = stream(0xacc0_0001);
        for _ in 0..100 {
            let g = GroupElement::haar(&mut rng);
            let alpha = g.w().clamp(-1.0, 1.0).acos();
            for k in 1..=40 {
                let level = IrrepLevel::new(k).unwrap();
                let u = irrep_matrix(level, &g).into_entries();
                let d = k + 1;
                unit = unit.max(max_abs(&(u.adjoint() * &u - DMatrix::identity(d, d))));

                let expect = if alpha.sin().abs() > 1e-6 {
                    ((k as f64 + 1.0) * alpha).sin() / alpha.sin()
                } else {
                    (0..=k).map(|m| ((k as f64 - 2.0 * m as f64) * alpha).cos()).sum()
                };
                let tr = u.trace();
                chr = chr.max((tr.re - expect).abs()).max(tr.im.abs());

                let (_, t) = Schur::new(u).unpack();
                let mut computed: Vec<Complex64> = t.diagonal().iter().copied().collect();
                for theta in eigen_angles(level, &g) {
                    let target = Complex64::from_polar(1.0, theta);
                    let (idx, dist) = computed
                        .iter()
                        .enumerate()
                        .map(|(i, z)| (i, (z - target).norm()))
                        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
                    eig = eig.max(dist);
                    computed.swap_remove(idx);
                }
            }
        }
    });
    let secs = clock.elapsed().as_secs_f64();
    verdict(
        unit < 1e-10 && chr < 1e-9 && eig < 1e-9 && secs < 60.0,
        format!("unitarity {unit:.1e}, character {chr:.1e}, eigenangles {eig:.1e}, {secs:.1}s single-threaded"),
    )
}

fn saturation_and_hermiticity() -> Verdict {
    let mut herm = 0.0f64;
    let mut excess = f64::NEG_INFINITY;
    for i in 0..200u64 {
        let n = if i < 100 { 2 } else { 3 };
        let t = Tuple::haar(n, &mut stream(0xacc0_0200 + i)).unwrap();
        for op in averaging_operators(&t, 20) {
            herm = herm.max(op.hermitian_residual());
            excess = excess.max(op.lambda_max().unwrap() - 2.0 * n as f64);
        }
    }
    let mut ident = 0.0f64;
    for n in [2, 3, 4] {
        let t = Tuple::identity(n).unwrap();
        for op in averaging_operators(&t, 20) {
            ident = ident.max((op.lambda_max().unwrap() - 2.0 * n as f64).abs());
        }
    }
    verdict(
        herm < 1e-10 && excess <= 1e-10 && ident < 1e-12,
        format!("hermitian residual {herm:.1e}, max(lambda_max - 2n) {excess:.2e}, identity error {ident:.1e}"),
    )
}

/// `min over unit v in C² of Σ‖(M_i − I)v‖²` on a (θ, φ) grid, using the
/// 2×2 defining matrices only.
fn grid_min_displacement(t: &Tuple) -> f64 {
    let mats: Vec<[[Complex64; 2]; 2]> = t
        .elements()
        .iter()
        .map(|g| {
            let m = g.matrix();
            [
                [m[(0, 0)] - 1.0, m[(0, 1)]],
                [m[(1, 0)], m[(1, 1)] - 1.0],
            ]
        })
        .collect();
    let (nt, np) = (600, 1200);
    let mut best = f64::INFINITY;
    for a in 0..=nt {
        let theta = a as f64 / nt as f64 * PI / 2.0;
        let (c, s) = (theta.cos(), theta.sin());
        for b in 0..np {
            let phi = b as f64 / np as f64 * 2.0 * PI;
            let v1 = Complex64::from_polar(s, phi);
            let v0 = Complex64::from(c);
            let total: f64 = mats
                .iter()
                .map(|m| (m[0][0] * v0 + m[0][1] * v1).norm_sqr() + (m[1][0] * v0 + m[1][1] * v1).norm_sqr())
                .sum();
            best = best.min(total);
        }
    }
    best
}

fn bridge_and_sandwich() -> Verdict {
    let mut worst_bridge = 0.0f64;
    for i in 0..50u64 {
        let t = Tuple::haar(2, &mut stream(0xacc0_0300 + i)).unwrap();
        let lam = averaging_operator(&t, IrrepLevel::new(1).unwrap()).lambda_max().unwrap();
        worst_bridge = worst_bridge.max((4.0 - lam - grid_min_displacement(&t)).abs());
    }
    let mut rng = stream(0xacc0_0301);
    let mut inside = 0;
    let mut worst_slack = f64::NEG_INFINITY;
    for i in 0..200u64 {
        let n = rng.random_range(2..=3);
        let k = rng.random_range(1..=4);
        let t = Tuple::haar(n, &mut derived_stream(0xacc0_0302, n as u64, i)).unwrap();
        let g = minmax_gap_estimate(&t, IrrepLevel::new(k).unwrap(), 16, 400).unwrap();
        let est = g.minmax_estimate.unwrap();
        let slack = (g.lower - est).max(est - g.upper);
        worst_slack = worst_slack.max(slack);
        if slack <= 1e-6 {
            inside += 1;
        }
    }
    verdict(
        worst_bridge < 2e-3 && inside == 200,
        format!("k=1 bridge error {worst_bridge:.1e}; sandwich {inside}/200 (worst excursion {worst_slack:.1e})"),
    )
}

fn literal_formula_diagnostic() -> Verdict {
    let mut rng = stream(0xacc0_0400);
    let mut nonzero = 0;
    let mut cutoff_one = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(2..=4);
        let t = Tuple::haar(n, &mut rng).unwrap();
        for j in 2..=8 {
            if inf_max_displacement(&t, j).unwrap() != 0.0 {
                nonzero += 1;
            }
        }
        // smallest eigen-displacement of a 2x2 SU(2) matrix is |e^{iα} − 1| = √(2 − tr g)
        let expect = t
            .elements()
            .iter()
            .map(|g| (2.0 - g.trace()).max(0.0).sqrt())
            .fold(0.0, f64::max);
        cutoff_one = cutoff_one.max((inf_max_displacement(&t, 1).unwrap() - expect).abs());
    }
    verdict(
        nonzero == 0 && cutoff_one < 1e-12,
        format!("nonzero at cutoff>=2: {nonzero}/700; cutoff-1 error {cutoff_one:.1e}"),
    )
}

fn random_word(rng: &mut Stream, n: usize, len: usize) -> Word {
    let mut letters: Vec<i32> = Vec::with_capacity(len);
    while letters.len() < len {
        let g = rng.random_range(1..=n as i32) * if rng.random::<bool>() { 1 } else { -1 };
        if letters.last() != Some(&-g) {
            letters.push(g);
        }
    }
    Word::new(letters).unwrap()
}

fn generating_set_comparison() -> Verdict {
    let mut rng = stream(0xacc0_0500);
    let (mut accepted, mut held) = (0, 0);
    let mut worst_ratio = f64::INFINITY;
    while accepted < 100 {
        let n = rng.random_range(2..=3);
        let len = rng.random_range(1..=6);
        let s = gaplab_core::nielsen::random_walk(&mut rng, n, len);
        let l = s.word_length_bound(n).unwrap();
        if l > 8 {
            continue;
        }
        accepted += 1;
        let k = rng.random_range(1..=9);
        let level = IrrepLevel::new(k).unwrap();
        let t = Tuple::haar(n, &mut rng).unwrap();
        let old = level_gap_bounds(&t, level).unwrap().lower;
        let new = level_gap_bounds(&s.apply(&t).unwrap(), level).unwrap().lower;
        if new >= old / l as f64 - 1e-6 {
            held += 1;
        }
        if old > 0.0 {
            worst_ratio = worst_ratio.min(new * l as f64 / old);
        }
    }

    let mut worst_tele = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let n = rng.random_range(2..=3);
        let t = Tuple::haar(n, &mut rng).unwrap();
        let len = rng.random_range(1..=10);
        let w = random_word(&mut rng, n, len);
        let level = IrrepLevel::new(rng.random_range(1..=12)).unwrap();
        let v = random_unit(level.dim(), &mut rng);
        let moved = |g: &GroupElement| (irrep_matrix(level, g).into_entries() * &v - &v).norm();
        let lhs = moved(&w.eval(&t).unwrap());
        let rhs: f64 = w
            .letters()
            .iter()
            .map(|&a| {
                let g = *t.get(a.unsigned_abs() as usize - 1);
                moved(&if a > 0 { g } else { g.inv() })
            })
            .sum();
        worst_tele = worst_tele.max(lhs - rhs);
    }
    verdict(
        held == 100 && worst_tele <= 1e-9,
        format!(
            "lower'/(lower/L) >= 1 in {held}/100 (worst ratio {worst_ratio:.3}); telescoping worst excess {worst_tele:.1e}"
        ),
    )
}

fn fricke_suite() -> Verdict {
    let mut rng = stream(0xacc0_0600);
    let (mut bridge, mut inv, mut square) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..10_000 {
        let t = Tuple::haar(2, &mut rng).unwrap();
        let p = trace_coords(&t).unwrap();
        let g = commutator_trace(&t).unwrap();
        bridge = bridge.max((g - fricke(&p)).abs());
        for m in NielsenMove::alphabet(2) {
            let moved = m.apply(&t).unwrap();
            inv = inv.max((commutator_trace(&moved).unwrap() - g).abs());
            let q = nielsen_on_traces(m, &p).unwrap();
            square = square.max(trace_coords(&moved).unwrap().distance(&q));
        }
    }
    verdict(
        bridge < 1e-10 && inv < 1e-10 && square < 1e-10,
        format!("fricke {bridge:.1e}, move invariance {inv:.1e}, equivariance {square:.1e}"),
    )
}

fn measure_preservation() -> Verdict {
    let kinds = [
        NielsenMove::Swap(1, 2),
        NielsenMove::Invert(1),
        NielsenMove::RightMul(1, 2),
        NielsenMove::LeftMul(1, 2),
    ];
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for (i, m) in kinds.iter().enumerate() {
        let mut rng = stream(0xacc0_0700 + i as u64);
        let mut traces: Vec<f64> = (0..100_000)
            .map(|_| m.apply(&Tuple::haar(2, &mut rng).unwrap()).unwrap().get(0).trace())
            .collect();
        let d = ks_statistic(&mut traces, semicircle_cdf);
        worst = worst.max(d);
        parts.push(format!("{m} {d:.4}"));
    }
    let mut rng = stream(0xacc0_0710);
    let mut traces: Vec<f64> = (0..1_000_000).map(|_| GroupElement::haar(&mut rng).trace()).collect();
    let haar = ks_statistic(&mut traces, semicircle_cdf);
    verdict(
        worst < 0.01 && haar < 0.002,
        format!("pushforward KS {}; Haar KS {haar:.4}", parts.join(", ")),
    )
}

fn lps_anchor() -> Verdict {
    let clock = Instant::now();
    let c = ExperimentConfig::new(ExperimentKind::LpsBenchmark, 0);
    let rec = lab::run_in_memory(&c, None).unwrap();
    let values: Vec<f64> = rec.rows.iter().map(|r| r.lambda_max.unwrap()).collect();
    let bound = lab::ramanujan_bound();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let above = values.iter().filter(|&&l| l > bound + 1e-8).count();
    let oracle = values
        .iter()
        .zip(LPS_ORACLE)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let in_band = max >= bound + LPS_BAND.0 && max <= bound + LPS_BAND.1;
    let secs = clock.elapsed().as_secs_f64();
    verdict(
        above == 0 && in_band && oracle < 1e-8 && secs < 300.0,
        format!("max {max:.10} vs 2√5 = {bound:.10}, {above} levels above bound, oracle diff {oracle:.1e}, {secs:.1}s"),
    )
}

fn kesten_reference() -> Verdict {
    let line = 2.0 * 3f64.sqrt() - KESTEN_SLACK;
    let (mut above, mut monotone) = (0, 0);
    for i in 0..200u64 {
        let t = Tuple::haar(2, &mut derived_stream(0xacc0_0900, 0, i)).unwrap();
        let r = lambda1_estimate(&t, 40).unwrap();
        if r.lambda1 >= line {
            above += 1;
        }
        if (1..40).all(|j| r.gap_proxy_at(j + 1) <= r.gap_proxy_at(j)) {
            monotone += 1;
        }
    }
    verdict(
        above >= 190 && monotone == 200,
        format!("{above}/200 with lambda1 >= 2√3 - {KESTEN_SLACK}; gap proxy nonincreasing in {monotone}/200"),
    )
}

fn gaplab(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaplab"))
        .args(args)
        .env("GAPLAB_THREADS", threads)
        .output()
        .expect("gaplab runs")
}

/// Record file contents with the wall clock removed from the summary line.
fn record_body(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| {
            let mut v: Value = serde_json::from_str(l).unwrap();
            if let Some(o) = v.as_object_mut() {
                o.remove("wall_clock_secs");
            }
            v.to_string()
        })
        .collect()
}

fn reproducibility() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let one_shots: [&[&str]; 3] = [
        &["sample", "--n", "3", "--count", "3", "--seed", "1"],
        &["spectrum", "--n", "2", "--cutoff", "12", "--seed", "5"],
        &["gap", "--seed", "5", "--cutoff", "3", "--minmax", "--restarts", "4", "--iters", "80"],
    ];
    let recorded: [&[&str]; 4] = [
        &["orbit", "--n", "3", "--walk", "60", "--cutoff", "6", "--seed", "3"],
        &["charvar", "--samples", "30", "--walk", "200", "--cutoff", "6", "--seed", "9"],
        &["scan", "--n", "2", "--cutoff", "12", "--samples", "40", "--seed", "7"],
        &["lps", "--cutoff", "12", "--seed", "1"],
    ];
    let mut mismatches = Vec::new();
    let mut runs = 0;
    for args in one_shots {
        let outs: Vec<Output> = ["1", "1", "8", "8"].iter().map(|t| gaplab(args, t)).collect();
        runs += outs.len();
        let ok = outs.iter().all(|o| {
            o.status.success() && o.stdout == outs[0].stdout && o.stderr == outs[0].stderr
        });
        if !ok {
            mismatches.push(args[0].to_string());
        }
    }
    for args in recorded {
        let mut stdouts = Vec::new();
        let mut bodies = Vec::new();
        for (i, t) in ["1", "1", "8", "8"].iter().enumerate() {
            let out_dir = dir.path().join(format!("{}-{i}", args[0]));
            std::fs::create_dir_all(&out_dir).unwrap();
            let mut full: Vec<&str> = args.to_vec();
            let d = out_dir.to_str().unwrap();
            full.extend(["--out-dir", d]);
            let o = gaplab(&full, t);
            runs += 1;
            let file = std::fs::read_dir(&out_dir).unwrap().next().unwrap().unwrap().path();
            stdouts.push((o.status.success(), o.stdout));
            bodies.push(record_body(&file));
        }
        let ok = stdouts.iter().all(|s| s.0 && s.1 == stdouts[0].1) && bodies.iter().all(|b| *b == bodies[0]);
        if !ok {
            mismatches.push(args[0].to_string());
        }
    }

    let scan = ["scan", "--n", "2", "--cutoff", "10", "--samples", "70", "--seed", "11"];
    let whole = dir.path().join("whole");
    let split = dir.path().join("split");
    std::fs::create_dir_all(&whole).unwrap();
    std::fs::create_dir_all(&split).unwrap();
    let with_dir = |d: &Path, extra: &[&str]| {
        let mut v: Vec<String> = scan.iter().map(|s| s.to_string()).collect();
        v.extend(["--out-dir".into(), d.to_str().unwrap().into()]);
        v.extend(extra.iter().map(|s| s.to_string()));
        v
    };
    let run = |args: Vec<String>, t: &str| {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        gaplab(&refs, t)
    };
    let a = run(with_dir(&whole, &[]), "8");
    let b = run(with_dir(&split, &["--stop-after", "23"]), "1");
    let c = run(with_dir(&split, &["--resume"]), "8");
    let file = |d: &Path| std::fs::read_dir(d).unwrap().next().unwrap().unwrap().path();
    let resumed_ok = a.status.success()
        && b.status.success()
        && c.status.success()
        && record_body(&file(&whole)) == record_body(&file(&split))
        && a.stdout == c.stdout;
    if !resumed_ok {
        mismatches.push("scan resume".into());
    }
    verdict(
        mismatches.is_empty(),
        format!("{runs} runs at 1 and 8 threads plus a resumed scan; mismatches: {mismatches:?}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("representation correctness", representation_correctness),
        ("saturation and hermiticity", saturation_and_hermiticity),
        ("eigenvalue bridge and sandwich bounds", bridge_and_sandwich),
        ("literal inf-max formula diagnostic", literal_formula_diagnostic),
        ("generating-set comparison", generating_set_comparison),
        ("fricke and commutator suite", fricke_suite),
        ("measure preservation", measure_preservation),
        ("LPS preset anchor", lps_anchor),
        ("Kesten reference behavior", kesten_reference),
        ("reproducibility", reproducibility),
    ];
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        if !filters.is_empty() && !filters.iter().any(|f| name.to_lowercase().contains(&f.to_lowercase())) {
            continue;
        }
        let clock = Instant::now();
        let v = std::panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            verdict(false, format!("panicked: {msg}"))
        });
        let took: Duration = clock.elapsed();
        if !v.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<40} {} [{:.1}s] {}",
            i + 1,
            name,
            if v.pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            v.detail
        );
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
