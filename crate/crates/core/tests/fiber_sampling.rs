use gaplab_core::charvar::{commutator, commutator_trace, sample_level_set, trace_coords};
use gaplab_core::lab::{walk_sample_ks, HIST_BINS};
use gaplab_core::nielsen::random_walk;
use gaplab_core::seed::{derived_stream, stream};
use gaplab_core::Tuple;

#[test]
fn acceptance_rate_matches_unconditioned_density() {
    let (target, tol) = (0.0, 0.05);
    let mut rng = stream(0xdead_0001);
    let draws = 1_000_000;
    let hits = (0..draws)
        .filter(|_| {
            let t = Tuple::haar(2, &mut rng).unwrap();
            (commutator_trace(&t).unwrap() - target).abs() <= tol
        })
        .count();
    let p = hits as f64 / draws as f64;

    let mut rng = stream(0xdead_0002);
    let (mut accepted, mut tries) = (0u64, 0u64);
    for _ in 0..400 {
        let s = sample_level_set(target, tol, &mut rng, 1_000_000).unwrap();
        accepted += 1;
        tries += s.tries;
    }
    let rate = accepted as f64 / tries as f64;
    // binomial noise of both estimates
    let sigma = (p * (1.0 - p) / tries as f64 + p * (1.0 - p) / draws as f64).sqrt();
    assert!((rate - p).abs() <= 3.0 * sigma, "rate {rate} vs density {p} (σ {sigma})");
}

#[test]
fn near_commuting_fiber_has_small_commutators() {
    let mut rng = stream(0xdead_0003);
    for _ in 0..20 {
        let s = sample_level_set(2.0 - 1e-6, 1e-3, &mut rng, 10_000_000).unwrap();
        assert!(commutator(&s.pair).unwrap().angle() < 0.05);
    }
}

#[test]
fn walk_spreads_over_the_fiber() {
    let target = 0.0;
    let tol = 0.01;
    let draws = 3000;
    let xs: Vec<f64> = (0..draws)
        .map(|i| {
            let s = sample_level_set(target, tol, &mut derived_stream(0xdead_0004, 0, i), 10_000_000).unwrap();
            trace_coords(&s.pair).unwrap().x
        })
        .collect();

    let mut rng = stream(0xdead_0005);
    let mut t = sample_level_set(target, tol, &mut rng, 10_000_000).unwrap().pair;
    let g0 = commutator_trace(&t).unwrap();
    let mut hist = vec![0u64; HIST_BINS];
    for m in random_walk(&mut rng, 2, 100_000).moves() {
        t = m.apply(&t).unwrap();
        let x = t.get(0).trace();
        hist[(((x + 2.0) / 4.0 * HIST_BINS as f64) as usize).min(HIST_BINS - 1)] += 1;
    }
    assert!((commutator_trace(&t).unwrap() - g0).abs() < 1e-8);
    let ks = walk_sample_ks(&hist, &xs);
    assert!(ks < 0.05, "walk vs conditional sample KS {ks}");
}
