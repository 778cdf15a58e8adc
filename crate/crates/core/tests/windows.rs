use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wavc_core::prob::{empirical_type, Alphabet};
use wavc_core::window::*;
use wavc_core::{ConstraintSet, Distribution, HalfSpace, Symbol};

/// Re-counts every window from scratch and tests each inequality on its type.
fn brute_force_starts(seq: &[Symbol], w: usize, cs: &ConstraintSet, inclusive: bool) -> Vec<usize> {
    let n = seq.len();
    let last = if inclusive { n - w + 1 } else { n - w };
    (0..last)
        .filter(|&i| {
            let mut counts = vec![0usize; cs.dim()];
            for &s in &seq[i..i + w] {
                counts[s as usize] += 1;
            }
            cs.halfspaces().iter().any(|h| {
                let v: f64 = counts.iter().zip(&h.coeffs).map(|(&c, a)| c as f64 / w as f64 * a).sum();
                v > h.bound + cs.tol()
            })
        })
        .collect()
}

fn random_set(rng: &mut ChaCha8Rng, dim: usize) -> ConstraintSet {
    loop {
        let k = rng.gen_range(1..=2);
        let hs = (0..k)
            .map(|_| {
                let c: Vec<f64> = (0..dim).map(|_| rng.gen_range(0..5) as f64 / 4.0).collect();
                HalfSpace::new(c, rng.gen_range(1..8) as f64 / 8.0)
            })
            .collect();
        if let Ok(cs) = ConstraintSet::new(dim, hs) {
            return cs;
        }
    }
}

#[test]
fn verify_examples() {
    let gamma = ConstraintSet::weight_cap(0.25).unwrap();
    let r = verify_windows(&[1, 0, 0, 0, 1, 0, 0, 0], 4, &gamma, RangeMode::Inclusive).unwrap();
    assert!(r.valid);
    assert_eq!(r.windows_checked, 5);
    let r = verify_windows(&[1, 1, 0, 0, 0, 0, 0, 0], 4, &gamma, RangeMode::Inclusive).unwrap();
    assert!(!r.valid);
    assert_eq!(r.violations[0].start, 0);
    assert_eq!(r.violations[0].window_type.probs(), &[0.5, 0.5]);
    assert!(verify_windows(&[0, 1], 3, &gamma, RangeMode::Inclusive).is_err());
}

#[test]
fn strict_range_skips_last_window() {
    let gamma = ConstraintSet::weight_cap(0.25).unwrap();
    let seq = [0, 0, 0, 0, 0, 0, 1, 1];
    assert!(verify_windows(&seq, 4, &gamma, RangeMode::Strict).unwrap().valid);
    assert!(!verify_windows(&seq, 4, &gamma, RangeMode::Inclusive).unwrap().valid);
}

#[test]
fn full_length_window_checks_overall_type() {
    let gamma = ConstraintSet::weight_cap(0.3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let n = rng.gen_range(1..40);
        let seq: Vec<Symbol> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        let t = empirical_type(&seq, Alphabet::binary()).unwrap().to_distribution().unwrap();
        assert_eq!(verify_windows(&seq, n, &gamma, RangeMode::Inclusive).unwrap().valid, gamma.contains(&t));
    }
}

#[test]
fn verifier_matches_recount() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for case in 0..10_000 {
        let dim = if case % 2 == 0 { 2 } else { 3 };
        let cs = random_set(&mut rng, dim);
        let n = rng.gen_range(1..=64);
        let seq: Vec<Symbol> = (0..n).map(|_| rng.gen_range(0..dim as Symbol)).collect();
        for w in 1..=n {
            for (mode, inclusive) in [(RangeMode::Inclusive, true), (RangeMode::Strict, false)] {
                let r = verify_windows(&seq, w, &cs, mode).unwrap();
                let starts: Vec<usize> = r.violations.iter().map(|v| v.start).collect();
                assert_eq!(starts, brute_force_starts(&seq, w, &cs, inclusive), "case {case} n {n} w {w}");
                assert_eq!(r.valid, starts.is_empty());
            }
        }
    }
}

#[test]
fn guard_word_examples() {
    let g = guard_word(&Distribution::bernoulli(0.25).unwrap(), 8).unwrap();
    assert_eq!(g.symbols, vec![0, 0, 0, 1, 0, 0, 0, 1]);
    assert_eq!(g.block_length, 4);
    let g = guard_word(&Distribution::point_mass(2, 0).unwrap(), 13).unwrap();
    assert!(g.symbols.iter().all(|&s| s == 0));
    let g = guard_word(&Distribution::bernoulli(0.25).unwrap(), 5).unwrap();
    assert_eq!(g.symbols, vec![0, 0, 0, 1, 0]);
    let t = empirical_type(&g.symbols, Alphabet::binary()).unwrap().to_distribution().unwrap();
    let dev = t.tv_distance(&Distribution::bernoulli(0.25).unwrap());
    assert!((dev - 0.05).abs() < 1e-12);
    assert!(dev <= g.deviation_bound(5));
    assert!((g.deviation_bound(5) - 0.8).abs() < 1e-12);
}

#[test]
fn guard_word_deviation_bound_holds_everywhere() {
    let targets = [
        vec![0.75, 0.25],
        vec![2.0 / 3.0, 1.0 / 3.0],
        vec![0.5, 0.25, 0.25],
        vec![0.625, 0.375],
        vec![0.2, 0.8],
        vec![0.1, 0.3, 0.6],
    ];
    for probs in targets {
        let target = Distribution::new(probs).unwrap();
        let abc = Alphabet::new(target.dim()).unwrap();
        for w_x in [16usize, 100, 256] {
            let g = guard_word(&target, w_x).unwrap();
            for l in g.block_length..=w_x {
                for start in 0..=w_x - l {
                    let t = empirical_type(&g.symbols[start..start + l], abc).unwrap().to_distribution().unwrap();
                    assert!(t.tv_distance(&target) <= g.deviation_bound(l) + 1e-12);
                }
            }
        }
    }
}

#[test]
fn iid_removal_fraction_matches_estimate() {
    let gamma = ConstraintSet::weight_cap(0.4).unwrap();
    let p = Distribution::bernoulli(0.25).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let book: Vec<Vec<Symbol>> = (0..2000).map(|_| (0..256).map(|_| p.sample(&mut rng)).collect()).collect();
    let (kept, stats) = expurgate(&book, 64, &gamma, &[], &[]).unwrap();
    // Independent estimate over 2e5 words: 0.0764 +- 0.0006. Tolerance is 3 sd at 2000 words.
    assert!((stats.removed_fraction - 0.0764).abs() < 0.018, "removed {}", stats.removed_fraction);
    for &i in &kept {
        assert!(verify_windows(&book[i], 64, &gamma, RangeMode::Inclusive).unwrap().valid);
    }
}

#[test]
fn expurgation_examples() {
    let gamma = ConstraintSet::weight_cap(0.5).unwrap();
    let book = vec![vec![0; 16], vec![1; 16]];
    let (kept, stats) = expurgate(&book, 8, &gamma, &[], &[]).unwrap();
    assert_eq!(kept, vec![0]);
    assert!((stats.removed_fraction - 0.5).abs() < 1e-12);
}

#[test]
fn expurgation_checks_straddling_windows() {
    let gamma = ConstraintSet::weight_cap(0.25).unwrap();
    let guard = [1, 0, 0, 0, 1, 0, 0, 0];
    let book = vec![vec![0, 0, 0, 0, 0, 0, 0, 1], vec![1, 0, 0, 0, 0, 0, 0, 0]];
    let (kept, _) = expurgate(&book, 4, &gamma, &[], &guard).unwrap();
    assert_eq!(kept, vec![1]);
    let (kept, _) = expurgate(&book, 4, &gamma, &[], &[]).unwrap();
    assert_eq!(kept, vec![0, 1]);
}

proptest! {
    #[test]
    fn windows_split_across_two_feasible_pieces_are_feasible(
        a in prop::collection::vec(0u8..3, 1..20),
        b in prop::collection::vec(0u8..3, 1..20),
        c in prop::collection::vec(0.0f64..1.0, 3),
        bound in 0.1f64..0.9,
    ) {
        let cs = ConstraintSet::new(3, vec![HalfSpace::new(c.clone(), bound)]);
        prop_assume!(cs.is_ok());
        let cs = cs.unwrap();
        let abc = Alphabet::new(3).unwrap();
        let ta = empirical_type(&a, abc).unwrap().to_distribution().unwrap();
        let tb = empirical_type(&b, abc).unwrap().to_distribution().unwrap();
        prop_assume!(cs.contains(&ta) && cs.contains(&tb));
        let joined: Vec<u8> = a.iter().chain(&b).copied().collect();
        prop_assert!(verify_windows(&joined, joined.len(), &cs, RangeMode::Inclusive).unwrap().valid);
    }
}
