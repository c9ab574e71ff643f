use lagroid_core::groupoid::{build_pair_groupoid, FiniteGroupoid};
use lagroid_core::histories::{
    action, compose_histories, compose_histories_checked, reverse_history, History, Orientation, QLagrangianOnK,
    Segment,
};
use lagroid_core::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A chained walk `x₀ → x₁ → …` on a pair groupoid.
fn random_history(g: &FiniteGroupoid, rng: &mut ChaCha8Rng, t0: f64, start: usize) -> (History, usize) {
    let pair = g.pair_index().unwrap();
    let n = g.object_count();
    let mut at = start;
    let mut segments = Vec::new();
    for _ in 0..rng.random_range(1..6) {
        let next = rng.random_range(0..n);
        segments.push(Segment {
            morphism: pair[next][at],
            duration: rng.random_range(0.01..1.0),
        });
        at = next;
    }
    (History::new(t0, segments).unwrap(), at)
}

fn symmetric_lagrangian(g: &FiniteGroupoid, rng: &mut ChaCha8Rng) -> QLagrangianOnK {
    let mut values = vec![0.0; g.morphism_count()];
    for a in 0..values.len() {
        let b = g.inverse(a);
        if b >= a {
            let v = rng.random_range(-2.0..2.0);
            values[a] = v;
            values[b] = v;
        }
    }
    QLagrangianOnK::new(g, values, 0.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn action_is_additive(n in 2usize..7, seed in any::<u64>(), t0 in -5.0f64..5.0) {
        let g = build_pair_groupoid(n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = symmetric_lagrangian(&g, &mut rng);
        let (w, end) = random_history(&g, &mut rng, t0, 0);
        let (w2, _) = random_history(&g, &mut rng, w.t1(), end);
        let (c, warning) = compose_histories_checked(&g, &w, &w2).unwrap();
        prop_assert!(warning.is_none());
        let lhs = action(&l, &c).unwrap();
        let rhs = action(&l, &w).unwrap() + action(&l, &w2).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));

        // the same holds for composites of reversals, traversed the other way
        let (r, r2) = (reverse_history(&g, &w2), reverse_history(&g, &w));
        let rc = compose_histories(&r, &r2).unwrap();
        let lhs = action(&l, &rc).unwrap();
        let rhs = action(&l, &r).unwrap() + action(&l, &r2).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        prop_assert_eq!(rc, reverse_history(&g, &c));
    }

    #[test]
    fn reversal_negates_action(n in 2usize..7, seed in any::<u64>()) {
        let g = build_pair_groupoid(n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = symmetric_lagrangian(&g, &mut rng);
        prop_assert!(l.is_tau_invariant());
        let (w, _) = random_history(&g, &mut rng, 0.0, 0);
        let s = action(&l, &w).unwrap();
        let r = reverse_history(&g, &w);
        prop_assert_eq!(action(&l, &r).unwrap(), -s);
        prop_assert_eq!(reverse_history(&g, &r), w);
    }
}

#[test]
fn asymmetric_lagrangian_breaks_antisymmetry() {
    let g = build_pair_groupoid(3).unwrap();
    let pair = g.pair_index().unwrap();
    // ℓ(y, x) = y - x is odd under inversion
    let values: Vec<f64> = (0..g.morphism_count()).map(|a| g.target(a) as f64 - g.source(a) as f64).collect();
    let l = QLagrangianOnK::new(&g, values, 1e-12).unwrap();
    assert!(!l.is_tau_invariant());
    let w = History::new(0.0, vec![Segment { morphism: pair[2][0], duration: 1.5 }]).unwrap();
    let s = action(&l, &w).unwrap();
    let sr = action(&l, &reverse_history(&g, &w)).unwrap();
    assert_eq!(s, 3.0);
    assert_eq!(sr, 3.0);
    assert!((sr + s).abs() > 1.0);
}

#[test]
fn composition_rules() {
    let g = build_pair_groupoid(2).unwrap();
    let w = History::new(0.0, vec![Segment { morphism: 1, duration: 1.0 }]).unwrap();
    let late = History::new(2.0, vec![Segment { morphism: 2, duration: 1.0 }]).unwrap();
    assert!(matches!(compose_histories(&w, &late), Err(Error::TimeMismatch { .. })));
    let r = reverse_history(&g, &w);
    assert_eq!(r.orientation, Orientation::Reversed);
    assert!(matches!(compose_histories(&w, &r), Err(Error::OrientationMismatch)));
    let idle = History::empty(1.0);
    assert_eq!(compose_histories(&w, &idle).unwrap().segments, w.segments);
}

#[test]
fn junction_mismatch_is_reported() {
    let g = build_pair_groupoid(3).unwrap();
    let pair = g.pair_index().unwrap();
    let w = History::new(0.0, vec![Segment { morphism: pair[1][0], duration: 1.0 }]).unwrap();
    let w2 = History::new(1.0, vec![Segment { morphism: pair[0][2], duration: 1.0 }]).unwrap();
    let (_, warning) = compose_histories_checked(&g, &w, &w2).unwrap();
    let warning = warning.unwrap();
    assert_eq!((warning.arriving, warning.departing), (1, 2));
}
