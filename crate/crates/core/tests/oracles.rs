use std::collections::BTreeSet;

use fluctlab_core::counterexample::{phi, phi_sum};
use fluctlab_core::dynamics::count_fluctuations;
use fluctlab_core::dynamics::{CyclicSystem, Point, SampleableSystem};
use fluctlab_core::{FiniteSubset, Rational, RunList};
use proptest::prelude::*;

fn small_set() -> impl Strategy<Value = BTreeSet<i64>> {
    prop::collection::btree_set(-40i64..40, 0..30)
}

fn runs_of(s: &BTreeSet<i64>) -> RunList {
    RunList::from_points(s.iter().copied())
}

fn set_of(r: &RunList) -> BTreeSet<i64> {
    r.points().collect()
}

/// Most `(≤ α, ≥ β)` pairs over all index subsets.
fn brute_force_count(values: &[i32], alpha: i32, beta: i32) -> usize {
    let n = values.len();
    (0u32..(1 << n))
        .filter_map(|mask| {
            let picked: Vec<i32> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| values[i]).collect();
            let ok = picked.len() % 2 == 0 && picked.chunks(2).all(|p| p[0] <= alpha && p[1] >= beta);
            ok.then_some(picked.len() / 2)
        })
        .max()
        .unwrap_or(0)
}

proptest! {
    #[test]
    fn runlist_set_ops_match_btreeset(a in small_set(), b in small_set()) {
        let (ra, rb) = (runs_of(&a), runs_of(&b));
        prop_assert_eq!(set_of(&ra.union(&rb)), a.union(&b).copied().collect::<BTreeSet<_>>());
        prop_assert_eq!(set_of(&ra.intersection(&rb)), a.intersection(&b).copied().collect::<BTreeSet<_>>());
        prop_assert_eq!(set_of(&ra.difference(&rb)), a.difference(&b).copied().collect::<BTreeSet<_>>());
        prop_assert_eq!(ra.symdiff_len(&rb), a.symmetric_difference(&b).count() as u64);
        prop_assert_eq!(ra.len(), a.len() as u64);
    }

    #[test]
    fn runlist_sumset_and_shift_match_btreeset(a in small_set(), b in small_set(), s in -20i64..20) {
        let (ra, rb) = (runs_of(&a), runs_of(&b));
        let sum: BTreeSet<i64> = a.iter().flat_map(|x| b.iter().map(move |y| x + y)).collect();
        prop_assert_eq!(set_of(&ra.sumset(&rb)), sum);
        let shifted: BTreeSet<i64> = a.iter().map(|x| x + s).collect();
        prop_assert_eq!(set_of(&ra.shift(s)), shifted.clone());
        prop_assert_eq!(ra.shift_symdiff_len(s), a.symmetric_difference(&shifted).count() as u64);
        let negated: BTreeSet<i64> = a.iter().map(|x| -x).collect();
        prop_assert_eq!(set_of(&ra.negate()), negated);
    }

    #[test]
    fn runs_are_canonical(a in small_set()) {
        let r = runs_of(&a);
        for w in r.runs().windows(2) {
            prop_assert!(w[0].1 + 1 < w[1].0);
        }
        for &(lo, hi) in r.runs() {
            prop_assert!(lo <= hi);
        }
    }

    #[test]
    fn greedy_count_is_optimal(values in prop::collection::vec(0i32..10, 0..12), alpha in 0i32..5, gap in 1i32..5) {
        let beta = alpha + gap;
        prop_assert_eq!(count_fluctuations(&values, &alpha, &beta), brute_force_count(&values, alpha, beta));
    }

    #[test]
    fn phi_sum_matches_pointwise(a in prop::collection::btree_set(0i64..200, 0..40), l in 1u64..12, shift in 0u64..100) {
        let direct: u64 = a.iter().map(|&z| phi(l, z as u64 + shift) as u64).sum();
        prop_assert_eq!(phi_sum(l, &runs_of(&a), shift), direct);
    }

    #[test]
    fn cyclic_average_matches_direct_sum(
        values in prop::collection::vec(0i64..5, 1..20),
        window in prop::collection::btree_set(-30i64..30, 1..15),
        x in 0u64..40,
    ) {
        let vals: Vec<Rational> = values.iter().map(|&v| Rational::from_integer(v as i128)).collect();
        let sys = SampleableSystem::FiniteCyclic(CyclicSystem::new(&vals).unwrap());
        let f = FiniteSubset::from_ints(window.iter().copied());
        let m = values.len() as i64;
        let total: i64 = window.iter().map(|&g| values[(x as i64 + g).rem_euclid(m) as usize]).sum();
        let expected = Rational::new(total as i128, window.len() as i128);
        prop_assert_eq!(sys.exact_average(&Point::Cyclic(x), &f).unwrap(), Some(expected));
    }

    #[test]
    fn fluctuation_count_is_shift_invariant_on_cyclic(
        values in prop::collection::vec(0i64..2, 4..24),
        x in 0u64..24,
        k in 0u64..24,
    ) {
        // Averages along [0, n) at x and at x + k·m coincide.
        let vals: Vec<Rational> = values.iter().map(|&v| Rational::from_integer(v as i128)).collect();
        let sys = SampleableSystem::FiniteCyclic(CyclicSystem::new(&vals).unwrap());
        let m = values.len() as u64;
        let sets: Vec<FiniteSubset> = (0..12).map(|n| FiniteSubset::interval(0, n)).collect();
        let a = sys.averages(&Point::Cyclic(x), &sets).unwrap();
        let b = sys.averages(&Point::Cyclic(x + k * m), &sets).unwrap();
        prop_assert_eq!(a.clone(), b);
        let (lo, hi) = (Rational::new(1, 4), Rational::new(3, 4));
        prop_assert_eq!(a.fluctuations(&lo, &hi), count_fluctuations(&a.to_f64(), &0.25, &0.75));
    }
}
