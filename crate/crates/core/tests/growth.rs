use fluctlab_core::covering::{growth_step, initial_selection, CoveringSelection, GrowthParams};
use fluctlab_core::dynamics::{orbit_crossings, theorem_bound, CyclicSystem, Point, SampleableSystem};
use fluctlab_core::foelner::{BuiltinKind, FoelnerSequence};
use fluctlab_core::{Error, FiniteSubset, GroupKind, Rational};

fn staircase() -> SampleableSystem {
    let points = (0..4).chain(16..64).chain(256..1024);
    SampleableSystem::FiniteCyclic(CyclicSystem::indicator(1 << 14, points).unwrap())
}

fn params() -> GrowthParams {
    let (alpha, beta, sup) = (Rational::new(3, 10), Rational::new(7, 10), Rational::from_integer(1));
    let bc = theorem_bound(&alpha, &beta, &sup).unwrap();
    GrowthParams { alpha, beta, bound: sup, eps: bc.eps, delta: bc.delta, q: 1, lambda: bc.lambda }
}

#[test]
fn one_step_on_staircase_grows() {
    let seq = FoelnerSequence::builtin(BuiltinKind::Powers { base: 4 }, 6).unwrap();
    let p = params();
    let centers = FiniteSubset::interval(0, 7);
    let orbit = orbit_crossings(&staircase(), &Point::Cyclic(0), &seq, &centers, 6, &p.alpha, &p.beta).unwrap();
    let start = initial_selection(&seq, &orbit, &centers, &p).unwrap();
    assert!(start.certify(&seq).unwrap().is_feasible());
    let out = growth_step(&seq, &orbit, &start, &p).unwrap();
    assert!(out.holds(), "{out:?}");
    let ratio = out.growth_ratio().unwrap();
    assert!(ratio >= Rational::new(5, 4), "ratio {ratio}");
    assert!(out.size_intermediate >= out.size_before);
}

#[test]
fn empty_selection_stays_empty() {
    let seq = FoelnerSequence::builtin(BuiltinKind::Powers { base: 4 }, 3).unwrap();
    let p = params();
    let orbit = Default::default();
    let empty = CoveringSelection::empty(GroupKind::Integers, p.eps);
    let out = growth_step(&seq, &orbit, &empty, &p).unwrap();
    assert!(out.next.pairs.is_empty());
    assert_eq!(out.size_after, 0);
}

#[test]
fn inconsistent_constants_are_rejected() {
    let seq = FoelnerSequence::builtin(BuiltinKind::Powers { base: 4 }, 3).unwrap();
    let mut p = params();
    p.delta = Rational::new(1, 2);
    p.eps = Rational::new(1, 5);
    let empty = CoveringSelection::empty(GroupKind::Integers, p.eps);
    let err = growth_step(&seq, &Default::default(), &empty, &p).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)), "{err}");
}

#[test]
fn missing_crossings_are_insufficient() {
    let seq = FoelnerSequence::builtin(BuiltinKind::Powers { base: 4 }, 6).unwrap();
    let mut p = params();
    p.q = 50;
    let centers = FiniteSubset::interval(0, 3);
    let orbit = orbit_crossings(&staircase(), &Point::Cyclic(0), &seq, &centers, 6, &p.alpha, &p.beta).unwrap();
    let err = initial_selection(&seq, &orbit, &centers, &p).unwrap_err();
    assert!(matches!(err, Error::Insufficient(_)), "{err}");
}
