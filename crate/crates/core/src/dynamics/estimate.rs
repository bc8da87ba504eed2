use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::labels::FluctuationHistogram;
use super::system::{Point, SampleableSystem};
use crate::covering::OrbitData;
use crate::error::{invalid, Error, Result};
use crate::foelner::FoelnerSequence;
use crate::group::FiniteSubset;
use crate::rational::Rational;

/// Two-sided 95% normal quantile.
pub const WILSON_Z: f64 = 1.959964;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FluctuationQuery {
    pub alpha: Rational,
    pub beta: Rational,
    pub n: usize,
    pub horizon: usize,
}

impl FluctuationQuery {
    pub fn new(alpha: Rational, beta: Rational, n: usize, horizon: usize) -> Result<Self> {
        if alpha >= beta {
            return Err(invalid(format!("gap needs alpha < beta, got ({alpha}, {beta})")));
        }
        if horizon == 0 {
            return Err(invalid("horizon must be at least 1"));
        }
        Ok(FluctuationQuery { alpha, beta, n, horizon })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateReport {
    pub estimate: f64,
    pub hits: u64,
    pub samples: u64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
    pub exact: bool,
    pub n: usize,
    pub horizon: usize,
}

impl EstimateReport {
    pub fn contains(&self, p: f64) -> bool {
        self.ci_low <= p && p <= self.ci_high
    }
}

/// Wilson score interval for `hits / samples`.
pub fn wilson_interval(hits: u64, samples: u64, z: f64) -> (f64, f64) {
    if samples == 0 {
        return (0.0, 1.0);
    }
    let n = samples as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = (center - half).clamp(0.0, 1.0).min(p);
    let hi = (center + half).clamp(0.0, 1.0).max(p);
    (lo, hi)
}

fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Fluctuation count of every sampled point; sample `i` always uses stream `i`.
pub fn fluctuation_counts(
    sys: &SampleableSystem,
    seq: &FoelnerSequence,
    alpha: &Rational,
    beta: &Rational,
    horizon: usize,
    samples: u64,
    seed: u64,
) -> Result<Vec<usize>> {
    if samples == 0 {
        return Err(invalid("need at least one sample"));
    }
    if alpha >= beta {
        return Err(invalid("gap needs alpha < beta"));
    }
    seq.check_horizon(horizon)?;
    if seq.group() != sys.group() {
        return Err(Error::GroupMismatch(sys.group(), seq.group()));
    }
    let sets = &seq.sets()[..horizon];
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let x = sys.sample(&mut sample_rng(seed, i));
            Ok(sys.averages(&x, sets)?.fluctuations(alpha, beta))
        })
        .collect()
}

pub fn report_from_counts(counts: &[usize], n: usize, horizon: usize, seed: u64) -> EstimateReport {
    let hits = counts.iter().filter(|&&c| c >= n).count() as u64;
    let samples = counts.len() as u64;
    let (ci_low, ci_high) = wilson_interval(hits, samples, WILSON_Z);
    EstimateReport {
        estimate: hits as f64 / samples as f64,
        hits,
        samples,
        ci_low,
        ci_high,
        seed,
        exact: false,
        n,
        horizon,
    }
}

/// Monte Carlo `μ(D_{N,M})`.
pub fn estimate_mu_dn(
    sys: &SampleableSystem,
    seq: &FoelnerSequence,
    query: &FluctuationQuery,
    samples: u64,
    seed: u64,
) -> Result<EstimateReport> {
    let counts = fluctuation_counts(sys, seq, &query.alpha, &query.beta, query.horizon, samples, seed)?;
    Ok(report_from_counts(&counts, query.n, query.horizon, seed))
}

/// Estimates for several `N` from one sample set.
pub fn estimate_curve(
    sys: &SampleableSystem,
    seq: &FoelnerSequence,
    alpha: &Rational,
    beta: &Rational,
    horizon: usize,
    ns: &[usize],
    samples: u64,
    seed: u64,
) -> Result<Vec<EstimateReport>> {
    let counts = fluctuation_counts(sys, seq, alpha, beta, horizon, samples, seed)?;
    Ok(ns.iter().map(|&n| report_from_counts(&counts, n, horizon, seed)).collect())
}

/// Fluctuation counts of every point, for systems that can be enumerated.
pub fn exact_histogram(
    sys: &SampleableSystem,
    seq: &FoelnerSequence,
    alpha: &Rational,
    beta: &Rational,
    horizon: usize,
) -> Result<FluctuationHistogram> {
    if alpha >= beta {
        return Err(invalid("gap needs alpha < beta"));
    }
    seq.check_horizon(horizon)?;
    if seq.group() != sys.group() {
        return Err(Error::GroupMismatch(sys.group(), seq.group()));
    }
    match sys {
        SampleableSystem::FiniteCyclic(c) => {
            let sets = &seq.sets()[..horizon];
            let counts: Vec<usize> = (0..c.size())
                .into_par_iter()
                .map(|x| {
                    let avg = sys.averages(&Point::Cyclic(x), sets)?;
                    Ok(avg.fluctuations(alpha, beta))
                })
                .collect::<Result<_>>()?;
            let mut hist = FluctuationHistogram::default();
            for k in counts {
                hist.add(k, 1);
            }
            Ok(hist)
        }
        SampleableSystem::Odometer(o) => o.labels().fluctuation_histogram(seq, alpha, beta, horizon),
        _ => Err(Error::NotEnumerable("only cyclic and odometer systems are enumerable".into())),
    }
}

/// Exact `μ(D_{N,M})` by enumeration.
pub fn exact_mu_dn(sys: &SampleableSystem, seq: &FoelnerSequence, query: &FluctuationQuery) -> Result<Rational> {
    if query.n == 0 && sys.is_exact() {
        return Ok(Rational::from_integer(1));
    }
    Ok(exact_histogram(sys, seq, &query.alpha, &query.beta, query.horizon)?.mu_at_least(query.n))
}

/// Crossing indices of `(A_n f(T_c x))_{n ≤ horizon}` for every center `c`.
pub fn orbit_crossings(
    sys: &SampleableSystem,
    x: &Point,
    seq: &FoelnerSequence,
    centers: &FiniteSubset,
    horizon: usize,
    alpha: &Rational,
    beta: &Rational,
) -> Result<OrbitData> {
    seq.check_horizon(horizon)?;
    let sets = &seq.sets()[..horizon];
    let mut out = BTreeMap::new();
    for c in centers.iter() {
        let y = sys.act(&c, x)?;
        out.insert(c, sys.averages(&y, sets)?.crossings(alpha, beta));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::CyclicSystem;

    #[test]
    fn wilson_contains_estimate() {
        for (k, n) in [(0, 10), (10, 10), (3, 7), (500, 1000)] {
            let (lo, hi) = wilson_interval(k, n, WILSON_Z);
            let p = k as f64 / n as f64;
            assert!(lo <= p && p <= hi);
        }
        let (lo, hi) = wilson_interval(500, 1000, WILSON_Z);
        assert!((lo - 0.469).abs() < 1e-3 && (hi - 0.531).abs() < 1e-3);
    }

    #[test]
    fn cyclic_exact_example() {
        let sys = SampleableSystem::FiniteCyclic(CyclicSystem::indicator(8, [0]).unwrap());
        let seq = FoelnerSequence::explicit(
            crate::group::GroupKind::Integers,
            vec![FiniteSubset::from_ints([0]), FiniteSubset::interval(0, 7)],
        )
        .unwrap();
        let q = FluctuationQuery::new(Rational::new(1, 20), Rational::new(1, 2), 1, 2).unwrap();
        // Averages (f(x), 1/8): a down at n=1 needs f(x)=0, and 1/8 never reaches 1/2.
        assert_eq!(exact_mu_dn(&sys, &seq, &q).unwrap(), Rational::from_integer(0));
        let q0 = FluctuationQuery { n: 0, ..q };
        assert_eq!(exact_mu_dn(&sys, &seq, &q0).unwrap(), Rational::from_integer(1));
    }

    #[test]
    fn estimates_are_deterministic() {
        let sys = SampleableSystem::FiniteCyclic(CyclicSystem::indicator(16, [0, 1, 2, 9]).unwrap());
        let seq = FoelnerSequence::builtin(crate::foelner::BuiltinKind::Intervals, 8).unwrap();
        let q = FluctuationQuery::new(Rational::new(1, 5), Rational::new(2, 5), 1, 8).unwrap();
        let a = estimate_mu_dn(&sys, &seq, &q, 200, 42).unwrap();
        let b = estimate_mu_dn(&sys, &seq, &q, 200, 42).unwrap();
        assert_eq!(a, b);
    }
}
