use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use super::fluct::count_fluctuations;
use crate::error::{invalid, Error, Result};
use crate::foelner::FoelnerSequence;
use crate::group::{GroupKind, RunList};
use crate::rational::Rational;

/// Largest period enumerated level by level.
pub const ENUMERATION_LIMIT: u64 = 1 << 22;

/// Number of points (levels) per fluctuation count.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FluctuationHistogram {
    pub counts: BTreeMap<usize, u128>,
    pub total: u128,
}

impl FluctuationHistogram {
    pub fn add(&mut self, count: usize, weight: u128) {
        *self.counts.entry(count).or_default() += weight;
        self.total += weight;
    }

    pub fn merge(mut self, other: FluctuationHistogram) -> FluctuationHistogram {
        for (k, v) in other.counts {
            *self.counts.entry(k).or_default() += v;
        }
        self.total += other.total;
        self
    }

    /// Fraction of points with at least `n` fluctuations.
    pub fn mu_at_least(&self, n: usize) -> Rational {
        if self.total == 0 {
            return Rational::from_integer(0);
        }
        let hits: u128 = self.counts.range(n..).map(|(_, v)| v).sum();
        Rational::new(hits as i128, self.total as i128)
    }

    pub fn max_count(&self) -> usize {
        self.counts.keys().next_back().copied().unwrap_or(0)
    }
}

/// Observable on the dyadic odometer that only reads the level
/// `x mod 2^depth`; values are `label / denominator`.
pub trait PeriodicLabels: Send + Sync + fmt::Debug {
    fn depth(&self) -> u32;

    fn period(&self) -> u64 {
        1u64 << self.depth()
    }

    fn denominator(&self) -> i128 {
        1
    }

    fn label(&self, level: u64) -> i128;

    /// `Σ_{t<len} label((start + t) mod period)`.
    fn window_sum(&self, start: u64, len: u64) -> i128;

    /// Histogram of fluctuation counts of `(A_n f(x))_{n ≤ horizon}` over all levels.
    fn fluctuation_histogram(
        &self,
        seq: &FoelnerSequence,
        alpha: &Rational,
        beta: &Rational,
        horizon: usize,
    ) -> Result<FluctuationHistogram> {
        enumerate_levels(self, seq, alpha, beta, horizon)
    }
}

pub(crate) fn runlists(seq: &FoelnerSequence, horizon: usize) -> Result<Vec<RunList>> {
    if seq.group() != GroupKind::Integers {
        return Err(Error::GroupMismatch(GroupKind::Integers, seq.group()));
    }
    seq.check_horizon(horizon)?;
    Ok(seq.sets()[..horizon].iter().map(|s| s.to_runlist().expect("integer subset")).collect())
}

/// Exact averages `A_n f` at `level` for every run-list.
pub fn level_averages(labels: &(impl PeriodicLabels + ?Sized), sets: &[RunList], level: u64) -> Vec<Rational> {
    let p = labels.period() as i128;
    let den = labels.denominator();
    sets.iter()
        .map(|r| {
            let sum: i128 = r
                .runs()
                .iter()
                .map(|&(a, b)| {
                    let start = (level as i128 + a as i128).rem_euclid(p) as u64;
                    labels.window_sum(start, (b - a) as u64 + 1)
                })
                .sum();
            Rational::new(sum, r.len() as i128 * den)
        })
        .collect()
}

/// Level-by-level enumeration; refuses periods above [`ENUMERATION_LIMIT`].
pub fn enumerate_levels(
    labels: &(impl PeriodicLabels + ?Sized),
    seq: &FoelnerSequence,
    alpha: &Rational,
    beta: &Rational,
    horizon: usize,
) -> Result<FluctuationHistogram> {
    let period = labels.period();
    if period > ENUMERATION_LIMIT {
        return Err(Error::NotEnumerable(format!("period 2^{} exceeds the enumeration limit", labels.depth())));
    }
    let sets = runlists(seq, horizon)?;
    let hist = (0..period)
        .into_par_iter()
        .fold(FluctuationHistogram::default, |mut h, v| {
            let avg = level_averages(labels, &sets, v);
            h.add(count_fluctuations(&avg, alpha, beta), 1);
            h
        })
        .reduce(FluctuationHistogram::default, FluctuationHistogram::merge);
    Ok(hist)
}

pub(crate) fn periodic_window_sum(prefix: &[i128], start: u64, len: u64) -> i128 {
    let p = (prefix.len() - 1) as u64;
    let total = prefix[p as usize];
    let start = start % p;
    let full = (len / p) as i128;
    let rest = len % p;
    let end = start + rest;
    let partial = if end <= p {
        prefix[end as usize] - prefix[start as usize]
    } else {
        total - prefix[start as usize] + prefix[(end - p) as usize]
    };
    full * total + partial
}

pub(crate) fn prefix_sums(values: &[i128]) -> Vec<i128> {
    let mut out = Vec::with_capacity(values.len() + 1);
    out.push(0);
    let mut acc = 0;
    for v in values {
        acc += v;
        out.push(acc);
    }
    out
}

/// An explicit label table of length `2^depth`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseLabels {
    depth: u32,
    den: i128,
    values: Vec<i128>,
    prefix: Vec<i128>,
}

impl DenseLabels {
    pub fn new(depth: u32, values: Vec<i128>, den: i128) -> Result<Self> {
        if depth > 26 {
            return Err(invalid(format!("dense label table of depth {depth} is too large")));
        }
        if values.len() as u64 != 1u64 << depth {
            return Err(invalid(format!("expected {} labels, got {}", 1u64 << depth, values.len())));
        }
        if den <= 0 || values.iter().any(|&v| v < 0 || v > den) {
            return Err(invalid("labels must lie in [0, 1]"));
        }
        let prefix = prefix_sums(&values);
        Ok(DenseLabels { depth, den, values, prefix })
    }

    /// `level mod 2`.
    pub fn parity(depth: u32) -> Result<Self> {
        if depth == 0 {
            return Err(invalid("parity needs depth at least 1"));
        }
        DenseLabels::new(depth, (0..1i128 << depth).map(|v| v & 1).collect(), 1)
    }

    /// Indicator of a set of levels.
    pub fn indicator(depth: u32, levels: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut values = vec![0; 1usize << depth];
        for v in levels {
            let slot = values.get_mut(v as usize).ok_or_else(|| invalid(format!("level {v} out of range")))?;
            *slot = 1;
        }
        DenseLabels::new(depth, values, 1)
    }

    pub fn values(&self) -> &[i128] {
        &self.values
    }
}

impl PeriodicLabels for DenseLabels {
    fn depth(&self) -> u32 {
        self.depth
    }

    fn denominator(&self) -> i128 {
        self.den
    }

    fn label(&self, level: u64) -> i128 {
        self.values[(level % self.period()) as usize]
    }

    fn window_sum(&self, start: u64, len: u64) -> i128 {
        periodic_window_sum(&self.prefix, start, len)
    }
}
