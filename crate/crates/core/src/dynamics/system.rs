use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use rand::Rng;

use super::fluct::{count_fluctuations, crossings, Crossings};
use super::labels::{periodic_window_sum, prefix_sums, PeriodicLabels};
use crate::error::{invalid, Error, Result};
use crate::group::{FiniteSubset, GroupElement, GroupKind};
use crate::rational::{to_f64, Rational};

/// Summands allowed in one pointwise average (rotation, Bernoulli).
pub const SUMMAND_CAP: u64 = 10_000_000;

/// `ℤ/m` with `T_n x = x + n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicSystem {
    num: Vec<i128>,
    den: i128,
    prefix: Vec<i128>,
}

impl CyclicSystem {
    pub fn new(values: &[Rational]) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("cyclic system needs m >= 1"));
        }
        let den = values.iter().fold(1i128, |d, v| d.lcm(v.denom()));
        let num: Vec<i128> = values.iter().map(|v| v.numer() * (den / v.denom())).collect();
        let prefix = prefix_sums(&num);
        Ok(CyclicSystem { num, den, prefix })
    }

    pub fn indicator(m: u64, points: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut values = vec![Rational::from_integer(0); m as usize];
        for p in points {
            let slot = values.get_mut(p as usize).ok_or_else(|| invalid(format!("point {p} outside Z/{m}")))?;
            *slot = Rational::from_integer(1);
        }
        Self::new(&values)
    }

    pub fn size(&self) -> u64 {
        self.num.len() as u64
    }

    pub fn value(&self, x: u64) -> Rational {
        Rational::new(self.num[(x % self.size()) as usize], self.den)
    }

    /// `f + c`.
    pub fn shifted(&self, c: &Rational) -> Result<Self> {
        let values: Vec<Rational> = (0..self.size()).map(|x| self.value(x) + c).collect();
        Self::new(&values)
    }

    fn window_sum(&self, start: u64, len: u64) -> i128 {
        periodic_window_sum(&self.prefix, start, len)
    }
}

/// `x ↦ x + θ mod 1` with `f = 1_{[lo, hi)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct RotationSystem {
    pub theta: f64,
    pub lo: f64,
    pub hi: f64,
}

impl RotationSystem {
    pub fn new(theta: f64, lo: f64, hi: f64) -> Result<Self> {
        if !theta.is_finite() || !(0.0..=1.0).contains(&lo) || !(lo..=1.0).contains(&hi) {
            return Err(invalid("rotation needs finite theta and 0 <= lo <= hi <= 1"));
        }
        Ok(RotationSystem { theta, lo, hi })
    }

    fn at(&self, x: f64, n: i64) -> f64 {
        (x + n as f64 * self.theta).rem_euclid(1.0)
    }

    fn observe(&self, x: f64) -> f64 {
        if x >= self.lo && x < self.hi {
            1.0
        } else {
            0.0
        }
    }
}

/// Product measure on `A^G`, coordinates drawn lazily from a keyed hash.
#[derive(Clone, Debug, PartialEq)]
pub struct BernoulliShift {
    group: GroupKind,
    thresholds: Vec<u64>,
    values: Vec<f64>,
    seed: u64,
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl BernoulliShift {
    /// Symbol `k` has probability `weights[k]` and `f`-value `values[k]`.
    pub fn new(group: GroupKind, weights: &[f64], values: &[f64], seed: u64) -> Result<Self> {
        if weights.is_empty() || weights.len() != values.len() {
            return Err(invalid("need one value per symbol"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) || values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("weights must be nonnegative and values finite"));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(invalid("weights must not all vanish"));
        }
        let mut acc = 0.0;
        let mut thresholds: Vec<u64> = weights
            .iter()
            .map(|w| {
                acc += w / total;
                if acc >= 1.0 {
                    u64::MAX
                } else {
                    (acc * 2f64.powi(64)) as u64
                }
            })
            .collect();
        *thresholds.last_mut().unwrap() = u64::MAX;
        Ok(BernoulliShift { group, thresholds, values: values.to_vec(), seed })
    }

    /// Bernoulli(1/2) with `f` the identity coordinate.
    pub fn fair_coin(group: GroupKind, seed: u64) -> Self {
        Self::new(group, &[0.5, 0.5], &[0.0, 1.0], seed).expect("valid")
    }

    pub fn symbol(&self, key: u64, g: &GroupElement) -> usize {
        let mut h = mix(self.seed ^ mix(key));
        for c in g.coords() {
            h = mix(h ^ c as u64);
        }
        self.thresholds.iter().position(|&t| h < t).unwrap_or(self.thresholds.len() - 1)
    }

    fn observe(&self, key: u64, g: &GroupElement) -> f64 {
        self.values[self.symbol(key, g)]
    }
}

/// Add-one-with-carry on `{0,1}^ℕ`, first 64 coordinates held as a `u64`.
#[derive(Clone, Debug)]
pub struct OdometerSystem {
    labels: Arc<dyn PeriodicLabels>,
}

impl OdometerSystem {
    pub fn new(labels: Arc<dyn PeriodicLabels>) -> Result<Self> {
        if labels.depth() > 62 {
            return Err(invalid("odometer depth must be at most 62"));
        }
        Ok(OdometerSystem { labels })
    }

    pub fn labels(&self) -> &Arc<dyn PeriodicLabels> {
        &self.labels
    }

    pub fn level(&self, x: u64) -> u64 {
        x & (self.labels.period() - 1)
    }
}

#[derive(Clone, Debug)]
pub enum SampleableSystem {
    FiniteCyclic(CyclicSystem),
    Rotation(RotationSystem),
    Bernoulli(BernoulliShift),
    Odometer(OdometerSystem),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    Cyclic(u64),
    Rotation(f64),
    /// `ω(h) = symbol(key, offset · h)`.
    Shift { key: u64, offset: GroupElement },
    Odometer(u64),
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Cyclic(x) => write!(f, "{x}"),
            Point::Rotation(x) => write!(f, "{x}"),
            Point::Shift { key, offset } => write!(f, "{key:016x}@{offset}"),
            Point::Odometer(x) => write!(f, "{x:#x}"),
        }
    }
}

/// `(A_n f(x))_{n ≤ M}`, exact where the system allows it.
#[derive(Clone, Debug, PartialEq)]
pub enum AverageSeq {
    Exact(Vec<Rational>),
    Approx(Vec<f64>),
}

impl AverageSeq {
    pub fn len(&self) -> usize {
        match self {
            AverageSeq::Exact(v) => v.len(),
            AverageSeq::Approx(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            AverageSeq::Exact(v) => v.iter().map(to_f64).collect(),
            AverageSeq::Approx(v) => v.clone(),
        }
    }

    pub fn fluctuations(&self, alpha: &Rational, beta: &Rational) -> usize {
        match self {
            AverageSeq::Exact(v) => count_fluctuations(v, alpha, beta),
            AverageSeq::Approx(v) => count_fluctuations(v, &to_f64(alpha), &to_f64(beta)),
        }
    }

    pub fn crossings(&self, alpha: &Rational, beta: &Rational) -> Crossings {
        match self {
            AverageSeq::Exact(v) => crossings(v, alpha, beta),
            AverageSeq::Approx(v) => crossings(v, &to_f64(alpha), &to_f64(beta)),
        }
    }
}

fn int_of(g: &GroupElement) -> Result<i64> {
    g.as_int().ok_or(Error::GroupMismatch(GroupKind::Integers, g.kind()))
}

impl SampleableSystem {
    pub fn group(&self) -> GroupKind {
        match self {
            SampleableSystem::Bernoulli(b) => b.group,
            _ => GroupKind::Integers,
        }
    }

    /// `S = sup |f|`.
    pub fn bound(&self) -> f64 {
        match self {
            SampleableSystem::FiniteCyclic(c) => {
                c.num.iter().map(|v| v.abs()).max().map_or(0.0, |v| v as f64 / c.den as f64)
            }
            SampleableSystem::Rotation(_) => 1.0,
            SampleableSystem::Bernoulli(b) => b.values.iter().fold(0.0, |m, v| m.max(v.abs())),
            SampleableSystem::Odometer(o) => {
                let l = &o.labels;
                if l.period() <= super::labels::ENUMERATION_LIMIT {
                    let top = (0..l.period()).map(|v| l.label(v).abs()).max().unwrap_or(0);
                    top as f64 / l.denominator() as f64
                } else {
                    1.0
                }
            }
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, SampleableSystem::FiniteCyclic(_) | SampleableSystem::Odometer(_))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match self {
            SampleableSystem::FiniteCyclic(c) => Point::Cyclic(rng.gen_range(0..c.size())),
            SampleableSystem::Rotation(_) => Point::Rotation(rng.gen::<f64>()),
            SampleableSystem::Bernoulli(b) => Point::Shift { key: rng.gen(), offset: b.group.identity() },
            SampleableSystem::Odometer(_) => Point::Odometer(rng.gen()),
        }
    }

    fn check_point(&self, x: &Point) -> Result<()> {
        let ok = matches!(
            (self, x),
            (SampleableSystem::FiniteCyclic(_), Point::Cyclic(_))
                | (SampleableSystem::Rotation(_), Point::Rotation(_))
                | (SampleableSystem::Bernoulli(_), Point::Shift { .. })
                | (SampleableSystem::Odometer(_), Point::Odometer(_))
        );
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("point {x} does not belong to this system")))
        }
    }

    /// `T_g x`.
    pub fn act(&self, g: &GroupElement, x: &Point) -> Result<Point> {
        self.check_point(x)?;
        if g.kind() != self.group() {
            return Err(Error::GroupMismatch(self.group(), g.kind()));
        }
        Ok(match (self, x) {
            (SampleableSystem::FiniteCyclic(c), Point::Cyclic(p)) => {
                let m = c.size() as i128;
                Point::Cyclic((*p as i128 + int_of(g)? as i128).rem_euclid(m) as u64)
            }
            (SampleableSystem::Rotation(r), Point::Rotation(p)) => Point::Rotation(r.at(*p, int_of(g)?)),
            (SampleableSystem::Bernoulli(_), Point::Shift { key, offset }) => {
                Point::Shift { key: *key, offset: offset.mul(g)? }
            }
            (SampleableSystem::Odometer(_), Point::Odometer(p)) => Point::Odometer(p.wrapping_add(int_of(g)? as u64)),
            _ => unreachable!(),
        })
    }

    /// `f(x)`.
    pub fn observe(&self, x: &Point) -> Result<f64> {
        self.check_point(x)?;
        Ok(match (self, x) {
            (SampleableSystem::FiniteCyclic(c), Point::Cyclic(p)) => to_f64(&c.value(*p)),
            (SampleableSystem::Rotation(r), Point::Rotation(p)) => r.observe(*p),
            (SampleableSystem::Bernoulli(b), Point::Shift { key, offset }) => b.observe(*key, offset),
            (SampleableSystem::Odometer(o), Point::Odometer(p)) => {
                o.labels.label(o.level(*p)) as f64 / o.labels.denominator() as f64
            }
            _ => unreachable!(),
        })
    }

    fn check_set(&self, f: &FiniteSubset) -> Result<()> {
        if f.is_empty() {
            return Err(Error::EmptySet("averaging set"));
        }
        if f.group() != self.group() {
            return Err(Error::GroupMismatch(self.group(), f.group()));
        }
        Ok(())
    }

    /// Exact `A_F f(x)` for cyclic and odometer systems, `None` otherwise.
    pub fn exact_average(&self, x: &Point, f: &FiniteSubset) -> Result<Option<Rational>> {
        self.check_point(x)?;
        self.check_set(f)?;
        let (start, period, den, sum_window): (u64, u64, i128, Box<dyn Fn(u64, u64) -> i128 + '_>) = match (self, x) {
            (SampleableSystem::FiniteCyclic(c), Point::Cyclic(p)) => {
                (*p, c.size(), c.den, Box::new(move |s, l| c.window_sum(s, l)))
            }
            (SampleableSystem::Odometer(o), Point::Odometer(p)) => {
                let l = &o.labels;
                (o.level(*p), l.period(), l.denominator(), Box::new(move |s, n| l.window_sum(s, n)))
            }
            _ => return Ok(None),
        };
        let runs = f.to_runlist().expect("integer subset");
        let sum: i128 = runs
            .runs()
            .iter()
            .map(|&(a, b)| {
                let s = (start as i128 + a as i128).rem_euclid(period as i128) as u64;
                sum_window(s, (b - a) as u64 + 1)
            })
            .sum();
        Ok(Some(Rational::new(sum, runs.len() as i128 * den)))
    }

    /// `(1/|F|) Σ_{g ∈ F} f(T_g x)`.
    pub fn ergodic_average(&self, x: &Point, f: &FiniteSubset) -> Result<f64> {
        if let Some(r) = self.exact_average(x, f)? {
            return Ok(to_f64(&r));
        }
        if f.len() > SUMMAND_CAP {
            return Err(Error::Budget(format!("{} summands exceed the cap of {SUMMAND_CAP}", f.len())));
        }
        let sum: f64 = match (self, x) {
            (SampleableSystem::Rotation(r), Point::Rotation(p)) => {
                f.iter().map(|g| r.observe(r.at(*p, g.as_int().unwrap()))).sum()
            }
            (SampleableSystem::Bernoulli(b), Point::Shift { key, offset }) => {
                let mut s = 0.0;
                for g in f.iter() {
                    s += b.observe(*key, &offset.compose(&g));
                }
                s
            }
            _ => unreachable!(),
        };
        Ok(sum / f.len() as f64)
    }

    /// `(A_n f(x))_{n=1}^{horizon}`.
    pub fn averages(&self, x: &Point, sets: &[FiniteSubset]) -> Result<AverageSeq> {
        if self.is_exact() {
            let v = sets
                .iter()
                .map(|f| self.exact_average(x, f).map(|r| r.expect("exact system")))
                .collect::<Result<_>>()?;
            Ok(AverageSeq::Exact(v))
        } else {
            Ok(AverageSeq::Approx(sets.iter().map(|f| self.ergodic_average(x, f)).collect::<Result<_>>()?))
        }
    }
}
