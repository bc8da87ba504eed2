use num_integer::Roots;
use num_traits::{One, Zero};

use crate::dynamics::count_fluctuations;
use crate::error::{invalid, overflow, Error, Result};
use crate::group::RunList;
use crate::rational::{floor_i128, Rational};

/// Runs allowed in a single block set.
pub const RUN_LIMIT: i128 = 20_000_000;

/// `1` iff `t mod 2l ∈ [0, l-1]`.
pub fn phi(l: u64, t: u64) -> u8 {
    u8::from(t % (2 * l) < l)
}

/// `#{0 ≤ t < n : φ_l(t) = 1}`.
pub fn phi_prefix(l: u64, n: u64) -> u64 {
    (n / (2 * l)) * l + (n % (2 * l)).min(l)
}

/// `Σ_{z ∈ runs} φ_l(z + shift)`; every `z + shift` must be nonnegative.
pub fn phi_sum(l: u64, runs: &RunList, shift: u64) -> u64 {
    runs.runs()
        .iter()
        .map(|&(a, b)| {
            let lo = (a as i128 + shift as i128) as u64;
            let hi = (b as i128 + shift as i128) as u64;
            phi_prefix(l, hi + 1) - phi_prefix(l, lo)
        })
        .sum()
}

/// `A_1, …, A_{2N}` for parameters `λ`, `l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSequence {
    lambda: Rational,
    l: u64,
    pairs: usize,
    sets: Vec<RunList>,
    /// `M_0 = l²`, then `M_n = max A_n`.
    maxima: Vec<u64>,
}

fn checked_i64(x: i128, what: &str) -> Result<i64> {
    i64::try_from(x).map_err(|_| overflow(format!("{what} = {x} exceeds i64")))
}

impl BlockSequence {
    pub fn build(lambda: Rational, l: u64, pairs: usize) -> Result<Self> {
        if lambda <= Rational::zero() {
            return Err(invalid("lambda must be positive"));
        }
        if l < 4 {
            return Err(invalid("l must be at least 4"));
        }
        if pairs == 0 {
            return Err(invalid("need at least one pair"));
        }
        let two_l = 2 * l as i128;
        let m0 = (l as i128).checked_mul(l as i128).ok_or_else(|| overflow("l^2"))?;
        let mut maxima = vec![checked_i64(m0, "M_0")? as u64];
        let mut sets = Vec::with_capacity(2 * pairs);
        for n in 1..=2 * pairs {
            let m = Rational::from_integer(*maxima.last().unwrap() as i128);
            let solid = checked_i64(floor_i128(&(Rational::from_integer(2) / lambda * m)), "segment end")?;
            let reach = (Rational::from_integer(2) + lambda) / lambda * m;
            let (offset, end) = if n % 2 == 1 {
                (0, floor_i128(&reach))
            } else {
                (l as i128, floor_i128(&(reach - Rational::from_integer(two_l - 1))))
            };
            let end = checked_i64(end, "block end")?;
            let estimate = (end as i128 - solid as i128).max(0) / two_l + 1;
            if estimate > RUN_LIMIT {
                return Err(Error::Budget(format!("A_{n} would need about {estimate} runs (limit {RUN_LIMIT})")));
            }
            let mut runs = vec![(0i64, solid)];
            // First period index whose segment reaches beyond the solid part.
            let first = ((solid as i128 + 1 - offset - l as i128 + 1).max(0) + two_l - 1) / two_l;
            let mut t = first;
            loop {
                let a = t * two_l + offset;
                if a > end as i128 {
                    break;
                }
                let b = (a + l as i128 - 1).min(end as i128);
                runs.push((a.max(0) as i64, b as i64));
                t += 1;
            }
            let set = RunList::from_runs(runs);
            maxima.push(set.max().expect("nonempty") as u64);
            sets.push(set);
        }
        Ok(BlockSequence { lambda, l, pairs, sets, maxima })
    }

    pub fn lambda(&self) -> Rational {
        self.lambda
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    pub fn pairs(&self) -> usize {
        self.pairs
    }

    pub fn sets(&self) -> &[RunList] {
        &self.sets
    }

    /// `A_n`, `1 ≤ n ≤ 2N`.
    pub fn set(&self, n: usize) -> &RunList {
        &self.sets[n - 1]
    }

    /// `M_0, …, M_{2N}`.
    pub fn maxima(&self) -> &[u64] {
        &self.maxima
    }

    pub fn last_max(&self) -> u64 {
        *self.maxima.last().unwrap()
    }

    pub fn gap(&self) -> (Rational, Rational) {
        gap_for(self.lambda)
    }
}

/// `(½ - λ/(5(4+λ)), ½ + λ/(5(4+λ)))`.
pub fn gap_for(lambda: Rational) -> (Rational, Rational) {
    let w = lambda / (Rational::from_integer(5) * (Rational::from_integer(4) + lambda));
    let half = Rational::new(1, 2);
    (half - w, half + w)
}

#[derive(Clone, Debug)]
pub struct PropertyAReport {
    /// `|(⋃_{i<n} A_i)⁻¹ A_n| / |A_n|` with `A_0 = [0, l²]`.
    pub ratios: Vec<Rational>,
    pub bound: Rational,
    pub passes: bool,
}

pub fn verify_property_a(b: &BlockSequence) -> PropertyAReport {
    let mut prefix = RunList::interval(0, b.maxima[0] as i64);
    let mut ratios = Vec::with_capacity(b.sets.len());
    for a in &b.sets {
        let size = prefix.negate().sumset(a).len();
        ratios.push(Rational::new(size as i128, a.len() as i128));
        prefix = prefix.union(a);
    }
    let bound = Rational::one() + b.lambda;
    let passes = ratios.iter().all(|r| *r <= bound);
    PropertyAReport { ratios, bound, passes }
}

#[derive(Clone, Debug)]
pub struct PropertyBReport {
    pub max_ratio: Rational,
    /// `(n, b)` attaining the maximum.
    pub argmax: (usize, i64),
    pub radius: i64,
    pub passes: bool,
}

impl PropertyBReport {
    pub fn threshold(&self, l: u64) -> f64 {
        2.0 / (l as f64).sqrt()
    }
}

/// `max |(b + A_n) △ A_n| / |A_n|` over `|b| ≤ ⌊√l⌋`, compared with `2/√l`
/// through `ratio² ≤ 4/l`.
pub fn verify_property_b(b: &BlockSequence) -> PropertyBReport {
    verify_invariance(b, b.l.sqrt() as i64)
}

pub fn verify_invariance(b: &BlockSequence, radius: i64) -> PropertyBReport {
    let mut best = (Rational::zero(), (1, 0));
    for (idx, a) in b.sets.iter().enumerate() {
        for s in 1..=radius {
            // |(s + A) △ A| = |(-s + A) △ A|.
            let r = Rational::new(a.shift_symdiff_len(s) as i128, a.len() as i128);
            if r > best.0 {
                best = (r, (idx + 1, s));
            }
        }
    }
    let passes = best.0 * best.0 <= Rational::new(4, b.l as i128);
    PropertyBReport { max_ratio: best.0, argmax: best.1, radius, passes }
}

#[derive(Clone, Debug)]
pub struct PropertyCReport {
    pub offset: u64,
    pub shift: u64,
    /// `(1/|A_n|) Σ_{z ∈ A_n} φ_l(z + 2lk + i)`.
    pub averages: Vec<Rational>,
    /// `½ + λ/(4(4+λ)) − 4/l`.
    pub odd_lower: Rational,
    /// `½ − λ/(4(4+λ)) + 4/l`.
    pub even_upper: Rational,
    pub alpha: Rational,
    pub beta: Rational,
    pub bounds_hold: bool,
    pub count: usize,
    /// The two bounds alone already force the gap.
    pub separated: bool,
}

impl PropertyCReport {
    pub fn passes(&self, pairs: usize) -> bool {
        self.bounds_hold && self.count == pairs
    }
}

pub fn verify_property_c(b: &BlockSequence, offset: u64, shift: u64) -> Result<PropertyCReport> {
    if 4 * offset > b.l {
        return Err(invalid(format!("offset {offset} exceeds l/4")));
    }
    let s = 2 * b.l * shift + offset;
    let averages: Vec<Rational> =
        b.sets.iter().map(|a| Rational::new(phi_sum(b.l, a, s) as i128, a.len() as i128)).collect();
    let half = Rational::new(1, 2);
    let w = b.lambda / (Rational::from_integer(4) * (Rational::from_integer(4) + b.lambda));
    let err = Rational::new(4, b.l as i128);
    let odd_lower = half + w - err;
    let even_upper = half - w + err;
    let (alpha, beta) = b.gap();
    let bounds_hold = averages
        .iter()
        .enumerate()
        .all(|(i, v)| if i % 2 == 0 { *v >= odd_lower } else { *v <= even_upper });
    let count = count_fluctuations(&averages, &alpha, &beta);
    let separated = odd_lower >= beta && even_upper <= alpha;
    Ok(PropertyCReport { offset, shift, averages, odd_lower, even_upper, alpha, beta, bounds_hold, count, separated })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_values() {
        assert_eq!((phi(4, 0), phi(4, 3), phi(4, 5), phi(4, 8)), (1, 1, 0, 1));
        for k in 1..6 {
            assert_eq!(phi_prefix(4, 8 * k), 4 * k);
        }
    }

    #[test]
    fn first_block_small_case() {
        let b = BlockSequence::build(Rational::one(), 4, 1).unwrap();
        assert_eq!(b.maxima()[0], 16);
        assert_eq!(b.set(1).runs(), &[(0, 35), (40, 43), (48, 48)]);
        assert_eq!(b.set(1).len(), 41);
        assert_eq!(b.maxima()[1], 48);
    }

    #[test]
    fn gap_at_unit_lambda() {
        assert_eq!(gap_for(Rational::one()), (Rational::new(23, 50), Rational::new(27, 50)));
    }
}
