use num_traits::{One, Zero};

use super::sequence::FoelnerSequence;
use super::temper::{overflow_sizes, tempered_report};
use crate::error::{invalid, Result};
use crate::group::{FiniteSubset, GroupElement, Side};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GoodnessCondition {
    /// `|⋃_{i<n} F_i⁻¹F_n \ F_n| ≤ λ|F_n|`.
    Overflow,
    /// `|F_n \ F_n f| < λ|F_n|` for every `f ∈ F_i`, `i < n`.
    TranslateDefect,
}

/// Which conditions a goodness check enforces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GoodnessMode {
    Full,
    /// Only the overflow condition; enough for the covering selection.
    OverflowOnly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodnessViolation {
    pub n: usize,
    pub condition: GoodnessCondition,
    pub f: Option<GroupElement>,
    /// Left-hand cardinality of the violated inequality.
    pub size: u64,
    /// `λ|F_n|`.
    pub bound: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodnessReport {
    pub good: bool,
    pub violation: Option<GoodnessViolation>,
}

fn check_lambda(lambda: &Rational) -> Result<()> {
    if *lambda <= Rational::zero() || *lambda >= Rational::one() {
        return Err(invalid(format!("lambda must lie in (0,1), got {lambda}")));
    }
    Ok(())
}

pub fn is_lambda_good(seq: &FoelnerSequence, lambda: &Rational, horizon: usize) -> Result<GoodnessReport> {
    check_goodness(seq, lambda, horizon, GoodnessMode::Full)
}

pub fn check_goodness(
    seq: &FoelnerSequence,
    lambda: &Rational,
    horizon: usize,
    mode: GoodnessMode,
) -> Result<GoodnessReport> {
    check_lambda(lambda)?;
    seq.check_horizon(horizon)?;
    let mut prefix: Option<FiniteSubset> = None;
    for n in 1..=horizon {
        let f = seq.get(n)?;
        let bound = *lambda * Rational::from_integer(f.len() as i128);
        if let Some(p) = &prefix {
            let spill = p.inverse().product(f)?.difference(f)?.len();
            if Rational::from_integer(spill as i128) > bound {
                let v = GoodnessViolation { n, condition: GoodnessCondition::Overflow, f: None, size: spill, bound };
                return Ok(GoodnessReport { good: false, violation: Some(v) });
            }
            if mode == GoodnessMode::Full {
                if let Some(v) = first_translate_defect(p, f, &bound, n)? {
                    return Ok(GoodnessReport { good: false, violation: Some(v) });
                }
            }
        }
        prefix = Some(match prefix {
            None => f.clone(),
            Some(p) => p.union(f)?,
        });
    }
    Ok(GoodnessReport { good: true, violation: None })
}

fn first_translate_defect(
    prefix: &FiniteSubset,
    f_n: &FiniteSubset,
    bound: &Rational,
    n: usize,
) -> Result<Option<GoodnessViolation>> {
    let runs = f_n.runs().cloned().or_else(|| prefix.runs().and(f_n.to_runlist()));
    for g in prefix.iter() {
        let missing = match (&runs, g.as_int()) {
            (Some(r), Some(s)) => r.len() - r.overlap_len(r, s),
            _ => f_n.difference(&f_n.translate(&g, Side::Right)?)?.len(),
        };
        if Rational::from_integer(missing as i128) >= *bound {
            return Ok(Some(GoodnessViolation {
                n,
                condition: GoodnessCondition::TranslateDefect,
                f: Some(g),
                size: missing,
                bound: *bound,
            }));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailIndex {
    /// Least `n0` whose tail (of at least two sets) is λ′-good, if any.
    pub n0: Option<usize>,
    /// Whether the `(1+λ)`-bi-tempered precondition held up to the horizon.
    pub bi_tempered: bool,
}

/// Scans `n0 = 1, 2, …` for a λ′-good tail `F_{n0}, …, F_horizon`.
pub fn goodness_tail_index(
    seq: &FoelnerSequence,
    lambda: &Rational,
    lambda_prime: &Rational,
    horizon: usize,
) -> Result<TailIndex> {
    check_lambda(lambda)?;
    check_lambda(lambda_prime)?;
    if lambda >= lambda_prime {
        return Err(invalid("goodness_tail_index needs lambda < lambda'"));
    }
    seq.check_horizon(horizon)?;
    let report = tempered_report(seq, horizon)?;
    let bi_tempered = report.is_bi_tempered(&(Rational::one() + lambda));
    for n0 in 1..horizon {
        let tail = seq.tail(n0)?.prefix(horizon - n0 + 1)?;
        if is_lambda_good(&tail, lambda_prime, tail.horizon())?.good {
            return Ok(TailIndex { n0: Some(n0), bi_tempered });
        }
    }
    Ok(TailIndex { n0: None, bi_tempered })
}

/// `|⋃_{i<n}F_i⁻¹F_n|` for one `n`, exposed for cross-checks.
pub fn left_overflow_size(seq: &FoelnerSequence, n: usize) -> Result<u64> {
    let f = seq.get(n)?;
    if n == 1 {
        return Ok(0);
    }
    let mut p = seq.get(1)?.clone();
    for i in 2..n {
        p = p.union(seq.get(i)?)?;
    }
    Ok(overflow_sizes(&p, f)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foelner::sequence::BuiltinKind;
    use crate::group::GroupKind;

    #[test]
    fn powers_of_four_are_half_good() {
        let s = FoelnerSequence::builtin(BuiltinKind::Powers { base: 4 }, 2).unwrap();
        let r = is_lambda_good(&s, &Rational::new(1, 2), 2).unwrap();
        assert!(r.good, "{r:?}");
    }

    #[test]
    fn far_translate_breaks_condition_two() {
        let sets = vec![FiniteSubset::from_ints([0]), FiniteSubset::from_ints([0, 100]), FiniteSubset::from_ints([0, 100])];
        let s = FoelnerSequence::explicit(GroupKind::Integers, sets).unwrap();
        let r = is_lambda_good(&s, &Rational::new(1, 2), 3).unwrap();
        let v = r.violation.unwrap();
        assert_eq!(v.n, 3);
        assert_eq!(v.condition, GoodnessCondition::TranslateDefect);
        assert_eq!(v.f, Some(GroupElement::Int(100)));
        assert_eq!(v.size, 1);
    }

    #[test]
    fn lambda_range_checked() {
        let s = FoelnerSequence::builtin(BuiltinKind::Intervals, 2).unwrap();
        assert!(is_lambda_good(&s, &Rational::zero(), 2).is_err());
        assert!(is_lambda_good(&s, &Rational::one(), 2).is_err());
    }

    #[test]
    fn good_sequence_has_tail_one() {
        let s = FoelnerSequence::builtin(BuiltinKind::Powers { base: 4 }, 4).unwrap();
        let t = goodness_tail_index(&s, &Rational::new(1, 10), &Rational::new(1, 2), 4).unwrap();
        assert_eq!(t.n0, Some(1));
    }
}
