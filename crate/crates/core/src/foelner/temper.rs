use num_traits::Zero;

use super::sequence::FoelnerSequence;
use crate::error::{Error, Result};
use crate::group::{FiniteSubset, Side};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemperEntry {
    pub n: usize,
    /// `|⋃_{i<n} F_i⁻¹ F_n| / |F_n|`.
    pub left: Rational,
    /// `|⋃_{i<n} F_n F_i⁻¹| / |F_n|`.
    pub right: Rational,
    pub identity_in_prefix: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TemperednessReport {
    pub horizon: usize,
    pub entries: Vec<TemperEntry>,
    pub max_left: Option<Rational>,
    pub max_right: Option<Rational>,
    /// Some `n` has the identity outside `⋃_{i<n} F_i`, so ratios may drop below 1.
    pub degenerate: bool,
}

impl TemperednessReport {
    pub fn is_left_tempered(&self, c: &Rational) -> bool {
        self.entries.iter().all(|e| &e.left <= c)
    }

    pub fn is_bi_tempered(&self, c: &Rational) -> bool {
        self.entries.iter().all(|e| &e.left <= c && &e.right <= c)
    }

    /// Smallest `c` for which the prefix is `c`-bi-tempered (1 for a single set).
    pub fn bi_constant(&self) -> Rational {
        let one = Rational::from_integer(1);
        let l = self.max_left.unwrap_or(one);
        let r = self.max_right.unwrap_or(one);
        l.max(r)
    }
}

pub(crate) fn ratio(num: u64, den: u64) -> Rational {
    Rational::new(num as i128, den as i128)
}

/// `|P⁻¹ F|` and `|F P⁻¹|`; the second is only recomputed for non-abelian groups.
pub(crate) fn overflow_sizes(prefix: &FiniteSubset, f: &FiniteSubset) -> Result<(u64, u64)> {
    let pinv = prefix.inverse();
    let left = pinv.product(f)?.len();
    let right = if f.group().is_abelian() { left } else { f.product(&pinv)?.len() };
    Ok((left, right))
}

pub fn tempered_report(seq: &FoelnerSequence, horizon: usize) -> Result<TemperednessReport> {
    seq.check_horizon(horizon)?;
    let mut entries = Vec::with_capacity(horizon.saturating_sub(1));
    let mut prefix = seq.get(1)?.clone();
    for n in 2..=horizon {
        let f = seq.get(n)?;
        let (left, right) = overflow_sizes(&prefix, f)?;
        entries.push(TemperEntry {
            n,
            left: ratio(left, f.len()),
            right: ratio(right, f.len()),
            identity_in_prefix: prefix.contains_identity(),
        });
        prefix = prefix.union(f)?;
    }
    let max_left = entries.iter().map(|e| e.left).max();
    let max_right = entries.iter().map(|e| e.right).max();
    let degenerate = entries.iter().any(|e| !e.identity_in_prefix);
    Ok(TemperednessReport { horizon, entries, max_left, max_right, degenerate })
}

/// `max_{g∈K} |g F_n △ F_n| / |F_n|`.
pub fn folner_defect(seq: &FoelnerSequence, k: &FiniteSubset, n: usize) -> Result<Rational> {
    let f = seq.get(n)?;
    if k.group() != f.group() {
        return Err(Error::GroupMismatch(f.group(), k.group()));
    }
    let mut worst = Rational::zero();
    for g in k.iter() {
        let moved = f.translate(&g, Side::Left)?;
        let r = f.symdiff_ratio(&moved)?;
        worst = worst.max(r);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foelner::sequence::BuiltinKind;
    use crate::group::{GroupElement, GroupKind};

    #[test]
    fn dyadic_intervals() {
        let s = FoelnerSequence::builtin(BuiltinKind::Powers { base: 2 }, 3).unwrap();
        let r = tempered_report(&s, 3).unwrap();
        assert_eq!(r.entries[0].left, Rational::new(5, 4));
        assert_eq!(r.entries[1].left, Rational::new(11, 8));
        assert_eq!(r.max_left, Some(Rational::new(11, 8)));
        assert!(!r.degenerate);
    }

    #[test]
    fn symmetric_intervals_at_64() {
        let s = FoelnerSequence::builtin(BuiltinKind::Boxes { dim: 1 }, 64).unwrap();
        let r = tempered_report(&s, 64).unwrap();
        assert_eq!(r.entries.last().unwrap().left, Rational::new(255, 129));
    }

    #[test]
    fn degenerate_flagged() {
        let sets = vec![FiniteSubset::interval(5, 6), FiniteSubset::interval(5, 8)];
        let s = FoelnerSequence::explicit(GroupKind::Integers, sets).unwrap();
        let r = tempered_report(&s, 2).unwrap();
        assert!(r.degenerate);
    }

    #[test]
    fn defects() {
        let s = FoelnerSequence::explicit(GroupKind::Integers, vec![FiniteSubset::interval(0, 99)]).unwrap();
        let k = FiniteSubset::from_ints([-1, 1]);
        assert_eq!(folner_defect(&s, &k, 1).unwrap(), Rational::new(2, 100));
        let e = FiniteSubset::identity(GroupKind::Integers);
        assert_eq!(folner_defect(&s, &e, 1).unwrap(), Rational::zero());
        let h = FiniteSubset::identity(GroupKind::Heisenberg);
        assert!(folner_defect(&s, &h, 1).is_err());
        let _ = GroupElement::Int(0);
    }
}
