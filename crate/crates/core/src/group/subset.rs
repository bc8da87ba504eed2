use std::collections::BTreeSet;
use std::fmt;

use super::element::{GroupElement, GroupKind};
use super::runs::RunList;
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// A finite subset of a discrete group.
///
/// Subsets of ℤ may be held as a run-list; every operation gives the same
/// set whichever form its arguments use.
#[derive(Clone)]
pub struct FiniteSubset {
    group: GroupKind,
    repr: Repr,
}

#[derive(Clone)]
enum Repr {
    /// Sorted, deduplicated.
    Dense(Vec<GroupElement>),
    Runs(RunList),
}

impl FiniteSubset {
    pub fn empty(group: GroupKind) -> Self {
        FiniteSubset { group, repr: Repr::Dense(Vec::new()) }
    }

    pub fn singleton(g: GroupElement) -> Self {
        FiniteSubset { group: g.kind(), repr: Repr::Dense(vec![g]) }
    }

    pub fn identity(group: GroupKind) -> Self {
        FiniteSubset::singleton(group.identity())
    }

    pub fn from_elements(group: GroupKind, elements: impl IntoIterator<Item = GroupElement>) -> Result<Self> {
        let mut v: Vec<GroupElement> = elements.into_iter().collect();
        if let Some(bad) = v.iter().find(|g| g.kind() != group) {
            return Err(Error::GroupMismatch(group, bad.kind()));
        }
        v.sort_unstable();
        v.dedup();
        Ok(FiniteSubset { group, repr: Repr::Dense(v) })
    }

    /// Dense subset of ℤ.
    pub fn from_ints(xs: impl IntoIterator<Item = i64>) -> Self {
        let mut v: Vec<i64> = xs.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        FiniteSubset {
            group: GroupKind::Integers,
            repr: Repr::Dense(v.into_iter().map(GroupElement::Int).collect()),
        }
    }

    pub fn from_runs(runs: RunList) -> Self {
        FiniteSubset { group: GroupKind::Integers, repr: Repr::Runs(runs) }
    }

    /// `[a, b] ⊂ ℤ` as a run-list.
    pub fn interval(a: i64, b: i64) -> Self {
        FiniteSubset::from_runs(RunList::interval(a, b))
    }

    pub fn group(&self) -> GroupKind {
        self.group
    }

    pub fn len(&self) -> u64 {
        match &self.repr {
            Repr::Dense(v) => v.len() as u64,
            Repr::Runs(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn has_runs(&self) -> bool {
        matches!(self.repr, Repr::Runs(_))
    }

    /// The run-list, if this subset is held in that form.
    pub fn runs(&self) -> Option<&RunList> {
        match &self.repr {
            Repr::Runs(r) => Some(r),
            Repr::Dense(_) => None,
        }
    }

    /// Run-list form of a subset of ℤ, converting if needed.
    pub fn to_runlist(&self) -> Option<RunList> {
        match &self.repr {
            Repr::Runs(r) => Some(r.clone()),
            Repr::Dense(v) if self.group == GroupKind::Integers => {
                Some(RunList::from_points(v.iter().filter_map(GroupElement::as_int)))
            }
            Repr::Dense(_) => None,
        }
    }

    /// Same set, held as a run-list (ℤ only; other groups are returned unchanged).
    pub fn with_runs(&self) -> FiniteSubset {
        match self.to_runlist() {
            Some(r) => FiniteSubset::from_runs(r),
            None => self.clone(),
        }
    }

    /// Same set, held densely.
    pub fn to_dense(&self) -> FiniteSubset {
        FiniteSubset { group: self.group, repr: Repr::Dense(self.elements()) }
    }

    pub fn iter(&self) -> Box<dyn Iterator<Item = GroupElement> + '_> {
        match &self.repr {
            Repr::Dense(v) => Box::new(v.iter().cloned()),
            Repr::Runs(r) => Box::new(r.points().map(GroupElement::Int)),
        }
    }

    /// Elements in canonical order.
    pub fn elements(&self) -> Vec<GroupElement> {
        self.iter().collect()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        match (&self.repr, g) {
            (Repr::Runs(r), GroupElement::Int(x)) => r.contains(*x),
            (Repr::Runs(_), _) => false,
            (Repr::Dense(v), g) => v.binary_search(g).is_ok(),
        }
    }

    pub fn contains_identity(&self) -> bool {
        self.contains(&self.group.identity())
    }

    fn check(&self, other: &FiniteSubset) -> Result<()> {
        if self.group != other.group {
            Err(Error::GroupMismatch(self.group, other.group))
        } else {
            Ok(())
        }
    }

    /// Both as run-lists when at least one already is one (ℤ only).
    fn run_pair(&self, other: &FiniteSubset) -> Option<(RunList, RunList)> {
        if self.group != GroupKind::Integers || !(self.has_runs() || other.has_runs()) {
            return None;
        }
        Some((self.to_runlist()?, other.to_runlist()?))
    }

    fn dense_from(&self, set: BTreeSet<GroupElement>) -> FiniteSubset {
        FiniteSubset { group: self.group, repr: Repr::Dense(set.into_iter().collect()) }
    }

    pub fn union(&self, other: &FiniteSubset) -> Result<FiniteSubset> {
        self.check(other)?;
        if let Some((a, b)) = self.run_pair(other) {
            return Ok(FiniteSubset::from_runs(a.union(&b)));
        }
        Ok(self.dense_from(self.iter().chain(other.iter()).collect()))
    }

    pub fn intersection(&self, other: &FiniteSubset) -> Result<FiniteSubset> {
        self.check(other)?;
        if let Some((a, b)) = self.run_pair(other) {
            return Ok(FiniteSubset::from_runs(a.intersection(&b)));
        }
        Ok(self.dense_from(self.iter().filter(|g| other.contains(g)).collect()))
    }

    pub fn difference(&self, other: &FiniteSubset) -> Result<FiniteSubset> {
        self.check(other)?;
        if let Some((a, b)) = self.run_pair(other) {
            return Ok(FiniteSubset::from_runs(a.difference(&b)));
        }
        Ok(self.dense_from(self.iter().filter(|g| !other.contains(g)).collect()))
    }

    pub fn is_subset(&self, other: &FiniteSubset) -> Result<bool> {
        Ok(self.difference(other)?.is_empty())
    }

    /// `{a·b : a ∈ self, b ∈ other}`.
    pub fn product(&self, other: &FiniteSubset) -> Result<FiniteSubset> {
        self.check(other)?;
        if let Some((a, b)) = self.run_pair(other) {
            return Ok(FiniteSubset::from_runs(a.sumset(&b)));
        }
        let mut out = BTreeSet::new();
        for a in self.iter() {
            for b in other.iter() {
                out.insert(a.compose(&b));
            }
        }
        Ok(self.dense_from(out))
    }

    /// `{a⁻¹ : a ∈ self}`.
    pub fn inverse(&self) -> FiniteSubset {
        match &self.repr {
            Repr::Runs(r) => FiniteSubset::from_runs(r.negate()),
            Repr::Dense(v) => self.dense_from(v.iter().map(GroupElement::inverse).collect()),
        }
    }

    /// `{a·g}` (right) or `{g·a}` (left).
    pub fn translate(&self, g: &GroupElement, side: Side) -> Result<FiniteSubset> {
        if g.kind() != self.group {
            return Err(Error::GroupMismatch(self.group, g.kind()));
        }
        if let (Repr::Runs(r), GroupElement::Int(s)) = (&self.repr, g) {
            return Ok(FiniteSubset::from_runs(r.shift(*s)));
        }
        let moved = self.iter().map(|a| match side {
            Side::Right => a.compose(g),
            Side::Left => g.compose(&a),
        });
        Ok(self.dense_from(moved.collect()))
    }

    pub fn symdiff_len(&self, other: &FiniteSubset) -> Result<u64> {
        self.check(other)?;
        if let Some((a, b)) = self.run_pair(other) {
            return Ok(a.symdiff_len(&b));
        }
        let common = self.iter().filter(|g| other.contains(g)).count() as u64;
        Ok(self.len() + other.len() - 2 * common)
    }

    /// `|self △ other| / |self|`.
    pub fn symdiff_ratio(&self, other: &FiniteSubset) -> Result<Rational> {
        if self.is_empty() {
            return Err(Error::EmptySet("symdiff_ratio needs a nonempty first argument"));
        }
        let d = self.symdiff_len(other)?;
        Ok(Rational::new(d as i128, self.len() as i128))
    }

    pub fn max_int(&self) -> Option<i64> {
        match &self.repr {
            Repr::Runs(r) => r.max(),
            Repr::Dense(v) => v.last().and_then(GroupElement::as_int),
        }
    }

    pub fn min_int(&self) -> Option<i64> {
        match &self.repr {
            Repr::Runs(r) => r.min(),
            Repr::Dense(v) => v.first().and_then(GroupElement::as_int),
        }
    }
}

impl PartialEq for FiniteSubset {
    fn eq(&self, other: &Self) -> bool {
        if self.group != other.group || self.len() != other.len() {
            return false;
        }
        if self.group == GroupKind::Integers {
            return self.to_runlist() == other.to_runlist();
        }
        self.iter().eq(other.iter())
    }
}

impl Eq for FiniteSubset {}

impl fmt::Debug for FiniteSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Runs(r) if r.run_count() > 16 => {
                write!(f, "FiniteSubset[{}; {} runs, {} points]", self.group, r.run_count(), r.len())
            }
            Repr::Runs(r) => write!(f, "FiniteSubset[{}; runs {:?}]", self.group, r.runs()),
            Repr::Dense(v) if v.len() > 32 => write!(f, "FiniteSubset[{}; {} points]", self.group, v.len()),
            Repr::Dense(v) => {
                let s: Vec<String> = v.iter().map(ToString::to_string).collect();
                write!(f, "FiniteSubset[{}; {{{}}}]", self.group, s.join(" "))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(a: i64, b: i64, c: i64) -> GroupElement {
        GroupElement::heis(a, b, c)
    }

    #[test]
    fn integer_product_small() {
        let a = FiniteSubset::from_ints([0, 1]);
        let b = FiniteSubset::from_ints([0, 2]);
        assert_eq!(a.product(&b).unwrap(), FiniteSubset::from_ints([0, 1, 2, 3]));
    }

    #[test]
    fn heisenberg_generators_commutator() {
        let a = FiniteSubset::singleton(h(1, 0, 0));
        let b = FiniteSubset::singleton(h(0, 1, 0));
        assert_eq!(a.product(&b).unwrap(), FiniteSubset::singleton(h(1, 1, 1)));
        assert_eq!(b.product(&a).unwrap(), FiniteSubset::singleton(h(1, 1, 0)));
    }

    #[test]
    fn identity_is_neutral_for_products() {
        let a = FiniteSubset::from_elements(GroupKind::Heisenberg, [h(1, 2, 3), h(-1, 0, 4)]).unwrap();
        let e = FiniteSubset::identity(GroupKind::Heisenberg);
        assert_eq!(a.product(&e).unwrap(), a);
        assert_eq!(e.product(&a).unwrap(), a);
    }

    #[test]
    fn inverses() {
        assert_eq!(FiniteSubset::interval(0, 2).inverse(), FiniteSubset::interval(-2, 0));
        let x = FiniteSubset::singleton(h(1, 1, 1));
        assert_eq!(x.inverse(), FiniteSubset::singleton(h(-1, -1, 0)));
        let e = FiniteSubset::identity(GroupKind::Lattice(2));
        assert_eq!(e.inverse(), e);
    }

    #[test]
    fn translates() {
        let a = FiniteSubset::interval(0, 3);
        assert_eq!(a.translate(&GroupElement::Int(5), Side::Right).unwrap(), FiniteSubset::interval(5, 8));
        let b = FiniteSubset::from_elements(GroupKind::Heisenberg, [h(0, 0, 0), h(1, 0, 0)]).unwrap();
        let right = b.translate(&h(0, 1, 0), Side::Right).unwrap();
        let expected = FiniteSubset::from_elements(GroupKind::Heisenberg, [h(0, 1, 0), h(1, 1, 1)]).unwrap();
        assert_eq!(right, expected);
        let left = b.translate(&h(0, 1, 0), Side::Left).unwrap();
        let expected = FiniteSubset::from_elements(GroupKind::Heisenberg, [h(0, 1, 0), h(1, 1, 0)]).unwrap();
        assert_eq!(left, expected);
        assert_eq!(b.translate(&h(0, 0, 0), Side::Left).unwrap(), b);
    }

    #[test]
    fn symdiff_ratios() {
        let a = FiniteSubset::interval(0, 9);
        assert_eq!(a.symdiff_ratio(&a).unwrap(), Rational::from_integer(0));
        assert_eq!(a.symdiff_ratio(&FiniteSubset::interval(1, 10)).unwrap(), Rational::new(2, 10));
        let empty = FiniteSubset::empty(GroupKind::Integers);
        assert!(matches!(empty.symdiff_ratio(&a), Err(Error::EmptySet(_))));
    }

    #[test]
    fn group_mismatch_is_reported() {
        let a = FiniteSubset::interval(0, 1);
        let b = FiniteSubset::identity(GroupKind::Heisenberg);
        assert!(matches!(a.product(&b), Err(Error::GroupMismatch(..))));
        assert!(a.translate(&h(0, 0, 0), Side::Left).is_err());
    }

    #[test]
    fn representation_independent_equality() {
        let a = FiniteSubset::interval(-3, 4);
        let b = FiniteSubset::from_ints(-3..=4);
        assert_eq!(a, b);
        assert_eq!(a.to_dense(), b.with_runs());
    }
}
