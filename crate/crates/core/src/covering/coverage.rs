use std::collections::HashSet;

use crate::group::{FiniteSubset, GroupElement, GroupKind, IntervalAccumulator, RunList};

/// A growing union of finite subsets; interval-based for ℤ.
pub(crate) enum Coverage {
    Ints(IntervalAccumulator),
    Generic(GroupKind, HashSet<GroupElement>),
}

impl Coverage {
    pub fn new(group: GroupKind) -> Self {
        match group {
            GroupKind::Integers => Coverage::Ints(IntervalAccumulator::new()),
            g => Coverage::Generic(g, HashSet::new()),
        }
    }

    pub fn len(&self) -> u64 {
        match self {
            Coverage::Ints(acc) => acc.len(),
            Coverage::Generic(_, s) => s.len() as u64,
        }
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        match (self, g) {
            (Coverage::Ints(acc), GroupElement::Int(x)) => acc.covering(*x).is_some(),
            (Coverage::Generic(_, s), g) => s.contains(g),
            _ => false,
        }
    }

    /// `|set \ covered|`.
    pub fn fresh_count(&self, set: &FiniteSubset) -> u64 {
        match (self, set.to_runlist()) {
            (Coverage::Ints(acc), Some(r)) => r.runs().iter().map(|&(a, b)| (b - a) as u64 + 1 - acc.overlap_len(a, b)).sum(),
            _ => set.iter().filter(|g| !self.contains(g)).count() as u64,
        }
    }

    /// `set \ covered`.
    pub fn fresh_part(&self, set: &FiniteSubset) -> FiniteSubset {
        match (self, set.to_runlist()) {
            (Coverage::Ints(acc), Some(r)) => {
                let runs = r.runs().iter().flat_map(|&(a, b)| acc.missing(a, b));
                FiniteSubset::from_runs(RunList::from_runs(runs))
            }
            _ => FiniteSubset::from_elements(set.group(), set.iter().filter(|g| !self.contains(g)))
                .expect("subset of a set in this group"),
        }
    }

    pub fn insert(&mut self, set: &FiniteSubset) {
        match self {
            Coverage::Ints(acc) => {
                if let Some(r) = set.to_runlist() {
                    for &(a, b) in r.runs() {
                        acc.insert(a, b);
                    }
                }
            }
            Coverage::Generic(_, s) => s.extend(set.iter()),
        }
    }

    pub fn to_subset(&self) -> FiniteSubset {
        match self {
            Coverage::Ints(acc) => FiniteSubset::from_runs(acc.to_runlist()),
            Coverage::Generic(g, s) => {
                FiniteSubset::from_elements(*g, s.iter().cloned()).expect("elements share the group")
            }
        }
    }
}
