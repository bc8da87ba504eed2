//! Sorted disjoint integer intervals.
//!
//! Invariant: runs are inclusive `(start, end)` with `start <= end`, sorted,
//! and separated by at least one missing integer (adjacent runs are merged).

use std::collections::BTreeMap;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RunList {
    runs: Vec<(i64, i64)>,
}

impl RunList {
    pub fn new() -> Self {
        RunList { runs: Vec::new() }
    }

    /// `[a, b]`, empty when `a > b`.
    pub fn interval(a: i64, b: i64) -> Self {
        if a > b {
            RunList::new()
        } else {
            RunList { runs: vec![(a, b)] }
        }
    }

    /// Builds from arbitrary (possibly overlapping, unsorted) inclusive runs.
    pub fn from_runs(runs: impl IntoIterator<Item = (i64, i64)>) -> Self {
        let mut v: Vec<(i64, i64)> = runs.into_iter().filter(|(a, b)| a <= b).collect();
        v.sort_unstable();
        RunList { runs: merge_sorted(v) }
    }

    /// Trusts the caller that `runs` already satisfies the invariant.
    pub(crate) fn from_canonical(runs: Vec<(i64, i64)>) -> Self {
        debug_assert!(is_canonical(&runs));
        RunList { runs }
    }

    pub fn from_points(points: impl IntoIterator<Item = i64>) -> Self {
        RunList::from_runs(points.into_iter().map(|x| (x, x)))
    }

    pub fn runs(&self) -> &[(i64, i64)] {
        &self.runs
    }

    pub fn run_count(&self) -> usize {
        self.runs.len()
    }

    pub fn len(&self) -> u64 {
        self.runs.iter().map(|&(a, b)| (b - a) as u64 + 1).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn min(&self) -> Option<i64> {
        self.runs.first().map(|r| r.0)
    }

    pub fn max(&self) -> Option<i64> {
        self.runs.last().map(|r| r.1)
    }

    pub fn contains(&self, x: i64) -> bool {
        let i = self.runs.partition_point(|&(_, b)| b < x);
        i < self.runs.len() && self.runs[i].0 <= x
    }

    pub fn contains_interval(&self, a: i64, b: i64) -> bool {
        let i = self.runs.partition_point(|&(_, e)| e < a);
        i < self.runs.len() && self.runs[i].0 <= a && b <= self.runs[i].1
    }

    pub fn points(&self) -> impl Iterator<Item = i64> + '_ {
        self.runs.iter().flat_map(|&(a, b)| a..=b)
    }

    pub fn shift(&self, s: i64) -> RunList {
        RunList { runs: self.runs.iter().map(|&(a, b)| (a + s, b + s)).collect() }
    }

    pub fn negate(&self) -> RunList {
        RunList { runs: self.runs.iter().rev().map(|&(a, b)| (-b, -a)).collect() }
    }

    pub fn union(&self, other: &RunList) -> RunList {
        let mut merged = Vec::with_capacity(self.runs.len() + other.runs.len());
        let (mut i, mut j) = (0, 0);
        while i < self.runs.len() || j < other.runs.len() {
            let take_left = j >= other.runs.len() || (i < self.runs.len() && self.runs[i] <= other.runs[j]);
            if take_left {
                merged.push(self.runs[i]);
                i += 1;
            } else {
                merged.push(other.runs[j]);
                j += 1;
            }
        }
        RunList { runs: merge_sorted(merged) }
    }

    pub fn intersection(&self, other: &RunList) -> RunList {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.runs.len() && j < other.runs.len() {
            let (a, b) = self.runs[i];
            let (c, d) = other.runs[j];
            let lo = a.max(c);
            let hi = b.min(d);
            if lo <= hi {
                out.push((lo, hi));
            }
            if b < d {
                i += 1;
            } else {
                j += 1;
            }
        }
        RunList { runs: out }
    }

    pub fn difference(&self, other: &RunList) -> RunList {
        let mut out = Vec::new();
        let mut j = 0;
        for &(a, b) in &self.runs {
            let mut start = a;
            while j < other.runs.len() && other.runs[j].1 < start {
                j += 1;
            }
            let mut k = j;
            while start <= b && k < other.runs.len() && other.runs[k].0 <= b {
                let (c, d) = other.runs[k];
                if c > start {
                    out.push((start, c - 1));
                }
                start = start.max(d + 1);
                if d > b {
                    break;
                }
                k += 1;
            }
            if start <= b {
                out.push((start, b));
            }
        }
        RunList { runs: out }
    }

    /// Keeps only points in `[lo, hi]`.
    pub fn clip(&self, lo: i64, hi: i64) -> RunList {
        self.intersection(&RunList::interval(lo, hi))
    }

    /// `{a + b : a ∈ self, b ∈ other}`.
    ///
    /// Runs of `other` are processed longest first; once the image of a run
    /// of `self` falls inside an already-built interval, every later run of
    /// `self` whose image also ends inside it is skipped by binary search.
    /// Structured inputs such as the block sets therefore cost close to
    /// `O((R_A + R_B) log)` rather than `O(R_A R_B)`.
    pub fn sumset(&self, other: &RunList) -> RunList {
        if self.is_empty() || other.is_empty() {
            return RunList::new();
        }
        let (a_runs, b_runs) = if self.runs.len() >= other.runs.len() {
            (&self.runs, &other.runs)
        } else {
            (&other.runs, &self.runs)
        };
        let mut order: Vec<(i64, i64)> = b_runs.clone();
        order.sort_by(|x, y| (y.1 - y.0).cmp(&(x.1 - x.0)).then(x.0.cmp(&y.0)));
        let mut acc = IntervalAccumulator::new();
        for (c, d) in order {
            let mut i = 0;
            while i < a_runs.len() {
                let (p, q) = a_runs[i];
                let lo = p + c;
                let hi = q + d;
                match acc.covering(lo) {
                    Some((_, t)) if hi <= t => {
                        let limit = t - d;
                        i += a_runs[i..].partition_point(|&(_, e)| e <= limit);
                    }
                    _ => {
                        acc.insert(lo, hi);
                        i += 1;
                    }
                }
            }
        }
        acc.into_runlist()
    }

    /// `|self ∩ (other + shift)|` by a two-pointer sweep, no allocation.
    pub fn overlap_len(&self, other: &RunList, shift: i64) -> u64 {
        let mut total = 0u64;
        let (mut i, mut j) = (0, 0);
        while i < self.runs.len() && j < other.runs.len() {
            let (a, b) = self.runs[i];
            let (c, d) = (other.runs[j].0 + shift, other.runs[j].1 + shift);
            let lo = a.max(c);
            let hi = b.min(d);
            if lo <= hi {
                total += (hi - lo) as u64 + 1;
            }
            if b < d {
                i += 1;
            } else {
                j += 1;
            }
        }
        total
    }

    /// `|self △ (self + shift)|`.
    pub fn shift_symdiff_len(&self, shift: i64) -> u64 {
        2 * (self.len() - self.overlap_len(self, shift))
    }

    /// `|self △ other|`.
    pub fn symdiff_len(&self, other: &RunList) -> u64 {
        self.len() + other.len() - 2 * self.overlap_len(other, 0)
    }
}

fn merge_sorted(v: Vec<(i64, i64)>) -> Vec<(i64, i64)> {
    let mut out: Vec<(i64, i64)> = Vec::with_capacity(v.len());
    for (a, b) in v {
        match out.last_mut() {
            Some(last) if a <= last.1.saturating_add(1) => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

fn is_canonical(runs: &[(i64, i64)]) -> bool {
    runs.iter().all(|(a, b)| a <= b) && runs.windows(2).all(|w| w[0].1.saturating_add(1) < w[1].0)
}

/// Incrementally built union of intervals with containment queries.
#[derive(Clone, Debug, Default)]
pub struct IntervalAccumulator {
    map: BTreeMap<i64, i64>,
}

impl IntervalAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    /// The stored interval containing `x`, if any.
    pub fn covering(&self, x: i64) -> Option<(i64, i64)> {
        self.map.range(..=x).next_back().filter(|(_, &t)| t >= x).map(|(&s, &t)| (s, t))
    }

    pub fn insert(&mut self, mut a: i64, mut b: i64) {
        if a > b {
            return;
        }
        if let Some((&s, &t)) = self.map.range(..=a).next_back() {
            if t.saturating_add(1) >= a {
                a = s;
                b = b.max(t);
            }
        }
        let absorbed: Vec<i64> = self
            .map
            .range(a..=b.saturating_add(1))
            .map(|(&s, _)| s)
            .collect();
        for s in absorbed {
            let t = self.map.remove(&s).unwrap();
            b = b.max(t);
        }
        self.map.insert(a, b);
    }

    /// Number of points of `[a, b]` already present.
    pub fn overlap_len(&self, a: i64, b: i64) -> u64 {
        if a > b {
            return 0;
        }
        let mut total = 0u64;
        let start = match self.map.range(..=a).next_back() {
            Some((&s, _)) => s,
            None => a,
        };
        for (&s, &t) in self.map.range(start..=b) {
            let lo = s.max(a);
            let hi = t.min(b);
            if lo <= hi {
                total += (hi - lo) as u64 + 1;
            }
        }
        total
    }

    /// Sub-intervals of `[a, b]` not yet present.
    pub fn missing(&self, a: i64, b: i64) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        if a > b {
            return out;
        }
        let start = match self.map.range(..=a).next_back() {
            Some((&s, _)) => s,
            None => a,
        };
        let mut cursor = a;
        for (&s, &t) in self.map.range(start..=b) {
            if t < cursor {
                continue;
            }
            if s > cursor {
                out.push((cursor, s - 1));
            }
            cursor = t.saturating_add(1);
            if cursor > b {
                return out;
            }
        }
        if cursor <= b {
            out.push((cursor, b));
        }
        out
    }

    pub fn len(&self) -> u64 {
        self.map.iter().map(|(&s, &t)| (t - s) as u64 + 1).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn into_runlist(self) -> RunList {
        RunList::from_canonical(self.map.into_iter().collect())
    }

    pub fn to_runlist(&self) -> RunList {
        RunList::from_canonical(self.map.iter().map(|(&s, &t)| (s, t)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn set(r: &RunList) -> BTreeSet<i64> {
        r.points().collect()
    }

    #[test]
    fn normalises_adjacent_and_overlapping() {
        let r = RunList::from_runs([(5, 7), (0, 2), (3, 3), (6, 10), (20, 19)]);
        assert_eq!(r.runs(), &[(0, 3), (5, 10)]);
        assert_eq!(r.len(), 10);
    }

    #[test]
    fn small_sumset() {
        let a = RunList::from_points([0, 1]);
        let b = RunList::from_points([0, 2]);
        assert_eq!(a.sumset(&b).runs(), &[(0, 3)]);
    }

    #[test]
    fn sumset_with_gaps_matches_pairs() {
        let a = RunList::from_runs([(0, 2), (10, 10), (20, 25)]);
        let b = RunList::from_runs([(-3, -3), (0, 1), (100, 140)]);
        let brute: BTreeSet<i64> = a.points().flat_map(|x| b.points().map(move |y| x + y)).collect();
        assert_eq!(set(&a.sumset(&b)), brute);
    }

    #[test]
    fn difference_cases() {
        let a = RunList::from_runs([(0, 10), (20, 30)]);
        let b = RunList::from_runs([(-5, 0), (3, 4), (8, 22), (30, 40)]);
        assert_eq!(a.difference(&b).runs(), &[(1, 2), (5, 7), (23, 29)]);
    }

    #[test]
    fn shifted_symdiff() {
        let a = RunList::interval(0, 9);
        assert_eq!(a.shift_symdiff_len(1), 2);
        assert_eq!(a.shift_symdiff_len(0), 0);
        assert_eq!(a.shift_symdiff_len(-20), 20);
    }

    #[test]
    fn accumulator_merges() {
        let mut acc = IntervalAccumulator::new();
        acc.insert(10, 12);
        acc.insert(0, 3);
        acc.insert(4, 9);
        assert_eq!(acc.to_runlist().runs(), &[(0, 12)]);
        acc.insert(20, 25);
        assert_eq!(acc.overlap_len(5, 22), 8 + 3);
        assert_eq!(acc.covering(21), Some((20, 25)));
        assert_eq!(acc.covering(15), None);
        assert_eq!(acc.missing(-2, 30), vec![(-2, -1), (13, 19), (26, 30)]);
        assert_eq!(acc.missing(21, 22), vec![]);
    }
}
