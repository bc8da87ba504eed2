use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use super::certify::{certify_epsilon_disjoint, DisjointnessCertificate};
use super::coverage::Coverage;
use super::vitali::{vitali_select, CoveringOutcome, CoveringSelection, ScaleAssignment, VitaliOptions};
use crate::dynamics::Crossings;
use crate::error::{Error, Result};
use crate::foelner::FoelnerSequence;
use crate::group::{FiniteSubset, GroupElement, Side};
use crate::rational::Rational;

/// Per-center crossing indices of `(A_n f(c x))_n`.
pub type OrbitData = BTreeMap<GroupElement, Crossings>;

#[derive(Clone, Debug)]
pub struct GrowthParams {
    pub alpha: Rational,
    pub beta: Rational,
    /// Bound `S` with `0 ≤ f ≤ S`.
    pub bound: Rational,
    pub eps: Rational,
    pub delta: Rational,
    pub q: usize,
    pub lambda: Rational,
}

impl GrowthParams {
    /// The constraints tying ε to δ, α, β and S.
    pub fn check(&self) -> Result<()> {
        let one = Rational::one();
        let two = Rational::from_integer(2);
        let mut bad = Vec::new();
        if !(Rational::zero() < self.alpha && self.alpha < self.beta) {
            bad.push("need 0 < alpha < beta".to_string());
        }
        if !(Rational::zero() < self.eps && self.eps < Rational::new(1, 4)) {
            bad.push(format!("eps = {} not in (0, 1/4)", self.eps));
        }
        if !(Rational::zero() < self.delta && self.delta <= Rational::new(1, 2)) {
            bad.push(format!("delta = {} not in (0, 1/2]", self.delta));
        }
        if bad.is_empty() {
            let lhs = (self.beta - Rational::from_integer(4) * self.eps * self.bound) * (one - self.eps) / self.alpha;
            if lhs < one + self.delta {
                bad.push(format!("(beta - 4 eps S)(1 - eps)/alpha = {lhs} < 1 + delta"));
            }
            if (one - self.eps) * (one + self.delta) < one + self.delta / two {
                bad.push("(1 - eps)(1 + delta) < 1 + delta/2".into());
            }
            if (one - self.eps) * (one + self.delta / two) < one {
                bad.push("1 - eps < (1 + delta/2)^-1".into());
            }
        }
        if self.q == 0 {
            bad.push("q must be positive".into());
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Precondition(bad.join("; ")))
        }
    }
}

#[derive(Clone, Debug)]
pub struct GrowthOutcome {
    /// `ℬ_{k+1}`, with witnesses from the exact certificate when feasible.
    pub next: CoveringSelection,
    /// `ℬ''`: the downcrossing collection moved back onto original centers.
    pub intermediate: CoveringSelection,
    pub down_outcome: CoveringOutcome,
    pub up_outcome: CoveringOutcome,
    pub size_before: u64,
    pub size_intermediate: u64,
    pub size_after: u64,
    /// Upcrossing positions in `ℬ_{k+1}` must stay below this (`N_k + 2q`).
    pub upcrossing_limit: usize,
    /// (i): every pair of `ℬ_{k+1}` is among the first `N_k + 2q` upcrossings.
    pub within_upcrossings: bool,
    /// (ii): `ℬ_{k+1}` is ε-disjoint (exact flow certificate).
    pub disjoint: bool,
    /// `ℬ''` is ε-disjoint (exact flow certificate).
    pub intermediate_disjoint: bool,
    /// (iii): `|C_{k+1}| ≥ (1+δ/2)|C_k|`.
    pub grows: bool,
}

impl GrowthOutcome {
    pub fn growth_ratio(&self) -> Option<Rational> {
        (self.size_before > 0).then(|| Rational::new(self.size_after as i128, self.size_before as i128))
    }

    pub fn holds(&self) -> bool {
        self.within_upcrossings && self.disjoint && self.grows
    }
}

fn crossings_of<'a>(orbit: &'a OrbitData, c: &GroupElement) -> Result<&'a Crossings> {
    orbit.get(c).ok_or_else(|| Error::Insufficient(format!("no crossing data for center {c}")))
}

/// Assigns each point of `⋃ F_n c` to the first pair (canonical order) whose set contains it.
fn owners(seq: &FoelnerSequence, pairs: &[(GroupElement, usize)]) -> Result<BTreeMap<GroupElement, (GroupElement, usize)>> {
    let mut sorted = pairs.to_vec();
    sorted.sort();
    let mut out = BTreeMap::new();
    for (c, n) in sorted {
        for g in seq.get(n)?.translate(&c, Side::Right)?.iter() {
            out.entry(g).or_insert_with(|| (c.clone(), n));
        }
    }
    Ok(out)
}

fn union_size(seq: &FoelnerSequence, pairs: &[(GroupElement, usize)]) -> Result<u64> {
    let mut cov = Coverage::new(seq.group());
    for (c, n) in pairs {
        cov.insert(&seq.get(*n)?.translate(c, Side::Right)?);
    }
    Ok(cov.len())
}

/// One relay: every point of the current union borrows the next `q`
/// crossings of its owner, a Vitali selection is made at `ε/2`, and the
/// chosen pairs are moved back onto the owners.
fn relay(
    seq: &FoelnerSequence,
    pairs: &[(GroupElement, usize)],
    next_scales: impl Fn(&GroupElement, usize) -> Result<Vec<usize>>,
    params: &GrowthParams,
) -> Result<(Vec<(GroupElement, usize)>, CoveringOutcome)> {
    let owner = owners(seq, pairs)?;
    let mut map = BTreeMap::new();
    for (g, (c, n)) in &owner {
        map.insert(g.clone(), next_scales(c, *n)?);
    }
    let assignment = ScaleAssignment::new(map, params.q, seq.horizon())?;
    let centers = FiniteSubset::from_elements(seq.group(), owner.keys().cloned())?;
    let half = params.eps / Rational::from_integer(2);
    let inner = vitali_select(seq, &centers, &assignment, &half, &VitaliOptions::report(params.lambda))?;
    let moved: BTreeSet<(GroupElement, usize)> =
        inner.pairs.iter().map(|(g, n)| (owner[g].0.clone(), *n)).collect();
    Ok((moved.into_iter().collect(), inner.outcome))
}

fn selection(
    seq: &FoelnerSequence,
    pairs: Vec<(GroupElement, usize)>,
    eps: Rational,
    outcome: CoveringOutcome,
) -> Result<(CoveringSelection, bool)> {
    let family: Vec<FiniteSubset> =
        pairs.iter().map(|(c, n)| seq.get(*n)?.translate(c, Side::Right)).collect::<Result<_>>()?;
    let cert = certify_epsilon_disjoint(&family, &eps)?;
    let size = union_size(seq, &pairs)?;
    let (witnesses, ok) = match cert {
        DisjointnessCertificate::Feasible { witnesses } => (witnesses, true),
        DisjointnessCertificate::Infeasible { .. } => (Vec::new(), false),
    };
    let sel = CoveringSelection {
        group: seq.group(),
        pairs,
        witnesses,
        eps,
        outcome,
        union_size: size,
        covered_centers: 0,
        center_count: 0,
        notes: Vec::new(),
    };
    Ok((sel, ok))
}

/// `ℬ_k ↦ ℬ_{k+1}` using the next `q` downcrossings and then the next `q`
/// upcrossings of each owning center.
pub fn growth_step(
    seq: &FoelnerSequence,
    orbit: &OrbitData,
    current: &CoveringSelection,
    params: &GrowthParams,
) -> Result<GrowthOutcome> {
    params.check()?;
    let q = params.q;
    if current.pairs.is_empty() {
        let empty = CoveringSelection::empty(seq.group(), params.eps);
        return Ok(GrowthOutcome {
            next: empty.clone(),
            intermediate: empty,
            down_outcome: CoveringOutcome::Covering,
            up_outcome: CoveringOutcome::Covering,
            size_before: 0,
            size_intermediate: 0,
            size_after: 0,
            upcrossing_limit: 2 * q,
            within_upcrossings: true,
            disjoint: true,
            intermediate_disjoint: true,
            grows: true,
        });
    }
    let mut n_k = 0;
    for (c, n) in &current.pairs {
        let cr = crossings_of(orbit, c)?;
        let pos = cr.ups.iter().position(|u| u == n).ok_or_else(|| {
            Error::Precondition(format!("scale {n} is not an upcrossing of center {c}"))
        })?;
        n_k = n_k.max(pos + 1);
    }
    let size_before = union_size(seq, &current.pairs)?;

    let downs_after = |c: &GroupElement, n: usize| -> Result<Vec<usize>> {
        let d: Vec<usize> = crossings_of(orbit, c)?.downs.iter().copied().filter(|&x| x > n).take(q).collect();
        if d.len() < q {
            return Err(Error::Insufficient(format!("center {c} has fewer than {q} downcrossings after {n}")));
        }
        Ok(d)
    };
    let (mid_pairs, down_outcome) = relay(seq, &current.pairs, downs_after, params)?;
    let (intermediate, intermediate_disjoint) = selection(seq, mid_pairs, params.eps, down_outcome)?;

    let ups_after = |c: &GroupElement, n: usize| -> Result<Vec<usize>> {
        let u: Vec<usize> = crossings_of(orbit, c)?.ups.iter().copied().filter(|&x| x > n).take(q).collect();
        if u.len() < q {
            return Err(Error::Insufficient(format!("center {c} has fewer than {q} upcrossings after {n}")));
        }
        Ok(u)
    };
    let (next_pairs, up_outcome) = relay(seq, &intermediate.pairs, ups_after, params)?;
    let (next, disjoint) = selection(seq, next_pairs, params.eps, up_outcome)?;

    let limit = n_k + 2 * q;
    let mut within = true;
    for (c, n) in &next.pairs {
        let pos = crossings_of(orbit, c)?.ups.iter().position(|u| u == n);
        within &= matches!(pos, Some(p) if p < limit);
    }
    let size_after = next.union_size;
    let target = (Rational::one() + params.delta / Rational::from_integer(2)) * Rational::from_integer(size_before as i128);
    let grows = Rational::from_integer(size_after as i128) >= target;
    Ok(GrowthOutcome {
        size_intermediate: intermediate.union_size,
        next,
        intermediate,
        down_outcome,
        up_outcome,
        size_before,
        size_after,
        upcrossing_limit: limit,
        within_upcrossings: within,
        disjoint,
        intermediate_disjoint,
        grows,
    })
}

/// `ℬ_1`: every center offers its first `q` upcrossings.
pub fn initial_selection(
    seq: &FoelnerSequence,
    orbit: &OrbitData,
    centers: &FiniteSubset,
    params: &GrowthParams,
) -> Result<CoveringSelection> {
    params.check()?;
    let mut map = BTreeMap::new();
    for c in centers.iter() {
        let ups: Vec<usize> = crossings_of(orbit, &c)?.ups.iter().copied().take(params.q).collect();
        if ups.len() < params.q {
            return Err(Error::Insufficient(format!("center {c} has fewer than {} upcrossings", params.q)));
        }
        map.insert(c, ups);
    }
    let assignment = ScaleAssignment::new(map, params.q, seq.horizon())?;
    let half = params.eps / Rational::from_integer(2);
    let inner = vitali_select(seq, centers, &assignment, &half, &VitaliOptions::report(params.lambda))?;
    let outcome = inner.outcome;
    let (mut sel, _) = selection(seq, inner.pairs, params.eps, outcome)?;
    sel.covered_centers = inner.covered_centers;
    sel.center_count = inner.center_count;
    sel.notes = inner.notes;
    Ok(sel)
}
