use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::certify::{certify_epsilon_disjoint, DisjointnessCertificate};
use super::coverage::Coverage;
use super::disjointify::epsilon_disjointify;
use crate::error::{invalid, Error, Result};
use crate::foelner::{check_goodness, FoelnerSequence, GoodnessMode};
use crate::group::{FiniteSubset, GroupElement, GroupKind, Side};
use crate::rational::{ceil_i128, Rational};

/// `c ↦ n_1(c) < … < n_q(c)` for every center.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaleAssignment {
    q: usize,
    map: BTreeMap<GroupElement, Vec<usize>>,
}

impl ScaleAssignment {
    pub fn new(map: BTreeMap<GroupElement, Vec<usize>>, q: usize, horizon: usize) -> Result<Self> {
        if q == 0 {
            return Err(invalid("q must be positive"));
        }
        for (c, list) in &map {
            if list.len() != q {
                return Err(invalid(format!("center {c} has {} scales, expected {q}", list.len())));
            }
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(invalid(format!("scales of center {c} must increase strictly")));
            }
            if list.iter().any(|&n| n == 0 || n > horizon) {
                return Err(Error::OutOfHorizon { index: *list.iter().max().unwrap(), horizon });
            }
        }
        Ok(ScaleAssignment { q, map })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn scales(&self, c: &GroupElement) -> Option<&[usize]> {
        self.map.get(c).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GroupElement, &Vec<usize>)> {
        self.map.iter()
    }

    pub fn max_scale(&self) -> Option<usize> {
        self.map.values().filter_map(|v| v.last().copied()).max()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoveringOutcome {
    /// `|⋃ F_{n(d)} d| ≥ 2|C|`.
    Expansive,
    /// `|⋃ F_{n(d)} d ∩ C| ≥ (1-ε)|C|`.
    Covering,
    PostconditionFailed,
}

impl fmt::Display for CoveringOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CoveringOutcome::Expansive => "expansive",
            CoveringOutcome::Covering => "covering",
            CoveringOutcome::PostconditionFailed => "postcondition-failed",
        };
        f.write_str(s)
    }
}

/// `(d, n(d))` pairs with pairwise disjoint witnesses `E ⊂ F_{n(d)} d`.
#[derive(Clone, Debug)]
pub struct CoveringSelection {
    pub group: GroupKind,
    pub pairs: Vec<(GroupElement, usize)>,
    pub witnesses: Vec<FiniteSubset>,
    pub eps: Rational,
    pub outcome: CoveringOutcome,
    pub union_size: u64,
    /// `|⋃ F_{n(d)} d ∩ C|`.
    pub covered_centers: u64,
    pub center_count: u64,
    /// Preconditions that failed but were only reported.
    pub notes: Vec<String>,
}

impl CoveringSelection {
    pub fn empty(group: GroupKind, eps: Rational) -> Self {
        CoveringSelection {
            group,
            pairs: Vec::new(),
            witnesses: Vec::new(),
            eps,
            outcome: CoveringOutcome::Covering,
            union_size: 0,
            covered_centers: 0,
            center_count: 0,
            notes: Vec::new(),
        }
    }

    /// `F_{n(d)} d` for every pair.
    pub fn family(&self, seq: &FoelnerSequence) -> Result<Vec<FiniteSubset>> {
        self.pairs.iter().map(|(d, n)| seq.get(*n)?.translate(d, Side::Right)).collect()
    }

    pub fn union(&self, seq: &FoelnerSequence) -> Result<FiniteSubset> {
        let mut cov = Coverage::new(self.group);
        for s in self.family(seq)? {
            cov.insert(&s);
        }
        Ok(cov.to_subset())
    }

    pub fn certify(&self, seq: &FoelnerSequence) -> Result<DisjointnessCertificate> {
        certify_epsilon_disjoint(&self.family(seq)?, &self.eps)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PreconditionPolicy {
    /// Violations are errors.
    Strict,
    /// Violations are recorded in `notes` and the descent still runs.
    Report,
}

#[derive(Clone, Debug)]
pub struct VitaliOptions {
    pub lambda: Rational,
    pub policy: PreconditionPolicy,
    pub goodness: GoodnessMode,
}

impl VitaliOptions {
    pub fn strict(lambda: Rational) -> Self {
        VitaliOptions { lambda, policy: PreconditionPolicy::Strict, goodness: GoodnessMode::Full }
    }

    pub fn report(lambda: Rational) -> Self {
        VitaliOptions { lambda, policy: PreconditionPolicy::Report, goodness: GoodnessMode::Full }
    }
}

/// Descent over scales: take the largest scale's section, disjointify it,
/// mask every center that `⋃_{i<n} F_i⁻¹ F_n D_n` reaches, then move to the
/// next scale down.
pub fn vitali_select(
    seq: &FoelnerSequence,
    centers: &FiniteSubset,
    assignment: &ScaleAssignment,
    eps: &Rational,
    options: &VitaliOptions,
) -> Result<CoveringSelection> {
    if *eps <= Rational::zero() || *eps > Rational::new(1, 2) {
        return Err(invalid(format!("epsilon must lie in (0, 1/2], got {eps}")));
    }
    let group = seq.group();
    if centers.group() != group {
        return Err(Error::GroupMismatch(group, centers.group()));
    }
    if centers.len() != assignment.map.len() as u64 || centers.iter().any(|c| !assignment.map.contains_key(&c)) {
        return Err(invalid("assignment must cover exactly the center set"));
    }
    if centers.is_empty() {
        return Ok(CoveringSelection::empty(group, *eps));
    }
    let m = assignment.max_scale().expect("nonempty assignment");
    seq.check_horizon(m)?;

    let mut notes = Vec::new();
    let q_min = ceil_i128(&(Rational::from_integer(20) / (eps * eps)));
    if (assignment.q as i128) < q_min {
        notes.push(format!("q = {} is below 20/eps^2 = {q_min}", assignment.q));
    }
    if options.lambda > eps / Rational::from_integer(8) {
        notes.push(format!("lambda = {} exceeds eps/8", options.lambda));
    }
    if options.lambda <= Rational::zero() || options.lambda >= Rational::one() {
        notes.push(format!("lambda = {} outside (0,1)", options.lambda));
    } else {
        let g = check_goodness(seq, &options.lambda, m, options.goodness)?;
        if let Some(v) = g.violation {
            notes.push(format!("sequence not lambda-good: {:?} at n = {}", v.condition, v.n));
        }
    }
    if options.policy == PreconditionPolicy::Strict && !notes.is_empty() {
        return Err(Error::Precondition(notes.join("; ")));
    }

    // P_n = ⋃_{i<n} F_i, built on demand.
    let mut prefix: Vec<Option<FiniteSubset>> = vec![None; m + 1];
    let mut acc: Option<FiniteSubset> = None;
    for n in 1..=m {
        prefix[n] = acc.clone();
        let f = seq.get(n)?;
        acc = Some(match acc {
            None => f.clone(),
            Some(p) => p.union(f)?,
        });
    }

    let mut mask = Coverage::new(group);
    let mut union = Coverage::new(group);
    let mut pairs = Vec::new();
    let mut witnesses = Vec::new();
    for n in (1..=m).rev() {
        let section: Vec<GroupElement> = assignment
            .map
            .iter()
            .filter(|(c, list)| list.binary_search(&n).is_ok() && !mask.contains(c))
            .map(|(c, _)| c.clone())
            .collect();
        if section.is_empty() {
            continue;
        }
        let f = seq.get(n)?;
        let cn = FiniteSubset::from_elements(group, section)?;
        let chosen = epsilon_disjointify(std::slice::from_ref(f), &[cn], eps)?;
        let dn = &chosen.selected[0];
        for (_, d, e) in chosen.witnesses {
            union.insert(&f.translate(&d, Side::Right)?);
            pairs.push((d, n));
            witnesses.push(e);
        }
        if let (Some(p), false) = (&prefix[n], dn.is_empty()) {
            let q_n = p.inverse().product(f)?;
            for d in dn {
                mask.insert(&q_n.translate(d, Side::Right)?);
            }
        }
    }

    let union_size = union.len();
    let covered_centers = centers.iter().filter(|c| union.contains(c)).count() as u64;
    let center_count = centers.len();
    let outcome = if union_size >= 2 * center_count {
        CoveringOutcome::Expansive
    } else if Rational::from_integer(covered_centers as i128)
        >= (Rational::one() - eps) * Rational::from_integer(center_count as i128)
    {
        CoveringOutcome::Covering
    } else {
        CoveringOutcome::PostconditionFailed
    };
    Ok(CoveringSelection {
        group,
        pairs,
        witnesses,
        eps: *eps,
        outcome,
        union_size,
        covered_centers,
        center_count,
        notes,
    })
}
