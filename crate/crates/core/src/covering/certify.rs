use std::collections::{BTreeMap, HashMap, HashSet};

use num_traits::{One, Zero};

use super::flow::FlowNetwork;
use crate::error::{invalid, Error, Result};
use crate::group::{FiniteSubset, GroupElement};
use crate::rational::{ceil_i128, Rational};

#[derive(Clone, Debug)]
pub enum DisjointnessCertificate {
    /// Pairwise disjoint `E_j ⊂ F_j` with `|E_j| ≥ ⌈(1-ε)|F_j|⌉`.
    Feasible { witnesses: Vec<FiniteSubset> },
    /// The quota network's max flow falls short of the total demand.
    Infeasible { demand: u64, max_flow: u64 },
}

impl DisjointnessCertificate {
    pub fn is_feasible(&self) -> bool {
        matches!(self, DisjointnessCertificate::Feasible { .. })
    }

    pub fn witnesses(&self) -> Option<&[FiniteSubset]> {
        match self {
            DisjointnessCertificate::Feasible { witnesses } => Some(witnesses),
            DisjointnessCertificate::Infeasible { .. } => None,
        }
    }
}

/// `⌈(1-ε)·size⌉`.
pub fn quota(size: u64, eps: &Rational) -> u64 {
    ceil_i128(&((Rational::one() - eps) * Rational::from_integer(size as i128))) as u64
}

fn check_eps(eps: &Rational) -> Result<()> {
    if *eps < Rational::zero() || *eps >= Rational::one() {
        return Err(invalid(format!("epsilon must lie in [0,1), got {eps}")));
    }
    Ok(())
}

/// Decides ε-disjointness exactly: greedy witnesses first, max-flow otherwise.
pub fn certify_epsilon_disjoint(family: &[FiniteSubset], eps: &Rational) -> Result<DisjointnessCertificate> {
    check_eps(eps)?;
    if let Some(first) = family.first() {
        if let Some(bad) = family.iter().find(|f| f.group() != first.group()) {
            return Err(Error::GroupMismatch(first.group(), bad.group()));
        }
    }
    let quotas: Vec<u64> = family.iter().map(|f| quota(f.len(), eps)).collect();
    if let Some(w) = greedy_witnesses(family, &quotas) {
        return Ok(DisjointnessCertificate::Feasible { witnesses: w });
    }
    Ok(flow_witnesses(family, &quotas))
}

fn greedy_witnesses(family: &[FiniteSubset], quotas: &[u64]) -> Option<Vec<FiniteSubset>> {
    let mut used: HashSet<GroupElement> = HashSet::new();
    let mut out = Vec::with_capacity(family.len());
    for (f, &q) in family.iter().zip(quotas) {
        let mut take = Vec::with_capacity(q as usize);
        for g in f.iter() {
            if take.len() as u64 == q {
                break;
            }
            if !used.contains(&g) {
                take.push(g);
            }
        }
        if (take.len() as u64) < q {
            return None;
        }
        used.extend(take.iter().cloned());
        out.push(FiniteSubset::from_elements(f.group(), take).ok()?);
    }
    Some(out)
}

fn flow_witnesses(family: &[FiniteSubset], quotas: &[u64]) -> DisjointnessCertificate {
    // Elements with the same membership pattern are interchangeable.
    let mut membership: HashMap<GroupElement, Vec<u32>> = HashMap::new();
    for (j, f) in family.iter().enumerate() {
        for g in f.iter() {
            membership.entry(g).or_default().push(j as u32);
        }
    }
    let mut classes: BTreeMap<Vec<u32>, Vec<GroupElement>> = BTreeMap::new();
    for (g, sig) in membership {
        classes.entry(sig).or_default().push(g);
    }
    let sets = family.len();
    let source = 0;
    let sink = 1 + sets + classes.len();
    let mut net = FlowNetwork::new(sink + 1);
    for (j, &q) in quotas.iter().enumerate() {
        net.add_edge(source, 1 + j, q as i64);
    }
    let mut class_edges = Vec::with_capacity(classes.len());
    for (k, (sig, members)) in classes.iter().enumerate() {
        let node = 1 + sets + k;
        net.add_edge(node, sink, members.len() as i64);
        let edges: Vec<(u32, usize)> =
            sig.iter().map(|&j| (j, net.add_edge(1 + j as usize, node, members.len() as i64))).collect();
        class_edges.push(edges);
    }
    let demand: u64 = quotas.iter().sum();
    let flow = net.max_flow(source, sink) as u64;
    if flow < demand {
        return DisjointnessCertificate::Infeasible { demand, max_flow: flow };
    }
    let mut picked: Vec<Vec<GroupElement>> = vec![Vec::new(); sets];
    for ((_, members), edges) in classes.iter_mut().zip(&class_edges) {
        members.sort_unstable();
        let mut next = 0usize;
        for &(j, e) in edges {
            let f = net.flow_on(e) as usize;
            picked[j as usize].extend(members[next..next + f].iter().cloned());
            next += f;
        }
    }
    let witnesses = family
        .iter()
        .zip(picked)
        .map(|(f, p)| FiniteSubset::from_elements(f.group(), p).expect("elements come from the family"))
        .collect();
    DisjointnessCertificate::Feasible { witnesses }
}

/// Independent check of a witness list.
pub fn verify_witnesses(family: &[FiniteSubset], witnesses: &[FiniteSubset], eps: &Rational) -> bool {
    if family.len() != witnesses.len() {
        return false;
    }
    let mut seen: HashSet<GroupElement> = HashSet::new();
    for (f, e) in family.iter().zip(witnesses) {
        if e.len() < quota(f.len(), eps) {
            return false;
        }
        for g in e.iter() {
            if !f.contains(&g) || !seen.insert(g) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disjoint_sets_at_zero() {
        let fam = vec![FiniteSubset::interval(0, 4), FiniteSubset::interval(10, 12)];
        let c = certify_epsilon_disjoint(&fam, &Rational::zero()).unwrap();
        assert_eq!(c.witnesses().unwrap(), fam.as_slice());
    }

    #[test]
    fn identical_sets_split_at_half() {
        let fam = vec![FiniteSubset::interval(0, 9), FiniteSubset::interval(0, 9)];
        let c = certify_epsilon_disjoint(&fam, &Rational::new(1, 2)).unwrap();
        let w = c.witnesses().unwrap();
        assert_eq!(w[0].len() + w[1].len(), 10);
        assert!(verify_witnesses(&fam, w, &Rational::new(1, 2)));
        let c = certify_epsilon_disjoint(&fam, &Rational::new(2, 5)).unwrap();
        assert!(matches!(c, DisjointnessCertificate::Infeasible { demand: 12, max_flow: 10 }));
    }

    #[test]
    fn flow_needed_where_greedy_fails() {
        // Greedy gives all of {0,1} to the first set, starving the second.
        let fam = vec![FiniteSubset::from_ints([0, 1, 2, 3]), FiniteSubset::from_ints([0, 1])];
        let eps = Rational::new(1, 2);
        assert!(greedy_witnesses(&fam, &[2, 1]).is_none());
        let c = certify_epsilon_disjoint(&fam, &eps).unwrap();
        let w = c.witnesses().unwrap();
        assert!(verify_witnesses(&fam, w, &eps));
    }

    #[test]
    fn bad_epsilon() {
        assert!(certify_epsilon_disjoint(&[], &Rational::one()).is_err());
        assert!(certify_epsilon_disjoint(&[], &Rational::new(-1, 2)).is_err());
    }
}
