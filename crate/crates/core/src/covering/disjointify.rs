use num_traits::{One, Zero};

use super::coverage::Coverage;
use crate::error::{invalid, Error, Result};
use crate::foelner::{tempered_report, FoelnerSequence};
use crate::group::{FiniteSubset, GroupElement, Side};
use crate::rational::Rational;

#[derive(Clone, Debug)]
pub struct Disjointified {
    /// `D_j ⊂ C_j`, in canonical order, one list per scale.
    pub selected: Vec<Vec<GroupElement>>,
    /// `(j, d, E)` with `E ⊂ F_j d`; pairwise disjoint by construction.
    pub witnesses: Vec<(usize, GroupElement, FiniteSubset)>,
    /// `|⋃_j F_j D_j|`.
    pub union_size: u64,
    /// `|C|`.
    pub center_count: u64,
    /// `|⋃_j F_j D_j| ≥ (ε/5)|C|`.
    pub bound_holds: bool,
}

impl Disjointified {
    /// The family `{F_j d}` in selection order.
    pub fn family(&self, scales: &[FiniteSubset]) -> Result<Vec<FiniteSubset>> {
        self.witnesses.iter().map(|(j, d, _)| scales[*j].translate(d, Side::Right)).collect()
    }
}

/// Greedy disjointification in decreasing scale order: a center is kept
/// iff its translate still has at least `(1-ε)` of its points uncovered.
pub fn epsilon_disjointify(
    scales: &[FiniteSubset],
    centers: &[FiniteSubset],
    eps: &Rational,
) -> Result<Disjointified> {
    if scales.is_empty() || scales.len() != centers.len() {
        return Err(invalid("need one center set per scale and at least one scale"));
    }
    if *eps <= Rational::zero() || *eps > Rational::new(1, 2) {
        return Err(invalid(format!("epsilon must lie in (0, 1/2], got {eps}")));
    }
    let group = scales[0].group();
    if let Some(bad) = scales.iter().chain(centers).find(|s| s.group() != group) {
        return Err(Error::GroupMismatch(group, bad.group()));
    }
    if scales.len() > 1 {
        let seq = FoelnerSequence::explicit(group, scales.to_vec())?;
        let report = tempered_report(&seq, scales.len())?;
        if let Some(e) = report.entries.iter().find(|e| e.left > Rational::from_integer(2)) {
            return Err(Error::Precondition(format!(
                "scales are not 2-tempered: left ratio {} at index {}",
                e.left, e.n
            )));
        }
    }
    let mut all = Coverage::new(group);
    for (j, c) in centers.iter().enumerate() {
        if let Some(g) = c.iter().find(|g| all.contains(g)) {
            return Err(Error::Precondition(format!("center sets overlap at {g} (scale {})", j + 1)));
        }
        all.insert(c);
    }
    let center_count = all.len();

    let keep = Rational::one() - eps;
    let mut covered = Coverage::new(group);
    let mut selected = vec![Vec::new(); scales.len()];
    let mut witnesses = Vec::new();
    for j in (0..scales.len()).rev() {
        let f = &scales[j];
        let size = Rational::from_integer(f.len() as i128);
        for d in centers[j].iter() {
            let moved = f.translate(&d, Side::Right)?;
            let fresh = covered.fresh_count(&moved);
            if Rational::from_integer(fresh as i128) >= keep * size {
                let e = covered.fresh_part(&moved);
                covered.insert(&moved);
                selected[j].push(d.clone());
                witnesses.push((j, d, e));
            }
        }
    }
    let union_size = covered.len();
    let bound_holds = Rational::from_integer(5 * union_size as i128) >= *eps * Rational::from_integer(center_count as i128);
    Ok(Disjointified { selected, witnesses, union_size, center_count, bound_holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::certify::{certify_epsilon_disjoint, verify_witnesses};

    #[test]
    fn far_apart_centers_all_kept() {
        let f = [FiniteSubset::interval(0, 9)];
        let c = [FiniteSubset::from_ints([0, 100])];
        let out = epsilon_disjointify(&f, &c, &Rational::new(1, 2)).unwrap();
        assert_eq!(out.selected[0], vec![GroupElement::Int(0), GroupElement::Int(100)]);
        assert_eq!(out.union_size, 20);
        assert!(out.bound_holds);
    }

    #[test]
    fn crowded_centers_thinned_and_certified() {
        let eps = Rational::new(1, 2);
        let f = [FiniteSubset::interval(0, 9)];
        let c = [FiniteSubset::interval(0, 9)];
        let out = epsilon_disjointify(&f, &c, &eps).unwrap();
        let fam = out.family(&f).unwrap();
        let ws: Vec<FiniteSubset> = out.witnesses.iter().map(|w| w.2.clone()).collect();
        assert!(verify_witnesses(&fam, &ws, &eps));
        assert!(certify_epsilon_disjoint(&fam, &eps).unwrap().is_feasible());
        assert!(out.bound_holds);
        assert_eq!(out.selected[0], vec![GroupElement::Int(0), GroupElement::Int(5)]);
    }

    #[test]
    fn overlapping_center_sets_rejected() {
        let f = [FiniteSubset::interval(0, 1), FiniteSubset::interval(0, 3)];
        let c = [FiniteSubset::from_ints([0, 1]), FiniteSubset::from_ints([1, 2])];
        let e = epsilon_disjointify(&f, &c, &Rational::new(1, 4)).unwrap_err();
        assert!(matches!(e, Error::Precondition(_)));
    }

    #[test]
    fn untempered_scales_rejected() {
        let f = [FiniteSubset::interval(0, 99), FiniteSubset::interval(0, 9)];
        let c = [FiniteSubset::from_ints([0]), FiniteSubset::from_ints([1])];
        let e = epsilon_disjointify(&f, &c, &Rational::new(1, 4)).unwrap_err();
        assert!(matches!(e, Error::Precondition(_)));
    }
}
