use std::fmt;

use crate::error::{invalid, overflow, Error, Result};
use crate::group::{FiniteSubset, GroupElement, GroupKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BuiltinKind {
    /// `F_n = [0, n-1]`.
    Intervals,
    /// `F_n = [0, base^n - 1]`.
    Powers { base: u32 },
    /// `F_n = [-n, n]^dim`.
    Boxes { dim: usize },
    /// `F_n = S^n`, `S = {e, (±1,0,0), (0,±1,0)}`.
    HeisenbergBalls,
}

impl fmt::Display for BuiltinKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuiltinKind::Intervals => write!(f, "intervals"),
            BuiltinKind::Powers { base } => write!(f, "powers(base={base})"),
            BuiltinKind::Boxes { dim } => write!(f, "boxes(d={dim})"),
            BuiltinKind::HeisenbergBalls => write!(f, "heisenberg_balls"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Builtin(BuiltinKind),
    Explicit,
    Derived(String),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Builtin(k) => write!(f, "builtin {k}"),
            Provenance::Explicit => write!(f, "explicit"),
            Provenance::Derived(s) => write!(f, "{s}"),
        }
    }
}

/// `F_1, …, F_{n_max}`, all nonempty, indexed from 1.
#[derive(Clone, Debug)]
pub struct FoelnerSequence {
    group: GroupKind,
    sets: Vec<FiniteSubset>,
    provenance: Provenance,
}

impl FoelnerSequence {
    pub fn new(group: GroupKind, sets: Vec<FiniteSubset>, provenance: Provenance) -> Result<Self> {
        if sets.is_empty() {
            return Err(invalid("a sequence needs at least one set"));
        }
        for (i, s) in sets.iter().enumerate() {
            if s.group() != group {
                return Err(Error::GroupMismatch(group, s.group()));
            }
            if s.is_empty() {
                return Err(invalid(format!("F_{} is empty", i + 1)));
            }
        }
        Ok(FoelnerSequence { group, sets, provenance })
    }

    pub fn explicit(group: GroupKind, sets: Vec<FiniteSubset>) -> Result<Self> {
        Self::new(group, sets, Provenance::Explicit)
    }

    pub fn builtin(kind: BuiltinKind, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(invalid("horizon must be at least 1"));
        }
        let (group, sets) = match &kind {
            BuiltinKind::Intervals => {
                let sets = (1..=horizon).map(|n| FiniteSubset::interval(0, n as i64 - 1)).collect();
                (GroupKind::Integers, sets)
            }
            BuiltinKind::Powers { base } => {
                if *base < 2 {
                    return Err(invalid("powers need base >= 2"));
                }
                let mut sets = Vec::with_capacity(horizon);
                let mut size: i64 = 1;
                for n in 1..=horizon {
                    size = size
                        .checked_mul(*base as i64)
                        .ok_or_else(|| overflow(format!("{base}^{n} exceeds i64")))?;
                    sets.push(FiniteSubset::interval(0, size - 1));
                }
                (GroupKind::Integers, sets)
            }
            BuiltinKind::Boxes { dim } => {
                let group = GroupKind::lattice(*dim)?;
                let sets = (1..=horizon).map(|n| cube(*dim, n as i64)).collect::<Result<_>>()?;
                (group, sets)
            }
            BuiltinKind::HeisenbergBalls => {
                let s = heisenberg_generators();
                let mut sets = Vec::with_capacity(horizon);
                let mut ball = s.clone();
                sets.push(ball.clone());
                for _ in 1..horizon {
                    ball = ball.product(&s)?;
                    sets.push(ball.clone());
                }
                (GroupKind::Heisenberg, sets)
            }
        };
        Self::new(group, sets, Provenance::Builtin(kind))
    }

    pub fn group(&self) -> GroupKind {
        self.group
    }

    pub fn horizon(&self) -> usize {
        self.sets.len()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn sets(&self) -> &[FiniteSubset] {
        &self.sets
    }

    /// `F_n`, 1-based.
    pub fn get(&self, n: usize) -> Result<&FiniteSubset> {
        if n == 0 || n > self.sets.len() {
            return Err(Error::OutOfHorizon { index: n, horizon: self.sets.len() });
        }
        Ok(&self.sets[n - 1])
    }

    pub fn check_horizon(&self, horizon: usize) -> Result<()> {
        if horizon > self.sets.len() {
            return Err(Error::OutOfHorizon { index: horizon, horizon: self.sets.len() });
        }
        Ok(())
    }

    /// `F_1, …, F_h`.
    pub fn prefix(&self, h: usize) -> Result<FoelnerSequence> {
        self.check_horizon(h)?;
        Self::new(self.group, self.sets[..h].to_vec(), self.provenance.clone())
    }

    /// `F_{n0}, F_{n0+1}, …` re-indexed from 1.
    pub fn tail(&self, n0: usize) -> Result<FoelnerSequence> {
        self.get(n0)?;
        let p = Provenance::Derived(format!("tail from {n0} of {}", self.provenance));
        Self::new(self.group, self.sets[n0 - 1..].to_vec(), p)
    }

    /// The subsequence at the given 1-based indices (strictly increasing).
    pub fn select(&self, indices: &[usize]) -> Result<FoelnerSequence> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("subsequence indices must increase strictly"));
        }
        let sets = indices.iter().map(|&i| self.get(i).cloned()).collect::<Result<Vec<_>>>()?;
        let p = Provenance::Derived(format!("subsequence of {}", self.provenance));
        Self::new(self.group, sets, p)
    }

    /// Largest element over `F_1..F_h` for sequences in ℤ.
    pub fn max_int_upto(&self, h: usize) -> Result<i64> {
        self.check_horizon(h)?;
        self.sets[..h]
            .iter()
            .map(|s| s.max_int().ok_or_else(|| invalid("sequence is not in Z")))
            .try_fold(i64::MIN, |m, x| x.map(|x| m.max(x)))
    }
}

fn cube(dim: usize, n: i64) -> Result<FiniteSubset> {
    if dim == 1 {
        return Ok(FiniteSubset::interval(-n, n));
    }
    let side = (2 * n + 1) as u64;
    let count = side
        .checked_pow(dim as u32)
        .filter(|&c| c <= 50_000_000)
        .ok_or_else(|| overflow(format!("box [-{n},{n}]^{dim} too large to enumerate")))?;
    let mut out = Vec::with_capacity(count as usize);
    let mut coords = vec![-n; dim];
    loop {
        out.push(GroupElement::Vector(coords.clone()));
        let mut k = dim;
        loop {
            if k == 0 {
                return FiniteSubset::from_elements(GroupKind::Lattice(dim as u8), out);
            }
            k -= 1;
            if coords[k] < n {
                coords[k] += 1;
                break;
            }
            coords[k] = -n;
        }
    }
}

/// `{e, (±1,0,0), (0,±1,0)}`.
pub fn heisenberg_generators() -> FiniteSubset {
    let s = [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)].map(|(a, b)| GroupElement::heis(a, b, 0));
    FiniteSubset::from_elements(GroupKind::Heisenberg, s).expect("generators live in H3")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boxes_in_one_dimension() {
        let s = FoelnerSequence::builtin(BuiltinKind::Boxes { dim: 1 }, 2).unwrap();
        assert_eq!(s.get(2).unwrap(), &FiniteSubset::from_ints(-2..=2));
        assert_eq!(s.group(), GroupKind::Integers);
    }

    #[test]
    fn boxes_in_two_dimensions() {
        let s = FoelnerSequence::builtin(BuiltinKind::Boxes { dim: 2 }, 3).unwrap();
        assert_eq!(s.get(3).unwrap().len(), 49);
        assert!(s.get(1).unwrap().contains(&GroupElement::Vector(vec![-1, 1])));
    }

    #[test]
    fn heisenberg_ball_radius_one() {
        let s = FoelnerSequence::builtin(BuiltinKind::HeisenbergBalls, 1).unwrap();
        assert_eq!(s.get(1).unwrap().len(), 5);
    }

    #[test]
    fn powers_and_intervals() {
        let p = FoelnerSequence::builtin(BuiltinKind::Powers { base: 4 }, 3).unwrap();
        assert_eq!(p.get(3).unwrap(), &FiniteSubset::interval(0, 63));
        let i = FoelnerSequence::builtin(BuiltinKind::Intervals, 5).unwrap();
        assert_eq!(i.get(5).unwrap().len(), 5);
        assert!(FoelnerSequence::builtin(BuiltinKind::Powers { base: 1 }, 3).is_err());
        assert!(FoelnerSequence::builtin(BuiltinKind::Powers { base: 2 }, 70).is_err());
        assert!(FoelnerSequence::builtin(BuiltinKind::Intervals, 0).is_err());
    }

    #[test]
    fn indexing_and_tails() {
        let s = FoelnerSequence::builtin(BuiltinKind::Intervals, 4).unwrap();
        assert!(s.get(0).is_err());
        assert!(s.get(5).is_err());
        let t = s.tail(3).unwrap();
        assert_eq!(t.horizon(), 2);
        assert_eq!(t.get(1).unwrap().len(), 3);
        assert!(s.select(&[2, 2]).is_err());
        assert_eq!(s.select(&[1, 4]).unwrap().get(2).unwrap().len(), 4);
    }

    #[test]
    fn empty_sets_rejected() {
        let e = FiniteSubset::empty(GroupKind::Integers);
        assert!(FoelnerSequence::explicit(GroupKind::Integers, vec![e]).is_err());
    }
}
