use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupKind {
    Integers,
    /// ℤ^d for d ≥ 2; ℤ itself is always `Integers`.
    Lattice(u8),
    /// H₃(ℤ) with (a,b,c)·(a′,b′,c′) = (a+a′, b+b′, c+c′+ab′).
    Heisenberg,
}

impl GroupKind {
    pub fn lattice(d: usize) -> Result<Self> {
        match d {
            0 => Err(invalid("lattice dimension must be at least 1")),
            1 => Ok(GroupKind::Integers),
            d if d <= u8::MAX as usize => Ok(GroupKind::Lattice(d as u8)),
            _ => Err(invalid(format!("lattice dimension {d} too large"))),
        }
    }

    pub fn is_abelian(self) -> bool {
        !matches!(self, GroupKind::Heisenberg)
    }

    pub fn identity(self) -> GroupElement {
        match self {
            GroupKind::Integers => GroupElement::Int(0),
            GroupKind::Lattice(d) => GroupElement::Vector(vec![0; d as usize]),
            GroupKind::Heisenberg => GroupElement::Heis([0, 0, 0]),
        }
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::Integers => write!(f, "Z"),
            GroupKind::Lattice(d) => write!(f, "Z^{d}"),
            GroupKind::Heisenberg => write!(f, "H3"),
        }
    }
}

impl FromStr for GroupKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "Z" => Ok(GroupKind::Integers),
            "H3" => Ok(GroupKind::Heisenberg),
            other => {
                let d = other
                    .strip_prefix("Z^")
                    .and_then(|d| d.parse::<usize>().ok())
                    .ok_or_else(|| invalid(format!("unknown group {other:?}")))?;
                GroupKind::lattice(d)
            }
        }
    }
}

/// Elements order lexicographically on coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElement {
    Int(i64),
    Vector(Vec<i64>),
    Heis([i64; 3]),
}

impl GroupElement {
    pub fn heis(a: i64, b: i64, c: i64) -> Self {
        GroupElement::Heis([a, b, c])
    }

    pub fn kind(&self) -> GroupKind {
        match self {
            GroupElement::Int(_) => GroupKind::Integers,
            GroupElement::Vector(v) => GroupKind::Lattice(v.len() as u8),
            GroupElement::Heis(_) => GroupKind::Heisenberg,
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            GroupElement::Int(x) => *x == 0,
            GroupElement::Vector(v) => v.iter().all(|&x| x == 0),
            GroupElement::Heis(t) => *t == [0, 0, 0],
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            GroupElement::Int(x) => Some(*x),
            _ => None,
        }
    }

    pub fn coords(&self) -> Vec<i64> {
        match self {
            GroupElement::Int(x) => vec![*x],
            GroupElement::Vector(v) => v.clone(),
            GroupElement::Heis(t) => t.to_vec(),
        }
    }

    pub fn mul(&self, other: &GroupElement) -> Result<GroupElement> {
        if self.kind() != other.kind() {
            return Err(Error::GroupMismatch(self.kind(), other.kind()));
        }
        Ok(self.compose(other))
    }

    /// Product without the group check; callers guarantee matching kinds.
    pub(crate) fn compose(&self, other: &GroupElement) -> GroupElement {
        match (self, other) {
            (GroupElement::Int(x), GroupElement::Int(y)) => GroupElement::Int(x + y),
            (GroupElement::Vector(u), GroupElement::Vector(v)) => {
                GroupElement::Vector(u.iter().zip(v).map(|(a, b)| a + b).collect())
            }
            (GroupElement::Heis([a, b, c]), GroupElement::Heis([a2, b2, c2])) => {
                GroupElement::Heis([a + a2, b + b2, c + c2 + a * b2])
            }
            _ => panic!("compose on mismatched groups {self:?} and {other:?}"),
        }
    }

    pub fn inverse(&self) -> GroupElement {
        match self {
            GroupElement::Int(x) => GroupElement::Int(-x),
            GroupElement::Vector(v) => GroupElement::Vector(v.iter().map(|x| -x).collect()),
            GroupElement::Heis([a, b, c]) => GroupElement::Heis([-a, -b, -c + a * b]),
        }
    }

    /// Parses `5` for ℤ, `1,0,-2` (optionally parenthesised) otherwise.
    pub fn parse(kind: GroupKind, token: &str) -> Result<GroupElement> {
        let t = token.trim().trim_start_matches('(').trim_end_matches(')');
        let nums: Vec<i64> = t
            .split(',')
            .map(|p| p.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| invalid(format!("bad element {token:?}")))?;
        let el = match (kind, nums.as_slice()) {
            (GroupKind::Integers, [x]) => GroupElement::Int(*x),
            (GroupKind::Heisenberg, [a, b, c]) => GroupElement::Heis([*a, *b, *c]),
            (GroupKind::Lattice(d), v) if v.len() == d as usize => GroupElement::Vector(v.to_vec()),
            _ => return Err(invalid(format!("element {token:?} does not belong to {kind}"))),
        };
        Ok(el)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Int(x) => write!(f, "{x}"),
            other => {
                let c: Vec<String> = other.coords().iter().map(i64::to_string).collect();
                write!(f, "({})", c.join(","))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heisenberg_inverse_of_ones() {
        let g = GroupElement::heis(1, 1, 1);
        assert_eq!(g.inverse(), GroupElement::heis(-1, -1, 0));
        assert!(g.compose(&g.inverse()).is_identity());
        assert!(g.inverse().compose(&g).is_identity());
    }

    #[test]
    fn mismatched_product_is_an_error() {
        let e = GroupElement::Int(1).mul(&GroupElement::heis(0, 0, 0));
        assert!(matches!(e, Err(Error::GroupMismatch(..))));
    }

    #[test]
    fn kinds_round_trip_through_text() {
        for k in [GroupKind::Integers, GroupKind::Lattice(3), GroupKind::Heisenberg] {
            assert_eq!(k.to_string().parse::<GroupKind>().unwrap(), k);
        }
        assert_eq!("Z^1".parse::<GroupKind>().unwrap(), GroupKind::Integers);
        let g = GroupElement::parse(GroupKind::Lattice(2), "(3,-4)").unwrap();
        assert_eq!(g.to_string(), "(3,-4)");
    }
}
