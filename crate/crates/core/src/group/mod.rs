//! Elements and finite subsets of ℤ, ℤ^d and the discrete Heisenberg group.

mod element;
mod runs;
mod subset;

pub use element::{GroupElement, GroupKind};
pub use runs::{IntervalAccumulator, RunList};
pub use subset::{FiniteSubset, Side};
