//! Exact set arithmetic on discrete groups, Følner sequence diagnostics,
//! covering selections, fluctuation statistics of ergodic averages and the
//! slow-decay construction on the dyadic odometer.

pub mod counterexample;
pub mod covering;
pub mod dynamics;
pub mod error;
pub mod foelner;
pub mod group;
pub mod rational;

pub use error::{Error, Result};
pub use group::{FiniteSubset, GroupElement, GroupKind, RunList, Side};
pub use rational::Rational;
