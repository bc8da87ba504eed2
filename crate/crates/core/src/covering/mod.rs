//! ε-disjoint families, the disjointification greedy, the Vitali-type
//! covering descent and the growth step built on top of it.

mod certify;
mod coverage;
mod disjointify;
mod flow;
mod growth;
mod text;
mod vitali;

pub use certify::{certify_epsilon_disjoint, quota, verify_witnesses, DisjointnessCertificate};
pub use disjointify::{epsilon_disjointify, Disjointified};
pub use growth::{growth_step, initial_selection, GrowthOutcome, GrowthParams, OrbitData};
pub use text::{parse_assignment, parse_selection, write_assignment, write_selection};
pub use vitali::{
    vitali_select, CoveringOutcome, CoveringSelection, PreconditionPolicy, ScaleAssignment, VitaliOptions,
};
