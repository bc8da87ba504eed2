//! The slowly decaying example on the dyadic odometer: block sets, their
//! concatenation, and finitely many tower relabellings.

mod blocks;
mod concat;
mod histogram;
mod stage;
mod tower;

pub use blocks::{
    gap_for, phi, phi_prefix, phi_sum, verify_invariance, verify_property_a, verify_property_b, verify_property_c,
    BlockSequence, PropertyAReport, PropertyBReport, PropertyCReport,
};
pub use concat::{build_concatenated_foelner, BlockMode, Concatenation};
pub use stage::{Layer, StageFunction};
pub use tower::{
    refinement_for, run_counterexample, selected_for, tower_update, CounterexampleParams, CounterexampleRun, DecayRow,
    KeptCount, Omega, TowerParams, TowerReport, TowerUpdate,
};
