//! Measure-preserving systems, ergodic averages and fluctuation statistics.

mod bound;
mod estimate;
mod fluct;
mod labels;
mod system;

pub use bound::{eps_feasible, theorem_bound, theorem_bound_shifted, BoundConstants, RationalPower};
pub use estimate::{
    estimate_curve, estimate_mu_dn, exact_histogram, exact_mu_dn, fluctuation_counts, orbit_crossings,
    report_from_counts, wilson_interval, EstimateReport, FluctuationQuery, WILSON_Z,
};
pub use fluct::{count_fluctuations, crossings, Crossings};
pub use labels::{
    enumerate_levels, level_averages, DenseLabels, FluctuationHistogram, PeriodicLabels, ENUMERATION_LIMIT,
};
pub use system::{
    AverageSeq, BernoulliShift, CyclicSystem, OdometerSystem, Point, RotationSystem, SampleableSystem, SUMMAND_CAP,
};

pub(crate) use labels::runlists;
