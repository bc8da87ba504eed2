//! Følner sequences: generation, temperedness, λ-goodness, tails and thinning.

mod goodness;
mod sequence;
mod temper;
mod text;
mod thinning;

pub use goodness::{
    check_goodness, goodness_tail_index, is_lambda_good, left_overflow_size, GoodnessCondition, GoodnessMode,
    GoodnessReport, GoodnessViolation, TailIndex,
};
pub use sequence::{heisenberg_generators, BuiltinKind, FoelnerSequence, Provenance};
pub use temper::{folner_defect, tempered_report, TemperEntry, TemperednessReport};
pub use text::{format_subset, parse_sequence, parse_subset, write_sequence};
pub use thinning::{thin_strongly_tempered, Thinning};
