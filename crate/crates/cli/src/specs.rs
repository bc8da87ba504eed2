//! Turning config specs into core objects.

use std::sync::Arc;

use fluctlab_core::counterexample::{build_concatenated_foelner, BlockMode, BlockSequence, Omega, StageFunction};
use fluctlab_core::dynamics::{
    BernoulliShift, CyclicSystem, DenseLabels, OdometerSystem, RotationSystem, SampleableSystem,
};
use fluctlab_core::foelner::{parse_sequence, BuiltinKind, FoelnerSequence, Provenance};
use fluctlab_core::{FiniteSubset, GroupElement, GroupKind, Rational, RunList};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{rational, CenterRange, OmegaSpec, SequenceSpec, SystemSpec};
use crate::error::CliError;

pub fn build_system(spec: &SystemSpec, seed: u64) -> Result<SampleableSystem, CliError> {
    Ok(match spec {
        SystemSpec::Cyclic { values } => {
            let v = values.iter().map(|s| rational("system.values", s)).collect::<Result<Vec<_>, _>>()?;
            SampleableSystem::FiniteCyclic(CyclicSystem::new(&v)?)
        }
        SystemSpec::CyclicIndicator { size, points, runs } => {
            let mut pts = points.clone();
            for &[a, b] in runs {
                if a > b {
                    return Err(CliError::Schema(format!("decreasing run [{a}, {b}]")));
                }
                pts.extend(a..=b);
            }
            SampleableSystem::FiniteCyclic(CyclicSystem::indicator(*size, pts)?)
        }
        SystemSpec::Rotation { theta, lo, hi } => SampleableSystem::Rotation(RotationSystem::new(*theta, *lo, *hi)?),
        SystemSpec::Bernoulli { group, weights, values } => {
            let g: GroupKind = group.parse()?;
            SampleableSystem::Bernoulli(BernoulliShift::new(g, weights, values, seed)?)
        }
        SystemSpec::Odometer { depth, levels } => {
            let labels = DenseLabels::indicator(*depth, levels.iter().copied())?;
            SampleableSystem::Odometer(OdometerSystem::new(Arc::new(labels))?)
        }
        SystemSpec::StageFunction { path } => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let f = StageFunction::parse(&text)?;
            SampleableSystem::Odometer(OdometerSystem::new(Arc::new(f))?)
        }
    })
}

pub fn build_sequence(spec: &SequenceSpec) -> Result<FoelnerSequence, CliError> {
    Ok(match spec {
        SequenceSpec::Intervals { horizon } => FoelnerSequence::builtin(BuiltinKind::Intervals, *horizon)?,
        SequenceSpec::Powers { base, horizon } => FoelnerSequence::builtin(BuiltinKind::Powers { base: *base }, *horizon)?,
        SequenceSpec::Boxes { dim, horizon } => FoelnerSequence::builtin(BuiltinKind::Boxes { dim: *dim }, *horizon)?,
        SequenceSpec::HeisenbergBalls { horizon } => FoelnerSequence::builtin(BuiltinKind::HeisenbergBalls, *horizon)?,
        SequenceSpec::PaddedPowers { copies, base, powers } => padded_powers(*copies, *base, *powers)?,
        SequenceSpec::File { path } => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            parse_sequence(&text)?
        }
        SequenceSpec::Blocks { lambda, l, pairs } => {
            let b = BlockSequence::build(rational("sequence.lambda", lambda)?, *l, *pairs)?;
            let sets = b.sets().iter().cloned().map(FiniteSubset::from_runs).collect();
            FoelnerSequence::new(
                GroupKind::Integers,
                sets,
                Provenance::Derived(format!("blocks(l={l}, pairs={pairs})")),
            )?
        }
        SequenceSpec::Concatenated { lambda, l0, pairs, blocks } => {
            let mode = match pairs {
                Some(p) => BlockMode::Desk { pairs: *p },
                None => BlockMode::Faithful,
            };
            build_concatenated_foelner(rational("sequence.lambda", lambda)?, *l0, mode, *blocks)?.sequence
        }
    })
}

/// `copies` copies of `{0}`, then `[0, base^k - 1]` for `k = 1..=powers`.
pub fn padded_powers(copies: usize, base: u32, powers: usize) -> Result<FoelnerSequence, CliError> {
    if base < 2 || copies + powers == 0 {
        return Err(CliError::Schema("padded-powers needs base >= 2 and at least one set".into()));
    }
    let mut sets = vec![FiniteSubset::from_ints([0]); copies];
    let mut size: i64 = 1;
    for _ in 0..powers {
        size = size.checked_mul(base as i64).ok_or_else(|| CliError::Schema("padded-powers overflow".into()))?;
        sets.push(FiniteSubset::from_runs(RunList::interval(0, size - 1)));
    }
    Ok(FoelnerSequence::new(
        GroupKind::Integers,
        sets,
        Provenance::Derived(format!("padded powers(copies={copies}, base={base})")),
    )?)
}

pub fn build_omega(spec: &OmegaSpec) -> Result<Omega, CliError> {
    let r = |s: &str| rational("counterexample.omega", s);
    Ok(match spec {
        OmegaSpec::Geometric(s) => Omega::Geometric { ratio: r(s)? },
        OmegaSpec::Harmonic(s) => Omega::Harmonic { scale: r(s)? },
        OmegaSpec::Values(v) => Omega::Values(v.iter().map(|s| r(s)).collect::<Result<Vec<Rational>, _>>()?),
    })
}

/// Centers in `[lo, hi]`: all of them, or a seeded random subset.
pub fn build_centers(range: &CenterRange, seed: u64) -> Result<FiniteSubset, CliError> {
    if range.lo > range.hi {
        return Err(CliError::Schema(format!("empty center range [{}, {}]", range.lo, range.hi)));
    }
    let width = (range.hi - range.lo + 1) as usize;
    match range.count {
        None => Ok(FiniteSubset::interval(range.lo, range.hi)),
        Some(k) if k > width => Err(CliError::Schema(format!("cannot pick {k} centers from {width}"))),
        Some(k) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let xs = sample(&mut rng, width, k).into_iter().map(|i| range.lo + i as i64);
            Ok(FiniteSubset::from_ints(xs))
        }
    }
}

/// For each center a uniformly random `q`-subset of `1..=horizon`, sorted.
pub fn random_scales(
    centers: &FiniteSubset,
    q: usize,
    horizon: usize,
    seed: u64,
) -> Result<std::collections::BTreeMap<GroupElement, Vec<usize>>, CliError> {
    if q == 0 || q > horizon {
        return Err(CliError::Schema(format!("q = {q} must lie in 1..={horizon}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    Ok(centers
        .iter()
        .map(|c| {
            let mut s: Vec<usize> = sample(&mut rng, horizon, q).into_iter().map(|i| i + 1).collect();
            s.sort_unstable();
            (c, s)
        })
        .collect())
}
