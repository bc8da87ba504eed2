use std::sync::Arc;

use num_traits::{One, Zero};

use super::concat::{build_concatenated_foelner, BlockMode, Concatenation};
use super::stage::{Layer, StageFunction};
use crate::dynamics::{FluctuationHistogram, OdometerSystem, PeriodicLabels, SampleableSystem};
use crate::error::{invalid, Error, Result};
use crate::rational::{floor_i128, pow, Rational};

/// A decreasing schedule `ω(N) → 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Omega {
    /// `ω(N) = ratio^N`.
    Geometric { ratio: Rational },
    /// `ω(N) = 1/(scale·N)`.
    Harmonic { scale: Rational },
    /// `ω(1), ω(2), …` listed explicitly.
    Values(Vec<Rational>),
}

const MAX_THRESHOLD: usize = 100_000;

impl Omega {
    pub fn validate(&self) -> Result<()> {
        match self {
            Omega::Geometric { ratio } if *ratio <= Rational::zero() || *ratio >= Rational::one() => {
                Err(invalid("geometric ratio must lie in (0, 1)"))
            }
            Omega::Harmonic { scale } if *scale <= Rational::zero() => Err(invalid("harmonic scale must be positive")),
            Omega::Values(v) if v.is_empty() || v.windows(2).any(|w| w[1] > w[0]) || v.iter().any(|x| *x <= Rational::zero()) => {
                Err(invalid("values must be positive and non-increasing"))
            }
            _ => Ok(()),
        }
    }

    /// `N_k = min{N ≥ 1 : ω(N) < 2^{-k-1}/10}`.
    pub fn threshold(&self, k: u32) -> Result<usize> {
        self.validate()?;
        let bound = Rational::new(1, 10) / pow(&Rational::from_integer(2), k + 1);
        match self {
            Omega::Geometric { ratio } => {
                let mut w = Rational::one();
                for n in 1..=120 {
                    w *= ratio;
                    if w < bound {
                        return Ok(n);
                    }
                }
                Err(Error::Infeasible(format!("omega stays above {bound} up to N = 120")))
            }
            Omega::Harmonic { scale } => {
                let n = floor_i128(&(Rational::one() / (scale * bound))) + 1;
                usize::try_from(n.max(1))
                    .ok()
                    .filter(|&n| n <= MAX_THRESHOLD)
                    .ok_or_else(|| Error::Infeasible(format!("N_{k} = {n} is too large")))
            }
            Omega::Values(v) => v
                .iter()
                .position(|w| *w < bound)
                .map(|i| i + 1)
                .ok_or_else(|| Error::Infeasible(format!("no listed value falls below {bound}"))),
        }
    }
}

/// Inputs of one relabelling step.
#[derive(Clone, Debug)]
pub struct TowerParams {
    pub eps: Rational,
    pub delta: Rational,
    /// `n′`.
    pub prev_horizon: usize,
    /// `N′`.
    pub keep_count: usize,
    /// `N″`.
    pub target_count: usize,
    /// Block whose `φ_{l_m}` is written on the tower.
    pub block: usize,
    /// Horizon of the new stage.
    pub horizon: usize,
    pub max_depth: u32,
}

#[derive(Clone, Debug)]
pub struct KeptCount {
    pub n: usize,
    /// `μ(D^{f̂}_{N, horizon})`.
    pub after: Rational,
    /// `min{μ(D^f_{N,n′}) − ε, 1/10}`.
    pub required: Rational,
    pub holds: bool,
}

#[derive(Clone, Debug)]
pub struct TowerReport {
    pub stage: usize,
    pub eps: Rational,
    pub delta: Rational,
    pub prev_horizon: usize,
    pub horizon: usize,
    pub keep_count: usize,
    pub target_count: usize,
    pub block: usize,
    pub l: u64,
    /// `L = max ⋃_{n ≤ n′} F_n`.
    pub window: u64,
    pub block_max: u64,
    pub tower_depth: u32,
    pub refine: u32,
    pub selected: u64,
    /// `0.99δ − selected/2^refine`, always below `δ/100`.
    pub shortfall: Rational,
    /// `μ(D^{f̂}_{N″, horizon})`.
    pub target_measure: Rational,
    pub target_holds: bool,
    /// Measure of points whose length-`L` window meets a relabelled level.
    pub disagreement: Rational,
    pub disagreement_holds: bool,
    pub kept: Vec<KeptCount>,
    /// The previous period divides the tower height, so every base orbit
    /// sees each earlier level equally often.
    pub orbit_count_exact: bool,
}

impl TowerReport {
    pub fn conclusions_hold(&self) -> bool {
        self.target_holds && self.disagreement_holds && self.kept.iter().all(|k| k.holds)
    }
}

#[derive(Clone, Debug)]
pub struct TowerUpdate {
    pub function: StageFunction,
    pub histogram: FluctuationHistogram,
    pub report: TowerReport,
}

/// Smallest `r` with `2^{-r} < δ/100`.
pub fn refinement_for(delta: &Rational) -> u32 {
    (0..=62).find(|&r| Rational::new(100, 1) < delta * Rational::from_integer(1i128 << r)).unwrap_or(62)
}

/// `⌊0.99·δ·2^r⌋`.
pub fn selected_for(delta: &Rational, r: u32) -> u64 {
    floor_i128(&(Rational::new(99, 100) * delta * Rational::from_integer(1i128 << r))) as u64
}

pub fn tower_update(
    f: &StageFunction,
    concat: &Concatenation,
    prev_histogram: &FluctuationHistogram,
    params: &TowerParams,
) -> Result<TowerUpdate> {
    let one = Rational::one();
    let TowerParams { eps, delta, .. } = params.clone();
    if !(Rational::zero() < delta && delta < one) {
        return Err(invalid("delta must lie in (0, 1)"));
    }
    if !(Rational::zero() < eps && eps < (delta / Rational::from_integer(100)).min(one - delta)) {
        return Err(Error::Precondition(format!("eps = {eps} must be below min(delta/100, 1 - delta)")));
    }
    if params.block >= concat.blocks.len() {
        return Err(invalid(format!("block {} has not been built", params.block)));
    }
    let seq = &concat.sequence;
    seq.check_horizon(params.horizon)?;
    let window = if params.prev_horizon == 0 { 0 } else { seq.max_int_upto(params.prev_horizon)?.max(0) as u64 };
    let block_max = concat.block_max(params.block);
    let need = Rational::from_integer(4 * (window as i128 + block_max as i128));
    let prev_depth = f.depth_at(f.stage());
    let tower_depth = (prev_depth..=62)
        .find(|&j| eps * Rational::from_integer(1i128 << j) > need)
        .ok_or_else(|| Error::Budget("no tower height below 2^62 satisfies the height constraint".into()))?;
    let refine = refinement_for(&delta);
    if tower_depth + refine > params.max_depth {
        return Err(Error::Budget(format!(
            "depth insufficient: need {} (tower {tower_depth} + refinement {refine}), budget {}",
            tower_depth + refine,
            params.max_depth
        )));
    }
    let selected = selected_for(&delta, refine);
    let layer = Layer {
        tower_depth,
        refine,
        selected,
        l: concat.ls[params.block],
        block: params.block,
        eps,
        delta,
        prev_horizon: params.prev_horizon,
        keep_count: params.keep_count,
        target_count: params.target_count,
    };
    let next = f.push(layer)?;
    let (alpha, beta) = super::blocks::gap_for(concat.lambda);
    let hist = next.fluctuation_histogram(seq, &alpha, &beta, params.horizon)?;

    let target_measure = hist.mu_at_least(params.target_count);
    let target_holds = target_measure > delta / Rational::from_integer(10);

    let period = next.period();
    let block_len = 1u64 << tower_depth;
    let disagreement = if window == 0 {
        Rational::zero()
    } else {
        let touched = selected as i128 * block_len as i128 + window as i128 - 1;
        Rational::new(touched.min(period as i128), period as i128)
    };
    let disagreement_holds = disagreement <= delta;

    let kept = (0..=params.keep_count)
        .map(|n| {
            let after = hist.mu_at_least(n);
            let required = (prev_histogram.mu_at_least(n) - eps).min(Rational::new(1, 10));
            KeptCount { n, after, required, holds: after >= required }
        })
        .collect();
    let shortfall = Rational::new(99, 100) * delta - Rational::new(selected as i128, 1i128 << refine);
    let report = TowerReport {
        stage: next.stage(),
        eps,
        delta,
        prev_horizon: params.prev_horizon,
        horizon: params.horizon,
        keep_count: params.keep_count,
        target_count: params.target_count,
        block: params.block,
        l: concat.ls[params.block],
        window,
        block_max,
        tower_depth,
        refine,
        selected,
        shortfall,
        target_measure,
        target_holds,
        disagreement,
        disagreement_holds,
        kept,
        orbit_count_exact: block_len % f.period_at(f.stage()) == 0,
    };
    Ok(TowerUpdate { function: next, histogram: hist, report })
}

#[derive(Clone, Debug)]
pub struct CounterexampleParams {
    pub omega: Omega,
    pub stages: usize,
    pub lambda: Rational,
    pub l0: u64,
    pub mode: BlockMode,
    pub max_depth: u32,
}

#[derive(Clone, Debug)]
pub struct DecayRow {
    pub index: usize,
    /// `N_i`.
    pub count: usize,
    /// `μ(D^{f_K}_{N_i, n_K})`.
    pub measure: Rational,
    /// `2^{-i}/10`.
    pub bound: Rational,
    pub tolerance: Rational,
    pub passes: bool,
}

#[derive(Clone, Debug)]
pub struct CounterexampleRun {
    pub function: StageFunction,
    pub concat: Concatenation,
    /// `N_1, …, N_K`.
    pub thresholds: Vec<usize>,
    /// `n_0, n_1, …, n_K`.
    pub horizons: Vec<usize>,
    pub stages: Vec<TowerReport>,
    /// Stages where no dyadic ε kept every earlier measure above its target.
    pub eps_shortfalls: Vec<usize>,
    pub decay: Vec<DecayRow>,
    pub tolerance: Rational,
    pub histogram: FluctuationHistogram,
}

impl CounterexampleRun {
    pub fn system(&self) -> Result<SampleableSystem> {
        Ok(SampleableSystem::Odometer(OdometerSystem::new(Arc::new(self.function.clone()))?))
    }

    pub fn passes(&self) -> bool {
        self.decay.iter().all(|d| d.passes) && self.stages.iter().all(TowerReport::conclusions_hold)
    }
}

fn dyadic_below(bound: &Rational) -> u32 {
    (1..=62).find(|&e| Rational::new(1, 1i128 << e) < *bound).unwrap_or(62)
}

pub fn run_counterexample(params: &CounterexampleParams) -> Result<CounterexampleRun> {
    if params.stages == 0 {
        return Err(invalid("need at least one stage"));
    }
    let thresholds: Vec<usize> = (1..=params.stages as u32).map(|k| params.omega.threshold(k)).collect::<Result<_>>()?;
    let mut concat = build_concatenated_foelner(params.lambda, params.l0, params.mode, 1)?;
    let mut f = StageFunction::zero();
    let mut horizons = vec![1];
    let (alpha, beta) = super::blocks::gap_for(params.lambda);
    let mut hist = f.fluctuation_histogram(&concat.sequence, &alpha, &beta, 1)?;
    let mut reports = Vec::new();
    let mut eps_shortfalls = Vec::new();
    let mut tolerance = Rational::zero();
    for k in 1..=params.stages {
        let target = thresholds[k - 1];
        let block = loop {
            if let Some(m) = concat.ls[..concat.blocks.len()].iter().position(|&l| l as usize >= target) {
                break m;
            }
            concat.extend()?;
        };
        let prev_horizon = horizons[k - 1];
        let horizon = prev_horizon.max(concat.horizon_through(block));
        let delta = Rational::new(1, 1i128 << k);
        let cap = (delta / Rational::from_integer(100)).min(Rational::one() - delta);
        let first = dyadic_below(&cap);
        let fits = |e: u32| {
            let eps = Rational::new(1, 1i128 << e);
            (1..k).all(|i| hist.mu_at_least(thresholds[i - 1]) - eps > Rational::new(1, 10 * (1i128 << i)))
        };
        let e = match (first..=first + 20).find(|&e| fits(e)) {
            Some(e) => e,
            None => {
                eps_shortfalls.push(k);
                first
            }
        };
        let tower = TowerParams {
            eps: Rational::new(1, 1i128 << e),
            delta,
            prev_horizon,
            keep_count: if k == 1 { 0 } else { thresholds[k - 2] },
            target_count: target,
            block,
            horizon,
            max_depth: params.max_depth,
        };
        let up = tower_update(&f, &concat, &hist, &tower)?;
        tolerance += up.report.shortfall;
        reports.push(up.report);
        f = up.function;
        hist = up.histogram;
        horizons.push(horizon);
    }
    let decay = thresholds
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let bound = Rational::new(1, 10 * (1i128 << (i + 1)));
            let measure = hist.mu_at_least(n);
            DecayRow { index: i + 1, count: n, measure, bound, tolerance, passes: measure > bound - tolerance }
        })
        .collect();
    Ok(CounterexampleRun {
        function: f,
        concat,
        thresholds,
        horizons,
        stages: reports,
        eps_shortfalls,
        decay,
        tolerance,
        histogram: hist,
    })
}
