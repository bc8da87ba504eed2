use std::time::{Duration, Instant};

use fluctlab_core::counterexample::{run_counterexample, BlockMode, CounterexampleParams};
use fluctlab_core::covering::{
    growth_step, initial_selection, verify_witnesses, vitali_select, CoveringOutcome,
    GrowthParams, ScaleAssignment, VitaliOptions,
};
use fluctlab_core::dynamics::{
    estimate_curve, exact_histogram, orbit_crossings, theorem_bound, theorem_bound_shifted, Point, SampleableSystem,
};
use fluctlab_core::foelner::{folner_defect, goodness_tail_index, is_lambda_good, parse_subset, tempered_report};
use fluctlab_core::rational::{from_f64_decimal, pow, to_f64};
use fluctlab_core::{Error as CoreError, GroupKind, Rational};
use num_traits::One;

use crate::config::{rational, ExperimentConfig, ExperimentKind, Policy, TemperSide};
use crate::error::CliError;
use crate::fit::fit_decay;
use crate::report::Rows;
use crate::specs::{build_centers, build_omega, build_sequence, build_system, random_scales};

/// Wall-clock allowance checked between phases.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    start: Instant,
    limit: Option<Duration>,
}

impl Budget {
    pub fn new(seconds: Option<u64>) -> Self {
        Budget { start: Instant::now(), limit: seconds.map(Duration::from_secs) }
    }

    pub fn elapsed(&self) -> Duration {
        self.start.elapsed()
    }

    pub fn check(&self, phase: &str) -> Result<(), CliError> {
        match self.limit {
            Some(l) if self.start.elapsed() > l => {
                Err(CliError::Budget(format!("{phase}: {:.1}s over {}s", self.elapsed().as_secs_f64(), l.as_secs())))
            }
            _ => Ok(()),
        }
    }
}

/// What an experiment produced besides rows.
#[derive(Debug, Default)]
pub struct Extras {
    pub notes: Vec<String>,
    /// `(file name, contents)` written next to the report.
    pub artifacts: Vec<(String, String)>,
}

pub fn dispatch(cfg: &ExperimentConfig, rows: &mut Rows, budget: &Budget) -> Result<Extras, CliError> {
    let mut extras = Extras::default();
    match cfg.experiment {
        ExperimentKind::CheckSequence => check_sequence(cfg, rows, budget)?,
        ExperimentKind::Cover => cover(cfg, rows, &mut extras)?,
        ExperimentKind::DecayCurve => decay_curve(cfg, rows, &mut extras, budget)?,
        ExperimentKind::BoundConstants => bound_constants(cfg, rows)?,
        ExperimentKind::Counterexample => counterexample(cfg, rows, &mut extras)?,
        ExperimentKind::ProofStep => proof_step(cfg, rows, &mut extras, budget)?,
    }
    Ok(extras)
}

fn idx(n: usize) -> Option<i64> {
    Some(n as i64)
}

fn gap(cfg: &ExperimentConfig) -> Result<(Rational, Rational), CliError> {
    let g = cfg.gap.as_ref().expect("validated");
    Ok((rational("gap.alpha", &g.alpha)?, rational("gap.beta", &g.beta)?))
}

fn check_sequence(cfg: &ExperimentConfig, rows: &mut Rows, budget: &Budget) -> Result<(), CliError> {
    let seq = build_sequence(cfg.sequence.as_ref().expect("validated"))?;
    let horizon = cfg.horizon.unwrap_or(seq.horizon());
    seq.check_horizon(horizon)?;
    rows.text("sequence", None, "provenance", seq.provenance().to_string());
    rows.text("sequence", None, "group", seq.group().to_string());
    for (n, f) in seq.sets()[..horizon].iter().enumerate() {
        rows.int("size", idx(n + 1), "cardinality", f.len() as i128);
    }
    let rep = tempered_report(&seq, horizon)?;
    budget.check("temperedness")?;
    for e in &rep.entries {
        rows.exact("tempered", idx(e.n), "left_ratio", &e.left);
        rows.exact("tempered", idx(e.n), "right_ratio", &e.right);
    }
    if let Some(m) = &rep.max_left {
        rows.exact("tempered", None, "max_left", m);
    }
    if let Some(m) = &rep.max_right {
        rows.exact("tempered", None, "max_right", m);
    }
    rows.exact("tempered", None, "bi_constant", &rep.bi_constant());
    if rep.degenerate {
        rows.flag("tempered", "degenerate", "identity outside an earlier prefix union");
    }
    let Some(check) = &cfg.check else { return Ok(()) };
    if let Some(c) = &check.tempered {
        let c = rational("check.tempered", c)?;
        let (ok, name) = match check.side {
            TemperSide::Left => (rep.is_left_tempered(&c), "left_tempered"),
            TemperSide::Bi => (rep.is_bi_tempered(&c), "bi_tempered"),
        };
        rows.check("tempered", name, ok, format!("c = {c}"));
    }
    if let Some(l) = &check.lambda {
        let lambda = rational("check.lambda", l)?;
        let g = is_lambda_good(&seq, &lambda, horizon)?;
        let detail = match &g.violation {
            None => format!("lambda = {lambda}"),
            Some(v) => format!("lambda = {lambda}; {:?} violated at n = {} ({} > {})", v.condition, v.n, v.size, v.bound),
        };
        rows.check("goodness", "lambda_good", g.good, detail);
        budget.check("goodness")?;
    }
    if let Some([a, b]) = &check.tail {
        let t = goodness_tail_index(&seq, &rational("check.tail", a)?, &rational("check.tail", b)?, horizon)?;
        match t.n0 {
            Some(n0) => rows.int("tail", None, "n0", n0 as i128),
            None => rows.text("tail", None, "n0", "none"),
        };
        rows.flag("tail", "bi_tempered_precondition", t.bi_tempered.to_string());
    }
    if let Some(k) = &check.defect_set {
        let k = parse_subset(seq.group(), k).map_err(|e| CliError::Schema(format!("check.defect_set: {e}")))?;
        for n in 1..=horizon {
            rows.exact("defect", idx(n), "symdiff_ratio", &folner_defect(&seq, &k, n)?);
        }
    }
    Ok(())
}

fn cover(cfg: &ExperimentConfig, rows: &mut Rows, extras: &mut Extras) -> Result<(), CliError> {
    let sec = cfg.cover.as_ref().expect("validated");
    let seed = cfg.seed.expect("validated");
    let seq = build_sequence(cfg.sequence.as_ref().expect("validated"))?;
    if seq.group() != GroupKind::Integers {
        return Err(CliError::Schema("cover draws integer centers; the sequence must live in Z".into()));
    }
    let horizon = cfg.horizon.unwrap_or(seq.horizon());
    seq.check_horizon(horizon)?;
    let eps = rational("cover.eps", &sec.eps)?;
    let lambda = rational("cover.lambda", &sec.lambda)?;
    let centers = build_centers(&sec.centers, seed)?;
    let assignment = ScaleAssignment::new(random_scales(&centers, sec.q, horizon, seed)?, sec.q, horizon)?;
    let options = match sec.policy {
        Policy::Strict => VitaliOptions::strict(lambda),
        Policy::Report => VitaliOptions::report(lambda),
    };
    let sel = vitali_select(&seq, &centers, &assignment, &eps, &options)?;
    let seeded = |r: &mut crate::report::Row| r.seed = Some(seed);
    seeded(rows.int("selection", None, "center_count", sel.center_count as i128));
    seeded(rows.int("selection", None, "pairs", sel.pairs.len() as i128));
    seeded(rows.int("selection", None, "union_size", sel.union_size as i128));
    seeded(rows.int("selection", None, "covered_centers", sel.covered_centers as i128));
    if sel.center_count > 0 {
        let frac = Rational::new(sel.covered_centers as i128, sel.center_count as i128);
        seeded(rows.exact("selection", None, "covered_fraction", &frac));
    }
    seeded(rows.text("selection", None, "outcome", sel.outcome.to_string()));
    for note in &sel.notes {
        rows.flag("precondition", "reported", note.clone());
    }
    let ok = sel.outcome != CoveringOutcome::PostconditionFailed;
    seeded(rows.check("selection", "postcondition", ok, sel.outcome.to_string()));
    let family = sel.family(&seq)?;
    let cert = sel.certify(&seq)?;
    seeded(rows.check("selection", "flow_certificate", cert.is_feasible(), format!("eps = {eps}")));
    let witnesses_ok = verify_witnesses(&family, &sel.witnesses, &eps);
    seeded(rows.check("selection", "greedy_witnesses", witnesses_ok, format!("{} witnesses", sel.witnesses.len())));
    extras.notes.push(format!("{} centers, q = {}, horizon {horizon}", centers.len(), sec.q));
    Ok(())
}

fn decay_curve(cfg: &ExperimentConfig, rows: &mut Rows, extras: &mut Extras, budget: &Budget) -> Result<(), CliError> {
    let seed = cfg.seed.expect("validated");
    let sys = build_system(cfg.system.as_ref().expect("validated"), seed)?;
    let seq = build_sequence(cfg.sequence.as_ref().expect("validated"))?;
    let horizon = cfg.horizon.unwrap_or(seq.horizon());
    let (alpha, beta) = gap(cfg)?;
    let [lo, hi] = cfg.n_range.expect("validated");
    let ns: Vec<usize> = (lo..=hi).collect();
    let samples = cfg.samples.expect("validated");
    let reports = estimate_curve(&sys, &seq, &alpha, &beta, horizon, &ns, samples, seed)?;
    for r in &reports {
        rows.float("estimate", idx(r.n), "mu_DN", r.estimate).estimate((r.ci_low, r.ci_high), samples, seed);
    }
    budget.check("sampling")?;

    if sys.is_exact() {
        match exact_histogram(&sys, &seq, &alpha, &beta, horizon) {
            Ok(h) => {
                for &n in &ns {
                    let mu = if n == 0 { Rational::one() } else { h.mu_at_least(n) };
                    rows.exact("exact", idx(n), "mu_DN", &mu);
                }
            }
            Err(e) => extras.notes.push(format!("exact values skipped: {e}")),
        }
        budget.check("enumeration")?;
    }

    let monotone = reports.windows(2).all(|w| w[1].estimate <= w[0].estimate);
    rows.check("estimate", "non_increasing", monotone, format!("N = {lo}..{hi}"));

    // μ(D_0) = 1 says nothing about decay.
    let points: Vec<(usize, f64)> = reports.iter().filter(|r| r.n > 0).map(|r| (r.n, r.estimate)).collect();
    let fit = match fit_decay(&points) {
        Ok(f) => f,
        Err(e) => {
            extras.notes.push(format!("no decay fit: {e}"));
            return Ok(());
        }
    };
    rows.float("fit", None, "c0_hat", fit.c0);
    rows.float("fit", None, "c1_hat", fit.c1);
    rows.float("fit", None, "residual", fit.residual);
    rows.int("fit", None, "rows_used", fit.used as i128);
    let sup = from_f64_decimal(sys.bound())?;
    match theorem_bound_shifted(&alpha, &beta, &sup) {
        Ok(bc) => {
            rows.float("bound", None, "one_minus_c0", bc.c0.one_minus());
            rows.exact("bound", None, "c1", &bc.c1);
            let below = reports.iter().filter(|r| r.n > 0 && r.estimate > 0.0).all(|r| fit.at(r.n) <= bc.bound_at(r.n as u64));
            rows.check("fit", "below_bound_curve", below, "c1_hat c0_hat^N <= c1 c0^N where estimates > 0");
        }
        Err(e) => extras.notes.push(format!("no bound constants: {e}")),
    }
    Ok(())
}

fn bound_constants(cfg: &ExperimentConfig, rows: &mut Rows) -> Result<(), CliError> {
    let (alpha, beta) = gap(cfg)?;
    let sec = cfg.bound.as_ref().expect("validated");
    let sup = rational("bound.sup", &sec.sup)?;
    let bc = if sec.shifted { theorem_bound_shifted(&alpha, &beta, &sup)? } else { theorem_bound(&alpha, &beta, &sup)? };
    rows.exact("constants", None, "alpha", &bc.alpha);
    rows.exact("constants", None, "beta", &bc.beta);
    rows.exact("constants", None, "sup", &bc.bound);
    rows.exact("constants", None, "delta", &bc.delta);
    rows.exact("constants", None, "eps", &bc.eps);
    rows.int("constants", None, "grid_index", bc.grid_index as i128);
    rows.int("constants", None, "q", bc.q as i128);
    rows.exact("constants", None, "lambda", &bc.lambda);
    rows.text("constants", None, "c0", format!("({})^({})", bc.c0.base, bc.c0.exponent)).decimal =
        Some(bc.c0.to_f64());
    rows.float("constants", None, "one_minus_c0", bc.c0.one_minus());
    rows.exact("constants", None, "c1", &bc.c1);

    let one = Rational::one();
    let two = Rational::from_integer(2);
    let four = Rational::from_integer(4);
    let (d, e, s) = (bc.delta, bc.eps, bc.bound);
    let eq_gap = (bc.beta - four * e * s) * (one - e) / bc.alpha >= one + d;
    let eq_mid = (one - e) * (one + d) >= one + d / two;
    let eq_low = (one - e) * (one + d / two) >= one;
    rows.check("constants", "eps_gap_inequality", eq_gap, "(beta - 4 eps S)(1 - eps)/alpha >= 1 + delta");
    rows.check("constants", "eps_delta_inequality", eq_mid, "(1 - eps)(1 + delta) >= 1 + delta/2");
    rows.check("constants", "eps_inverse_inequality", eq_low, "1 - eps >= (1 + delta/2)^-1");
    let base = one + d / two;
    let c0_ok = bc.c0.base == base && bc.c0.exponent == Rational::new(-1, 2 * bc.q as i128);
    rows.check("constants", "c0_closed_form", c0_ok, "(1 + delta/2)^(-1/(2q))");
    rows.check("constants", "c1_closed_form", bc.c1 == pow(&base, 3), "(1 + delta/2)^3");
    if let Some([lo, hi]) = cfg.n_range {
        for n in lo..=hi {
            rows.float("bound", idx(n), "c1_c0_pow_N", bc.bound_at(n as u64));
        }
    }
    Ok(())
}

fn counterexample(cfg: &ExperimentConfig, rows: &mut Rows, extras: &mut Extras) -> Result<(), CliError> {
    let sec = cfg.counterexample.as_ref().expect("validated");
    let mode = match sec.pairs {
        Some(pairs) => BlockMode::Desk { pairs },
        None => BlockMode::Faithful,
    };
    let params = CounterexampleParams {
        omega: build_omega(&sec.omega)?,
        stages: sec.stages,
        lambda: rational("counterexample.lambda", &sec.lambda)?,
        l0: sec.l0,
        mode,
        max_depth: sec.max_depth,
    };
    let run = run_counterexample(&params)?;
    if run.concat.is_desk() {
        rows.flag("mode", "block_mode", mode.to_string());
    } else {
        rows.text("mode", None, "block_mode", mode.to_string());
    }
    for (m, l) in run.concat.ls.iter().enumerate() {
        rows.int("block", idx(m), "l", *l as i128);
    }
    for (k, n) in run.thresholds.iter().enumerate() {
        rows.int("threshold", idx(k + 1), "N_k", *n as i128);
    }
    for (k, n) in run.horizons.iter().enumerate() {
        rows.int("horizon", idx(k), "n_k", *n as i128);
    }
    for s in &run.stages {
        let k = idx(s.stage);
        rows.exact("stage", k, "eps", &s.eps);
        rows.exact("stage", k, "delta", &s.delta);
        rows.int("stage", k, "block", s.block as i128);
        rows.int("stage", k, "tower_depth", s.tower_depth as i128);
        rows.int("stage", k, "refine", s.refine as i128);
        rows.int("stage", k, "selected", s.selected as i128);
        rows.exact("stage", k, "shortfall", &s.shortfall);
        rows.exact("stage", k, "target_measure", &s.target_measure);
        rows.exact("stage", k, "disagreement_upper", &s.disagreement);
        let name = format!("stage {}", s.stage);
        rows.check(
            &name,
            "target_measure_above_delta_over_10",
            s.target_holds,
            format!("mu(D_{}) = {} vs {}", s.target_count, s.target_measure, s.delta / Rational::from_integer(10)),
        );
        rows.check(&name, "disagreement_at_most_delta", s.disagreement_holds, format!("{} <= {}", s.disagreement, s.delta));
        for kc in &s.kept {
            rows.exact("kept", idx(kc.n), &format!("mu_after_stage_{}", s.stage), &kc.after);
            rows.check(&name, &format!("kept_N{}", kc.n), kc.holds, format!("{} >= {}", kc.after, kc.required));
        }
        if !s.orbit_count_exact {
            rows.flag(&name, "orbit_count_exact", "false");
        }
    }
    rows.exact("decay", None, "tolerance", &run.tolerance);
    for d in &run.decay {
        rows.exact("decay", idx(d.index), "mu_D_Nk", &d.measure);
        rows.check(
            &format!("decay {}", d.index),
            "above_bound_minus_tolerance",
            d.passes,
            format!("mu(D_{}) = {} > {} - {}", d.count, d.measure, d.bound, d.tolerance),
        );
    }
    if !run.eps_shortfalls.is_empty() {
        rows.flag("eps", "shortfall_stages", format!("{:?}", run.eps_shortfalls));
    }
    for (count, weight) in &run.histogram.counts {
        let mu = Rational::new(*weight as i128, run.histogram.total as i128);
        rows.exact("histogram", idx(*count), "mu_exactly", &mu);
    }
    extras.artifacts.push(("stage_function.txt".into(), run.function.to_text()));
    extras.notes.push(format!("depth {} odometer, {} stages", run.function.depth_at(run.function.stage()), run.stages.len()));
    Ok(())
}

fn proof_step(cfg: &ExperimentConfig, rows: &mut Rows, extras: &mut Extras, budget: &Budget) -> Result<(), CliError> {
    let sec = cfg.proof_step.as_ref().expect("validated");
    let seed = cfg.seed.unwrap_or(0);
    let sys = build_system(cfg.system.as_ref().expect("validated"), seed)?;
    let x = match &sys {
        SampleableSystem::FiniteCyclic(_) => Point::Cyclic(sec.point),
        SampleableSystem::Odometer(_) => Point::Odometer(sec.point),
        _ => return Err(CliError::Schema("proof-step needs a cyclic or odometer system".into())),
    };
    let seq = build_sequence(cfg.sequence.as_ref().expect("validated"))?;
    let horizon = cfg.horizon.unwrap_or(seq.horizon());
    let (alpha, beta) = gap(cfg)?;
    let sup = match &sec.sup {
        Some(s) => rational("proof_step.sup", s)?,
        None => from_f64_decimal(sys.bound())?,
    };
    let base = theorem_bound(&alpha, &beta, &sup);
    let pick = |over: &Option<String>, field: &str, from: fn(&fluctlab_core::dynamics::BoundConstants) -> Rational| {
        match (over, &base) {
            (Some(s), _) => rational(field, s),
            (None, Ok(bc)) => Ok(from(bc)),
            (None, Err(e)) => Err(CliError::Schema(format!("{field} not given and no bound constants: {e}"))),
        }
    };
    let params = GrowthParams {
        alpha,
        beta,
        bound: sup,
        eps: pick(&sec.eps, "proof_step.eps", |b| b.eps)?,
        delta: pick(&sec.delta, "proof_step.delta", |b| b.delta)?,
        q: sec.q,
        lambda: pick(&sec.lambda, "proof_step.lambda", |b| b.lambda)?,
    };
    params.check().map_err(|e| CliError::Schema(e.to_string()))?;
    rows.exact("constants", None, "eps", &params.eps);
    rows.exact("constants", None, "delta", &params.delta);
    rows.exact("constants", None, "lambda", &params.lambda);
    rows.int("constants", None, "q", params.q as i128);
    if let Ok(bc) = &base {
        if (params.q as u64) < bc.q {
            rows.flag("constants", "q_below_bound", format!("q = {} < {}", params.q, bc.q));
        }
    }

    let centers = build_centers(&sec.centers, seed)?;
    let orbit = orbit_crossings(&sys, &x, &seq, &centers, horizon, &alpha, &beta)?;
    rows.int("orbit", None, "centers", centers.len() as i128);
    rows.int("orbit", None, "min_upcrossings", orbit.values().map(|c| c.ups.len()).min().unwrap_or(0) as i128);
    budget.check("orbit data")?;

    let mut current = match initial_selection(&seq, &orbit, &centers, &params) {
        Ok(s) => s,
        Err(e @ CoreError::Insufficient(_)) => {
            rows.flag("initial", "insufficient_crossings", e.to_string());
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };
    rows.int("initial", None, "pairs", current.pairs.len() as i128);
    rows.int("initial", None, "union_size", current.union_size as i128);
    let cert = current.certify(&seq)?;
    rows.check("initial", "flow_certificate", cert.is_feasible(), format!("eps = {}", params.eps));

    for k in 1..=sec.steps {
        budget.check("growth step")?;
        let out = match growth_step(&seq, &orbit, &current, &params) {
            Ok(o) => o,
            Err(e @ CoreError::Insufficient(_)) => {
                rows.flag(&format!("step {k}"), "insufficient_crossings", e.to_string());
                extras.notes.push(format!("stopped before step {k}: {e}"));
                break;
            }
            Err(e) => return Err(e.into()),
        };
        let i = idx(k);
        rows.int("step", i, "size_before", out.size_before as i128);
        rows.int("step", i, "size_intermediate", out.size_intermediate as i128);
        rows.int("step", i, "size_after", out.size_after as i128);
        if let Some(r) = out.growth_ratio() {
            rows.exact("step", i, "growth_ratio", &r);
        }
        let name = format!("step {k}");
        rows.check(&name, "within_upcrossings", out.within_upcrossings, format!("limit {}", out.upcrossing_limit));
        rows.check(&name, "eps_disjoint", out.disjoint, format!("eps = {}", params.eps));
        let target = Rational::one() + params.delta / Rational::from_integer(2);
        rows.check(&name, "grows", out.grows, format!("ratio >= {target} ({:.4})", to_f64(&target)));
        current = out.next;
    }
    Ok(())
}
