use num_traits::One;

use super::sequence::FoelnerSequence;
use super::temper::{overflow_sizes, ratio, tempered_report};
use crate::error::{invalid, Result};
use crate::group::FiniteSubset;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Thinning {
    /// Selected 1-based indices, increasing.
    pub indices: Vec<usize>,
    /// Position in `indices` where each started stage begins.
    pub stage_starts: Vec<usize>,
    /// Every stage received its full quota before the horizon ran out.
    pub complete: bool,
    /// Independent recheck: the tail from each stage start is `c_k`-bi-tempered.
    pub certified: bool,
}

/// Greedy forward selection of a subsequence whose tail from stage `k`
/// onward is `c_k`-bi-tempered, taking `stage_length` sets per stage.
pub fn thin_strongly_tempered(
    seq: &FoelnerSequence,
    schedule: &[Rational],
    stage_length: usize,
    horizon: usize,
) -> Result<Thinning> {
    seq.check_horizon(horizon)?;
    if schedule.is_empty() || stage_length == 0 {
        return Err(invalid("thinning needs a nonempty schedule and a positive stage length"));
    }
    if schedule.iter().any(|c| *c <= Rational::one()) {
        return Err(invalid("schedule values must exceed 1"));
    }
    if schedule.windows(2).any(|w| w[0] <= w[1]) {
        return Err(invalid("schedule must decrease strictly"));
    }

    let mut indices = Vec::new();
    let mut stage_starts = Vec::new();
    // Union of the selected sets since each stage start.
    let mut unions: Vec<FiniteSubset> = Vec::new();
    let mut stage = 0;
    let mut in_stage = 0;
    for n in 1..=horizon {
        if stage == schedule.len() {
            break;
        }
        let f = seq.get(n)?;
        let mut ok = true;
        for (j, u) in unions.iter().enumerate() {
            let (l, r) = overflow_sizes(u, f)?;
            let c = &schedule[j];
            if ratio(l, f.len()) > *c || ratio(r, f.len()) > *c {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        if in_stage == 0 {
            stage_starts.push(indices.len());
            unions.push(f.clone());
            for u in unions.iter_mut().rev().skip(1) {
                *u = u.union(f)?;
            }
        } else {
            for u in unions.iter_mut() {
                *u = u.union(f)?;
            }
        }
        indices.push(n);
        in_stage += 1;
        if in_stage == stage_length {
            stage += 1;
            in_stage = 0;
        }
    }
    let complete = stage == schedule.len();
    let certified = recheck(seq, &indices, &stage_starts, schedule)?;
    Ok(Thinning { indices, stage_starts, complete, certified })
}

fn recheck(seq: &FoelnerSequence, indices: &[usize], starts: &[usize], schedule: &[Rational]) -> Result<bool> {
    for (k, &s) in starts.iter().enumerate() {
        let tail = seq.select(&indices[s..])?;
        let report = tempered_report(&tail, tail.horizon())?;
        if !report.is_bi_tempered(&schedule[k]) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foelner::sequence::BuiltinKind;

    #[test]
    fn already_tempered_keeps_everything() {
        let s = FoelnerSequence::builtin(BuiltinKind::Powers { base: 4 }, 6).unwrap();
        let t = thin_strongly_tempered(&s, &[Rational::from_integer(2)], 6, 6).unwrap();
        assert_eq!(t.indices, vec![1, 2, 3, 4, 5, 6]);
        assert!(t.complete && t.certified);
    }

    #[test]
    fn tight_constant_on_short_horizon_is_partial() {
        let s = FoelnerSequence::builtin(BuiltinKind::Intervals, 3).unwrap();
        let t = thin_strongly_tempered(&s, &[Rational::new(10001, 10000)], 3, 3).unwrap();
        assert!(!t.complete);
        assert!(t.certified);
    }

    #[test]
    fn bad_schedules_rejected() {
        let s = FoelnerSequence::builtin(BuiltinKind::Intervals, 3).unwrap();
        assert!(thin_strongly_tempered(&s, &[Rational::one()], 1, 3).is_err());
        let inc = [Rational::new(3, 2), Rational::new(7, 4)];
        assert!(thin_strongly_tempered(&s, &inc, 1, 3).is_err());
    }
}
