//! Exact fluctuation histograms of a [`StageFunction`] without visiting
//! every level.
//!
//! The count at a level only depends on the labels in the window the
//! averaging sets reach. Inside a relabelled block those labels are `φ_l`
//! read from some offset, so only the offset mod `2l` matters; inside an
//! untouched block they are the previous stage's labels, so the question
//! recurses one layer down. Only windows straddling two blocks of
//! different kinds are evaluated one by one.

use std::collections::HashMap;

use rayon::prelude::*;

use super::stage::StageFunction;
use crate::dynamics::{count_fluctuations, FluctuationHistogram, ENUMERATION_LIMIT};
use crate::error::{Error, Result};
use crate::foelner::FoelnerSequence;
use crate::group::RunList;
use crate::rational::Rational;

struct Evaluator<'a> {
    f: &'a StageFunction,
    sets: Vec<RunList>,
    lo: i64,
    span: u64,
    alpha: Rational,
    beta: Rational,
}

impl Evaluator<'_> {
    /// Fluctuation count of `f_k` for the window starting at `u`.
    fn count(&self, k: usize, u: u64) -> usize {
        let p = self.f.period_at(k) as i128;
        let v = (u as i128 - self.lo as i128).rem_euclid(p);
        let avg: Vec<Rational> = self
            .sets
            .iter()
            .map(|r| {
                let sum: i128 = r
                    .runs()
                    .iter()
                    .map(|&(a, b)| {
                        let s = (v + a as i128).rem_euclid(p) as u64;
                        self.f.window_sum_at(k, s, (b - a) as u64 + 1)
                    })
                    .sum();
                Rational::new(sum, r.len() as i128)
            })
            .collect();
        count_fluctuations(&avg, &self.alpha, &self.beta)
    }

    fn enumerate(&self, k: usize, a: u64, b: u64) -> FluctuationHistogram {
        (a..b)
            .into_par_iter()
            .fold(FluctuationHistogram::default, |mut h, u| {
                h.add(self.count(k, u), 1);
                h
            })
            .reduce(FluctuationHistogram::default, FluctuationHistogram::merge)
    }
}

type BlockKey = (usize, bool, bool, u64, u64);

struct Classifier<'a> {
    ev: Evaluator<'a>,
    ranges: HashMap<(usize, u64, u64), FluctuationHistogram>,
    blocks: HashMap<BlockKey, FluctuationHistogram>,
    residues: HashMap<(usize, u64), usize>,
}

fn scaled(h: &FluctuationHistogram, by: u128) -> FluctuationHistogram {
    let mut out = FluctuationHistogram::default();
    for (&k, &v) in &h.counts {
        out.add(k, v * by);
    }
    out
}

impl Classifier<'_> {
    /// Window starts `u ∈ [a, b)` within one period of `f_k`.
    fn range(&mut self, k: usize, a: u64, b: u64) -> Result<FluctuationHistogram> {
        if a >= b {
            return Ok(FluctuationHistogram::default());
        }
        if k == 0 {
            let mut h = FluctuationHistogram::default();
            h.add(self.ev.count(0, 0), (b - a) as u128);
            return Ok(h);
        }
        if let Some(h) = self.ranges.get(&(k, a, b)) {
            return Ok(h.clone());
        }
        let layer = self.ev.f.layers()[k - 1].clone();
        let block = layer.block_len();
        let h = if self.ev.span > block {
            if b - a > ENUMERATION_LIMIT {
                return Err(Error::NotEnumerable(format!(
                    "window span {} exceeds the stage-{k} block length {block} and {} levels remain",
                    self.ev.span,
                    b - a
                )));
            }
            self.ev.enumerate(k, a, b)
        } else {
            let mut h = FluctuationHistogram::default();
            for s in a / block..=(b - 1) / block {
                let base = s * block;
                let i0 = a.max(base) - base;
                let i1 = b.min(base + block) - base;
                h = h.merge(self.block(k, s, i0, i1)?);
            }
            h
        };
        debug_assert_eq!(h.total, (b - a) as u128);
        self.ranges.insert((k, a, b), h.clone());
        Ok(h)
    }

    /// Starts `i ∈ [i0, i1)` inside block `s` of layer `k`.
    fn block(&mut self, k: usize, s: u64, i0: u64, i1: u64) -> Result<FluctuationHistogram> {
        let layer = self.ev.f.layers()[k - 1].clone();
        let blocks = 1u64 << layer.refine;
        let sel = s < layer.selected;
        let sel_next = (s + 1) % blocks < layer.selected;
        let key = (k, sel, sel_next, i0, i1);
        if let Some(h) = self.blocks.get(&key) {
            return Ok(h.clone());
        }
        let block = layer.block_len();
        let split = block - self.ev.span + 1;
        let two_l = 2 * layer.l;
        let mut h = FluctuationHistogram::default();
        let (x0, x1) = (i0, i1.min(split));
        let (y0, y1) = (i0.max(split), i1);
        // Interior starts, then starts whose window runs into block s + 1.
        for (lo, hi, seamless) in [(x0, x1, true), (y0, y1, sel == sel_next && (!sel || block % two_l == 0))] {
            if lo >= hi {
                continue;
            }
            let part = if !seamless {
                self.ev.enumerate(k, s * block + lo, s * block + hi)
            } else if sel {
                self.phi_starts(k, s * block, lo, hi, two_l)
            } else {
                self.previous(k - 1, lo, hi)?
            };
            h = h.merge(part);
        }
        self.blocks.insert(key, h.clone());
        Ok(h)
    }

    /// Starts in a relabelled block: the count depends on the start mod `2l`.
    fn phi_starts(&mut self, k: usize, base: u64, lo: u64, hi: u64, two_l: u64) -> FluctuationHistogram {
        let mut h = FluctuationHistogram::default();
        let len = hi - lo;
        let reps = len.min(two_l);
        for i in lo..lo + reps {
            let rho = i % two_l;
            let mult = (hi - 1 - i) / two_l + 1;
            let c = match self.residues.get(&(k, rho)) {
                Some(&c) => c,
                None => {
                    let c = self.ev.count(k, base + i);
                    self.residues.insert((k, rho), c);
                    c
                }
            };
            h.add(c, mult as u128);
        }
        h
    }

    /// Starts `[lo, hi)` of an untouched block, read as starts of `f_{k}` mod its period.
    fn previous(&mut self, k: usize, lo: u64, hi: u64) -> Result<FluctuationHistogram> {
        let p = self.ev.f.period_at(k);
        let mut h = FluctuationHistogram::default();
        let head_end = hi.min(lo.div_ceil(p) * p);
        if lo < head_end {
            h = h.merge(self.range(k, lo % p, (head_end - 1) % p + 1)?);
        }
        if head_end >= hi {
            return Ok(h);
        }
        let full = (hi - head_end) / p;
        if full > 0 {
            let whole = self.range(k, 0, p)?;
            h = h.merge(scaled(&whole, full as u128));
        }
        let tail = (hi - head_end) % p;
        if tail > 0 {
            h = h.merge(self.range(k, 0, tail)?);
        }
        Ok(h)
    }
}

pub(crate) fn stage_histogram(
    f: &StageFunction,
    seq: &FoelnerSequence,
    alpha: &Rational,
    beta: &Rational,
    horizon: usize,
) -> Result<FluctuationHistogram> {
    let sets = crate::dynamics::runlists(seq, horizon)?;
    let lo = sets.iter().filter_map(RunList::min).min().expect("nonempty sets");
    let hi = sets.iter().filter_map(RunList::max).max().expect("nonempty sets");
    let span = (hi as i128 - lo as i128 + 1) as u64;
    let ev = Evaluator { f, sets, lo, span, alpha: *alpha, beta: *beta };
    let mut cls = Classifier { ev, ranges: HashMap::new(), blocks: HashMap::new(), residues: HashMap::new() };
    let k = f.stage();
    cls.range(k, 0, f.period_at(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counterexample::stage::Layer;
    use crate::dynamics::enumerate_levels;
    use crate::group::{FiniteSubset, GroupKind};

    fn layer(tower_depth: u32, refine: u32, selected: u64, l: u64) -> Layer {
        Layer {
            tower_depth,
            refine,
            selected,
            l,
            block: 0,
            eps: Rational::new(1, 64),
            delta: Rational::new(1, 2),
            prev_horizon: 1,
            keep_count: 0,
            target_count: 1,
        }
    }

    #[test]
    fn matches_enumeration_on_small_towers() {
        let seq = FoelnerSequence::explicit(
            GroupKind::Integers,
            vec![
                FiniteSubset::interval(0, 2),
                FiniteSubset::from_runs(RunList::from_runs([(0, 5), (9, 11)])),
                FiniteSubset::interval(0, 13),
                FiniteSubset::from_runs(RunList::from_runs([(0, 3), (7, 9), (14, 15)])),
            ],
        )
        .unwrap();
        let (a, b) = (Rational::new(2, 5), Rational::new(3, 5));
        let f1 = StageFunction::zero().push(layer(5, 2, 2, 3)).unwrap();
        let f2 = f1.push(layer(8, 2, 1, 4)).unwrap();
        let f3 = f2.push(layer(10, 1, 1, 2)).unwrap();
        for f in [f1, f2, f3] {
            let fast = stage_histogram(&f, &seq, &a, &b, 4).unwrap();
            let slow = enumerate_levels(&f, &seq, &a, &b, 4).unwrap();
            assert_eq!(fast, slow);
        }
    }
}
