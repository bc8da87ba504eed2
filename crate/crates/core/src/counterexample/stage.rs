use std::fmt::Write as _;

use super::blocks::{phi, phi_prefix};
use crate::dynamics::{FluctuationHistogram, PeriodicLabels};
use crate::error::{invalid, Error, Result};
use crate::foelner::FoelnerSequence;
use crate::rational::{format_exact, parse_rational, Rational};

/// One relabelling: a tower of height `2^tower_depth` whose base is split
/// into `2^refine` sub-cylinders; the first `selected` of them carry
/// `φ_l(i)` on level `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layer {
    pub tower_depth: u32,
    pub refine: u32,
    pub selected: u64,
    pub l: u64,
    pub block: usize,
    pub eps: Rational,
    pub delta: Rational,
    /// `n′`: horizon of the previous stage.
    pub prev_horizon: usize,
    /// `N′`.
    pub keep_count: usize,
    /// `N″`.
    pub target_count: usize,
}

impl Layer {
    pub fn depth(&self) -> u32 {
        self.tower_depth + self.refine
    }

    pub fn block_len(&self) -> u64 {
        1u64 << self.tower_depth
    }
}

/// `f_k` on the dyadic odometer: `f_0 ≡ 0`, each layer relabels part of the previous one.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StageFunction {
    layers: Vec<Layer>,
    totals: Vec<i128>,
}

impl StageFunction {
    pub fn zero() -> Self {
        StageFunction { layers: Vec::new(), totals: vec![0] }
    }

    pub fn stage(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Depth of `f_k`.
    pub fn depth_at(&self, k: usize) -> u32 {
        if k == 0 {
            0
        } else {
            self.layers[k - 1].depth()
        }
    }

    pub fn period_at(&self, k: usize) -> u64 {
        1u64 << self.depth_at(k)
    }

    /// Appends a layer; its tower must be at least as deep as the current function.
    pub fn push(&self, layer: Layer) -> Result<StageFunction> {
        if layer.tower_depth < self.depth_at(self.stage()) {
            return Err(invalid("tower depth must not be below the current depth"));
        }
        if layer.depth() > 62 {
            return Err(Error::Budget(format!("depth {} exceeds 62", layer.depth())));
        }
        if layer.selected > 1u64 << layer.refine || layer.l == 0 {
            return Err(invalid("selected cylinders exceed 2^refine or l = 0"));
        }
        let mut next = self.clone();
        next.layers.push(layer);
        let k = next.layers.len();
        let p = next.period_at(k);
        let total = next.prefix_at(k, p);
        next.totals.push(total);
        Ok(next)
    }

    /// The function of an earlier stage.
    pub fn truncate(&self, k: usize) -> StageFunction {
        StageFunction { layers: self.layers[..k].to_vec(), totals: self.totals[..=k].to_vec() }
    }

    pub fn label_at(&self, k: usize, level: u64) -> u8 {
        if k == 0 {
            return 0;
        }
        let layer = &self.layers[k - 1];
        let v = level % self.period_at(k);
        let s = v >> layer.tower_depth;
        if s < layer.selected {
            phi(layer.l, v & (layer.block_len() - 1))
        } else {
            self.label_at(k - 1, v)
        }
    }

    /// `Σ_{v < x} f_k(v)` for `0 ≤ x ≤ 2^{depth_k}`.
    pub fn prefix_at(&self, k: usize, x: u64) -> i128 {
        if k == 0 {
            return 0;
        }
        let layer = &self.layers[k - 1];
        let b = layer.block_len();
        let prev = self.period_at(k - 1);
        let prev_total = self.totals[k - 1];
        let full = x / b;
        let rem = x % b;
        let sel = full.min(layer.selected);
        let mut sum = sel as i128 * phi_prefix(layer.l, b) as i128
            + (full - sel) as i128 * (b / prev) as i128 * prev_total;
        if rem > 0 {
            sum += if full < layer.selected {
                phi_prefix(layer.l, rem) as i128
            } else {
                (rem / prev) as i128 * prev_total + self.prefix_at(k - 1, rem % prev)
            };
        }
        sum
    }

    /// `Σ_{t < len} f_k((start + t) mod 2^{depth_k})`.
    pub fn window_sum_at(&self, k: usize, start: u64, len: u64) -> i128 {
        let p = self.period_at(k);
        let total = self.totals[k];
        let start = start % p;
        let full = (len / p) as i128;
        let end = start + len % p;
        let partial = if end <= p {
            self.prefix_at(k, end) - self.prefix_at(k, start)
        } else {
            total - self.prefix_at(k, start) + self.prefix_at(k, end - p)
        };
        full * total + partial
    }

    /// Measure of `⋃_i T^i B′` in the top layer.
    pub fn relabelled_measure(&self) -> Rational {
        match self.layers.last() {
            None => Rational::from_integer(0),
            Some(l) => Rational::new(l.selected as i128, 1i128 << l.refine),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# stage-function\n");
        let _ = writeln!(out, "# stages: {}", self.stage());
        for l in &self.layers {
            let _ = writeln!(
                out,
                "layer tower_depth={} refine={} selected={} l={} block={} eps={} delta={} prev_horizon={} keep={} target={}",
                l.tower_depth,
                l.refine,
                l.selected,
                l.l,
                l.block,
                format_exact(&l.eps),
                format_exact(&l.delta),
                l.prev_horizon,
                l.keep_count,
                l.target_count
            );
        }
        out
    }

    pub fn parse(text: &str) -> Result<StageFunction> {
        let mut f = StageFunction::zero();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Parse { line: i + 1, msg };
            let rest = line.strip_prefix("layer ").ok_or_else(|| err("expected 'layer'".into()))?;
            let mut fields = std::collections::BTreeMap::new();
            for tok in rest.split_whitespace() {
                let (k, v) = tok.split_once('=').ok_or_else(|| err(format!("bad field {tok:?}")))?;
                fields.insert(k, v);
            }
            let get = |k: &str| fields.get(k).copied().ok_or_else(|| err(format!("missing {k}")));
            let num = |k: &str| -> Result<u64> { get(k)?.parse().map_err(|_| err(format!("bad {k}"))) };
            let layer = Layer {
                tower_depth: num("tower_depth")? as u32,
                refine: num("refine")? as u32,
                selected: num("selected")?,
                l: num("l")?,
                block: num("block")? as usize,
                eps: parse_rational(get("eps")?).map_err(|e| err(e.to_string()))?,
                delta: parse_rational(get("delta")?).map_err(|e| err(e.to_string()))?,
                prev_horizon: num("prev_horizon")? as usize,
                keep_count: num("keep")? as usize,
                target_count: num("target")? as usize,
            };
            f = f.push(layer).map_err(|e| err(e.to_string()))?;
        }
        Ok(f)
    }
}

impl PeriodicLabels for StageFunction {
    fn depth(&self) -> u32 {
        self.depth_at(self.stage())
    }

    fn label(&self, level: u64) -> i128 {
        self.label_at(self.stage(), level) as i128
    }

    fn window_sum(&self, start: u64, len: u64) -> i128 {
        self.window_sum_at(self.stage(), start, len)
    }

    fn fluctuation_histogram(
        &self,
        seq: &FoelnerSequence,
        alpha: &Rational,
        beta: &Rational,
        horizon: usize,
    ) -> Result<FluctuationHistogram> {
        super::histogram::stage_histogram(self, seq, alpha, beta, horizon)
    }
}
