//! JSON experiment configuration.

use std::fmt;
use std::path::{Path, PathBuf};

use fluctlab_core::rational::parse_rational;
use fluctlab_core::Rational;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    CheckSequence,
    Cover,
    DecayCurve,
    BoundConstants,
    Counterexample,
    ProofStep,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::CheckSequence => "check-sequence",
            ExperimentKind::Cover => "cover",
            ExperimentKind::DecayCurve => "decay-curve",
            ExperimentKind::BoundConstants => "bound-constants",
            ExperimentKind::Counterexample => "counterexample",
            ExperimentKind::ProofStep => "proof-step",
        }
    }

    pub fn is_stochastic(self) -> bool {
        matches!(self, ExperimentKind::Cover | ExperimentKind::DecayCurve)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget_seconds: Option<u64>,
    /// Output directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequence: Option<SequenceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<Gap>,
    /// Inclusive `[N_lo, N_hi]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_range: Option<[usize; 2]>,
    /// `M`: how many sets of the sequence to use.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<CheckSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cover: Option<CoverSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<BoundSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<CounterexampleSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proof_step: Option<ProofStepSection>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gap {
    pub alpha: String,
    pub beta: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SystemSpec {
    /// `f(x) = values[x]` on `ℤ/m`, `m = values.len()`.
    Cyclic { values: Vec<String> },
    /// Indicator of `points ∪ runs` on `ℤ/size`.
    CyclicIndicator {
        size: u64,
        #[serde(default)]
        points: Vec<u64>,
        #[serde(default)]
        runs: Vec<[u64; 2]>,
    },
    Rotation { theta: f64, lo: f64, hi: f64 },
    /// i.i.d. symbols over the named group; `f` reads the coordinate at the identity.
    Bernoulli { group: String, weights: Vec<f64>, values: Vec<f64> },
    /// Indicator of the given levels on the odometer of depth `depth`.
    Odometer { depth: u32, levels: Vec<u64> },
    /// A stage function written by the counterexample experiment.
    StageFunction { path: PathBuf },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SequenceSpec {
    Intervals { horizon: usize },
    Powers { base: u32, horizon: usize },
    Boxes { dim: usize, horizon: usize },
    HeisenbergBalls { horizon: usize },
    /// `copies` copies of `{0}` followed by `[0, base^k - 1]`, `k = 1..=powers`.
    PaddedPowers { copies: usize, base: u32, powers: usize },
    File { path: PathBuf },
    Blocks { lambda: String, l: u64, pairs: usize },
    /// `pairs` absent means `l_m` pairs per block.
    Concatenated {
        lambda: String,
        l0: u64,
        #[serde(default)]
        pairs: Option<usize>,
        blocks: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TemperSide {
    Left,
    Bi,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSection {
    /// Certify `c`-temperedness.
    #[serde(default)]
    pub tempered: Option<String>,
    #[serde(default = "default_side")]
    pub side: TemperSide,
    /// Certify λ-goodness.
    #[serde(default)]
    pub lambda: Option<String>,
    /// Report the least λ′-good tail index for `[λ, λ′]`.
    #[serde(default)]
    pub tail: Option<[String; 2]>,
    /// Report `|K F_n △ F_n| / |F_n|` for this set (text form).
    #[serde(default)]
    pub defect_set: Option<String>,
}

fn default_side() -> TemperSide {
    TemperSide::Left
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CenterRange {
    pub lo: i64,
    pub hi: i64,
    /// Random subset of this size; all of `[lo, hi]` when absent.
    #[serde(default)]
    pub count: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    Strict,
    Report,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverSection {
    pub eps: String,
    pub lambda: String,
    pub q: usize,
    pub centers: CenterRange,
    #[serde(default = "default_policy")]
    pub policy: Policy,
}

fn default_policy() -> Policy {
    Policy::Strict
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundSection {
    /// `S` with `0 ≤ f ≤ S`, or `‖f‖_∞` when `shifted`.
    pub sup: String,
    #[serde(default)]
    pub shifted: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum OmegaSpec {
    Geometric(String),
    Harmonic(String),
    Values(Vec<String>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleSection {
    pub omega: OmegaSpec,
    pub stages: usize,
    pub lambda: String,
    pub l0: u64,
    /// Fluctuation pairs per block; `l_m` pairs when absent.
    #[serde(default)]
    pub pairs: Option<usize>,
    #[serde(default = "default_max_depth")]
    pub max_depth: u32,
}

fn default_max_depth() -> u32 {
    62
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProofStepSection {
    /// Base point `x` on the cyclic system.
    #[serde(default)]
    pub point: u64,
    pub centers: CenterRange,
    pub q: usize,
    pub steps: usize,
    /// Overrides for the constants otherwise taken from the bound.
    #[serde(default)]
    pub eps: Option<String>,
    #[serde(default)]
    pub delta: Option<String>,
    #[serde(default)]
    pub lambda: Option<String>,
    #[serde(default)]
    pub sup: Option<String>,
}

pub fn rational(field: &str, s: &str) -> Result<Rational, CliError> {
    parse_rational(s).map_err(|e| CliError::Schema(format!("{field}: {e}")))
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Schema(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Checks that the fields the experiment needs are present and sane.
    pub fn validate(&self) -> Result<(), CliError> {
        let need = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(CliError::Schema(format!("{} needs {what}", self.experiment)))
            }
        };
        if self.experiment.is_stochastic() {
            need(self.seed.is_some(), "a seed")?;
        }
        if let Some([lo, hi]) = self.n_range {
            if lo > hi {
                return Err(CliError::Schema(format!("empty n_range [{lo}, {hi}]")));
            }
        }
        if let Some(g) = &self.gap {
            let (a, b) = (rational("gap.alpha", &g.alpha)?, rational("gap.beta", &g.beta)?);
            if a >= b {
                return Err(CliError::Schema("gap needs alpha < beta".into()));
            }
        }
        if self.samples == Some(0) {
            return Err(CliError::Schema("samples must be positive".into()));
        }
        match self.experiment {
            ExperimentKind::CheckSequence => need(self.sequence.is_some(), "a sequence"),
            ExperimentKind::Cover => {
                need(self.sequence.is_some(), "a sequence")?;
                need(self.cover.is_some(), "a cover section")
            }
            ExperimentKind::DecayCurve => {
                need(self.system.is_some(), "a system")?;
                need(self.sequence.is_some(), "a sequence")?;
                need(self.gap.is_some(), "a gap")?;
                need(self.n_range.is_some(), "an n_range")?;
                need(self.samples.is_some(), "a sample count")
            }
            ExperimentKind::BoundConstants => {
                need(self.gap.is_some(), "a gap")?;
                need(self.bound.is_some(), "a bound section")
            }
            ExperimentKind::Counterexample => need(self.counterexample.is_some(), "a counterexample section"),
            ExperimentKind::ProofStep => {
                need(self.system.is_some(), "a system")?;
                need(self.sequence.is_some(), "a sequence")?;
                need(self.gap.is_some(), "a gap")?;
                need(self.proof_step.is_some(), "a proof_step section")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_fields_rejected() {
        let e = ExperimentConfig::from_json(r#"{"experiment":"cover","sed":1}"#).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let e = ExperimentConfig::from_json(r#"{"experiment":"cover","gap":{"alpha":"0","beta":"1","x":1}}"#);
        assert!(e.is_err());
    }

    #[test]
    fn empty_n_range_is_schema_error() {
        let c = ExperimentConfig::from_json(
            r#"{"experiment":"bound-constants","n_range":[3,1],"gap":{"alpha":"1","beta":"2"},"bound":{"sup":"2"}}"#,
        )
        .unwrap();
        assert_eq!(c.validate().unwrap_err().exit_code(), 2);
    }

    #[test]
    fn stochastic_needs_seed() {
        let c = ExperimentConfig::from_json(
            r#"{"experiment":"decay-curve","system":{"kind":"cyclic","values":["0","1"]},
                "sequence":{"kind":"intervals","horizon":4},"gap":{"alpha":"0.4","beta":"0.6"},
                "n_range":[0,2],"samples":10}"#,
        )
        .unwrap();
        assert!(matches!(c.validate(), Err(CliError::Schema(_))));
    }

    #[test]
    fn tagged_specs_parse() {
        let c = ExperimentConfig::from_json(
            r#"{"experiment":"counterexample","counterexample":{"omega":{"harmonic":"50"},"stages":2,
                "lambda":"1","l0":16,"pairs":2}}"#,
        )
        .unwrap();
        assert!(c.validate().is_ok());
        assert!(matches!(c.counterexample.unwrap().omega, OmegaSpec::Harmonic(ref s) if s == "50"));
    }
}
