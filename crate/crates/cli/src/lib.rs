//! Configuration-driven experiments over `fluctlab-core`, writing
//! `report.csv` and `summary.txt`.

pub mod config;
pub mod error;
pub mod experiments;
pub mod fit;
pub mod report;
pub mod specs;

use std::path::PathBuf;

pub use config::{ExperimentConfig, ExperimentKind};
pub use error::CliError;
pub use fit::{fit_decay, DecayFit};
pub use report::{RunReport, Verdict};

use experiments::{dispatch, Budget};
use report::Rows;

/// Runs a validated config. Budget overruns and oversized constructions are errors.
pub fn run(cfg: &ExperimentConfig) -> Result<RunReport, CliError> {
    cfg.validate()?;
    let budget = Budget::new(cfg.budget_seconds);
    let mut rows = Rows::new(cfg.experiment);
    let extras = dispatch(cfg, &mut rows, &budget)?;
    budget.check("finish")?;
    Ok(RunReport {
        experiment: cfg.experiment,
        config_json: cfg.to_json(),
        rows: rows.rows,
        notes: extras.notes,
        artifacts: extras.artifacts,
        wall_time: budget.elapsed(),
    })
}

/// Command-line overrides applied on top of the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub budget_seconds: Option<u64>,
}

/// Loads, overrides, runs and writes; returns the process exit status.
pub fn execute(kind: ExperimentKind, config: Option<&std::path::Path>, o: &Overrides) -> Result<i32, CliError> {
    let mut cfg = match config {
        Some(p) => ExperimentConfig::load(p)?,
        None => return Err(CliError::Schema("--config is required".into())),
    };
    if cfg.experiment != kind {
        return Err(CliError::Schema(format!("config is for {}, not {kind}", cfg.experiment)));
    }
    if o.seed.is_some() {
        cfg.seed = o.seed;
    }
    if o.budget_seconds.is_some() {
        cfg.budget_seconds = o.budget_seconds;
    }
    if o.out.is_some() {
        cfg.output = o.out.clone();
    }
    let out = cfg.output.clone().unwrap_or_else(|| PathBuf::from("out").join(kind.name()));
    let report = run(&cfg)?;
    report.write(&out)?;
    Ok(report.exit_code())
}
