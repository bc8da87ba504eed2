//! Report rows, `report.csv` and `summary.txt`.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Duration;

use fluctlab_core::rational::{format_exact, to_f64};
use fluctlab_core::Rational;

use crate::config::ExperimentKind;
use crate::error::CliError;

/// Bumped whenever the column set changes.
pub const CSV_VERSION: u32 = 1;

pub const COLUMNS: [&str; 12] = [
    "experiment", "item", "index", "quantity", "exact", "value", "decimal", "ci_low", "ci_high", "samples", "seed",
    "verdict",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// Reported but not certified.
    Flag,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub experiment: &'static str,
    pub item: String,
    pub index: Option<i64>,
    pub quantity: String,
    pub exact: bool,
    pub value: String,
    pub decimal: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub verdict: Option<Verdict>,
}

/// Accumulates rows for one experiment.
#[derive(Debug)]
pub struct Rows {
    experiment: ExperimentKind,
    pub rows: Vec<Row>,
}

impl Rows {
    pub fn new(experiment: ExperimentKind) -> Self {
        Rows { experiment, rows: Vec::new() }
    }

    fn base(&self, item: &str, index: Option<i64>, quantity: &str) -> Row {
        Row {
            experiment: self.experiment.name(),
            item: item.to_string(),
            index,
            quantity: quantity.to_string(),
            exact: false,
            value: String::new(),
            decimal: None,
            ci_low: None,
            ci_high: None,
            samples: None,
            seed: None,
            verdict: None,
        }
    }

    pub fn exact(&mut self, item: &str, index: Option<i64>, quantity: &str, v: &Rational) -> &mut Row {
        let mut r = self.base(item, index, quantity);
        r.exact = true;
        r.value = format_exact(v);
        r.decimal = Some(to_f64(v));
        self.rows.push(r);
        self.rows.last_mut().unwrap()
    }

    pub fn int(&mut self, item: &str, index: Option<i64>, quantity: &str, v: i128) -> &mut Row {
        self.exact(item, index, quantity, &Rational::from_integer(v))
    }

    pub fn float(&mut self, item: &str, index: Option<i64>, quantity: &str, v: f64) -> &mut Row {
        let mut r = self.base(item, index, quantity);
        r.value = v.to_string();
        r.decimal = Some(v);
        self.rows.push(r);
        self.rows.last_mut().unwrap()
    }

    pub fn text(&mut self, item: &str, index: Option<i64>, quantity: &str, v: impl Into<String>) -> &mut Row {
        let mut r = self.base(item, index, quantity);
        r.exact = true;
        r.value = v.into();
        self.rows.push(r);
        self.rows.last_mut().unwrap()
    }

    /// A certified check; `detail` goes into the value column.
    pub fn check(&mut self, item: &str, quantity: &str, ok: bool, detail: impl Into<String>) -> &mut Row {
        let v = if ok { Verdict::Pass } else { Verdict::Fail };
        let r = self.text(item, None, quantity, detail);
        r.verdict = Some(v);
        r
    }

    pub fn flag(&mut self, item: &str, quantity: &str, detail: impl Into<String>) -> &mut Row {
        let r = self.text(item, None, quantity, detail);
        r.verdict = Some(Verdict::Flag);
        r
    }
}

impl Row {
    pub fn estimate(&mut self, ci: (f64, f64), samples: u64, seed: u64) -> &mut Self {
        self.ci_low = Some(ci.0);
        self.ci_high = Some(ci.1);
        self.samples = Some(samples);
        self.seed = Some(seed);
        self
    }
}

#[derive(Debug)]
pub struct RunReport {
    pub experiment: ExperimentKind,
    pub config_json: String,
    pub rows: Vec<Row>,
    pub notes: Vec<String>,
    pub artifacts: Vec<(String, String)>,
    pub wall_time: Duration,
}

impl RunReport {
    pub fn failures(&self) -> Vec<&Row> {
        self.rows.iter().filter(|r| r.verdict == Some(Verdict::Fail)).collect()
    }

    pub fn passed(&self) -> bool {
        self.failures().is_empty()
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(COLUMNS).map_err(csv_err)?;
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                r.experiment.to_string(),
                r.item.clone(),
                r.index.map(|i| i.to_string()).unwrap_or_default(),
                r.quantity.clone(),
                r.exact.to_string(),
                r.value.clone(),
                opt(r.decimal),
                opt(r.ci_low),
                opt(r.ci_high),
                r.samples.map(|s| s.to_string()).unwrap_or_default(),
                r.seed.map(|s| s.to_string()).unwrap_or_default(),
                r.verdict
                    .map(|v| match v {
                        Verdict::Pass => "pass",
                        Verdict::Fail => "fail",
                        Verdict::Flag => "flag",
                    })
                    .unwrap_or_default()
                    .to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "experiment: {}", self.experiment);
        let _ = writeln!(s, "config: {}", self.config_json);
        let _ = writeln!(s, "csv columns (v{CSV_VERSION}): {}", COLUMNS.join(","));
        let _ = writeln!(s, "rows: {}", self.rows.len());
        let checks: Vec<&Row> = self.rows.iter().filter(|r| r.verdict.is_some()).collect();
        if !checks.is_empty() {
            let _ = writeln!(s, "\nchecks:");
            for r in checks {
                let tag = match r.verdict {
                    Some(Verdict::Pass) => "PASS",
                    Some(Verdict::Fail) => "FAIL",
                    _ => "FLAG",
                };
                let _ = writeln!(s, "  {tag} {} {}: {}", r.item, r.quantity, r.value);
            }
        }
        if !self.notes.is_empty() {
            let _ = writeln!(s, "\nnotes:");
            for n in &self.notes {
                let _ = writeln!(s, "  - {n}");
            }
        }
        let _ = writeln!(s, "\nwall time: {:.3}s", self.wall_time.as_secs_f64());
        let _ = writeln!(s, "status: {}", if self.passed() { "all certified checks pass" } else { "certified failure" });
        s
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.csv"), self.csv()?)?;
        std::fs::write(dir.join("summary.txt"), self.summary())?;
        for (name, body) in &self.artifacts {
            std::fs::write(dir.join(name), body)?;
        }
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}
