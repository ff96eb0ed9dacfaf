//! Verification reports and the `cases.csv` table.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::Result;

pub const CSV_COLUMNS: [&str; 13] = [
    "suite", "operator", "symbol", "alpha", "beta", "epsilon", "delta", "sample_id", "lhs", "rhs",
    "bound", "ratio", "pass",
];

/// Shown at the top of every report.
pub const REPORT_NOTE: &str = "Equivalences are checked over the finite operator and symbol \
catalog and a finite set of sample vectors; measured constants are lower estimates of the \
existential constants.";

/// One measured case: `lhs / rhs = ratio`, compared against `bound` when present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub suite: String,
    pub operator: String,
    pub symbol: String,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    pub sample_id: Option<usize>,
    pub lhs: f64,
    pub rhs: f64,
    pub bound: Option<f64>,
    pub ratio: f64,
    pub pass: bool,
}

impl Case {
    fn csv_record(&self) -> Vec<String> {
        let num = |v: f64| format!("{v:.12e}");
        let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
        vec![
            self.suite.clone(),
            self.operator.clone(),
            self.symbol.clone(),
            opt(self.alpha),
            opt(self.beta),
            opt(self.epsilon),
            opt(self.delta),
            self.sample_id.map(|i| i.to_string()).unwrap_or_default(),
            num(self.lhs),
            num(self.rhs),
            opt(self.bound),
            num(self.ratio),
            self.pass.to_string(),
        ]
    }
}

/// A measured constant such as `C_square`, `C_area` or `K_emp`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constant {
    pub name: String,
    pub operator: String,
    pub symbol: String,
    pub value: f64,
}

/// A case that could not be run, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skipped {
    pub operator: String,
    pub symbol: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub cases: Vec<Case>,
    pub constants: Vec<Constant>,
    pub skipped: Vec<Skipped>,
}

impl VerificationReport {
    pub fn new(suite: &str) -> Self {
        VerificationReport {
            suite: suite.to_string(),
            cases: Vec::new(),
            constants: Vec::new(),
            skipped: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> usize {
        self.cases.iter().filter(|c| !c.pass).count()
    }

    pub fn constant(&self, name: &str, operator: &str) -> Option<f64> {
        self.constants
            .iter()
            .find(|c| c.name == name && c.operator == operator)
            .map(|c| c.value)
    }
}

/// Everything written to `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub note: String,
    pub config: ExperimentConfig,
    pub passed: bool,
    pub reports: Vec<VerificationReport>,
}

impl ExperimentReport {
    pub fn new(config: ExperimentConfig, reports: Vec<VerificationReport>) -> Self {
        ExperimentReport {
            note: REPORT_NOTE.to_string(),
            passed: reports.iter().all(VerificationReport::passed),
            config,
            reports,
        }
    }

    pub fn cases(&self) -> impl Iterator<Item = &Case> {
        self.reports.iter().flat_map(|r| &r.cases)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(CSV_COLUMNS)?;
        for case in self.cases() {
            writer.write_record(case.csv_record())?;
        }
        writer.flush()?;
        Ok(())
    }

    /// Writes `report.json` and `cases.csv` into `dir`, creating it if needed.
    pub fn write_to(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(self)?)?;
        self.write_csv(std::fs::File::create(dir.join("cases.csv"))?)
    }
}
