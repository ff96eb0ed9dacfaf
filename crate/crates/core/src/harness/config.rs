//! Experiment configuration.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::catalog::DEFAULT_SEED;
use crate::error::{Error, Result};

pub const SUITES: [&str; 4] = ["square-equivalence", "area-equivalence", "hinfty", "truncation"];

/// Contents of a `verify` config file; omitted fields take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub suites: Vec<String>,
    /// Operator descriptors; `"catalog"` expands to the default catalog.
    pub operators: Vec<String>,
    /// The first symbol is compared against the others.
    pub symbols: Vec<String>,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    /// Bound asserted on equivalence ratios and their reciprocals.
    pub c_max: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            suites: SUITES.iter().map(|s| s.to_string()).collect(),
            operators: vec!["catalog".into()],
            symbols: vec!["Gk:1".into(), "Gk:2".into(), "phi".into()],
            alphas: vec![PI / 12.0, PI / 6.0, PI / 4.0],
            betas: vec![PI / 6.0],
            epsilons: vec![0.01, 0.1, 1.0],
            samples: 50,
            seed: DEFAULT_SEED,
            tol: 1e-8,
            c_max: None,
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::ConfigParse(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::ConfigParse(msg));
        if let Some(s) = self.suites.iter().find(|s| !SUITES.contains(&s.as_str())) {
            return bad(format!("unknown suite {s:?}; expected one of {SUITES:?}"));
        }
        if self.symbols.is_empty() {
            return bad("at least one symbol is required".into());
        }
        if self.samples == 0 {
            return bad("samples must be positive".into());
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return bad(format!("tol {} not in (0, 1)", self.tol));
        }
        if let Some(c) = self.c_max {
            if !(c >= 1.0) {
                return bad(format!("c_max {c} must be at least 1"));
            }
        }
        let angles = self.alphas.iter().chain(&self.betas);
        if let Some(a) = angles.into_iter().find(|a| !(**a > 0.0 && **a < PI)) {
            return bad(format!("angle {a} not in (0, pi)"));
        }
        if let Some(e) = self.epsilons.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return bad(format!("epsilon {e} must be positive"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_partial_configs() {
        let c = ExperimentConfig::parse(r#"{"suites": ["truncation"], "samples": 3}"#).unwrap();
        assert_eq!(c.suites, vec!["truncation"]);
        assert_eq!(c.samples, 3);
        assert_eq!(c.seed, DEFAULT_SEED);
        assert_eq!(c.epsilons, vec![0.01, 0.1, 1.0]);
        assert_eq!(ExperimentConfig::parse("{}").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn malformed_configs_are_parse_errors() {
        for text in [
            "not json",
            r#"{"suites": ["nope"]}"#,
            r#"{"samples": 0}"#,
            r#"{"tol": 2}"#,
            r#"{"unknown_field": 1}"#,
            r#"{"alphas": [-1]}"#,
        ] {
            assert!(matches!(ExperimentConfig::parse(text), Err(Error::ConfigParse(_))), "{text}");
        }
    }
}
