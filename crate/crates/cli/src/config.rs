//! Run configuration: a TOML file, then command-line overrides.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sirtail::battery::{AnalysisConfig, Battery, BatteryParams, Tolerances};
use sirtail::estimator::{ClassifyThresholds, ThetaGrid, WindowRule};
use sirtail::model::{FadingModel, Multiplicity, NetworkScenario, PathLossModel, Topology};

pub const SINGLE_RUN_SAMPLES: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Scenario for single runs and sweeps; batteries build their own.
    pub scenario: NetworkScenario,
    /// Defaults to 10^6 for a single scenario and 4 x 10^6 for a battery.
    pub samples: Option<usize>,
    pub seed: u64,
    pub theta_grid: ThetaGrid,
    pub rel_tol: f64,
    pub outputs: Outputs,
    pub battery: Option<Battery>,
    pub battery_params: BatteryParams,
    pub analysis: AnalysisOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    pub dir: PathBuf,
}

impl Default for Outputs {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("sirtail-out"),
        }
    }
}

/// Estimation and verdict settings not covered by the top-level keys.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisOptions {
    pub confidence: f64,
    pub aux_samples: usize,
    /// Window for tail-order fits.
    pub window_rule: WindowRule,
    /// Window for the power-law versus exponential comparison.
    pub classify_rule: WindowRule,
    pub thresholds: ClassifyThresholds,
    pub tolerances: Tolerances,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        let a = AnalysisConfig::default();
        Self {
            confidence: a.confidence,
            aux_samples: a.aux_samples,
            window_rule: a.window_rule,
            classify_rule: a.classify_rule,
            thresholds: a.thresholds,
            tolerances: a.tolerances,
        }
    }
}

pub fn default_scenario() -> NetworkScenario {
    NetworkScenario::new(
        Topology::AdHoc,
        Multiplicity::Simple,
        PathLossModel::singular(4.0).expect("valid"),
        FadingModel::RAYLEIGH,
    )
}

impl Default for RunConfig {
    fn default() -> Self {
        let a = AnalysisConfig::default();
        Self {
            scenario: default_scenario(),
            samples: None,
            seed: a.seed,
            theta_grid: a.theta_grid,
            rel_tol: a.rel_tol,
            outputs: Outputs::default(),
            battery: None,
            battery_params: BatteryParams::default(),
            analysis: AnalysisOptions::default(),
        }
    }
}

#[derive(Debug)]
pub enum ConfigError {
    Read(PathBuf, std::io::Error),
    Parse(PathBuf, String),
    Invalid(Vec<String>),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Read(p, e) => write!(f, "cannot read {}: {e}", p.display()),
            ConfigError::Parse(p, e) => write!(f, "cannot parse {}: {e}", p.display()),
            ConfigError::Invalid(v) => {
                write!(
                    f,
                    "invalid configuration ({} problem{}):",
                    v.len(),
                    if v.len() == 1 { "" } else { "s" }
                )?;
                for x in v {
                    write!(f, "\n  - {x}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for ConfigError {}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|e| ConfigError::Read(path.to_path_buf(), e))?;
        Self::parse(&text).map_err(|e| ConfigError::Parse(path.to_path_buf(), e))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn samples(&self) -> usize {
        match (self.samples, self.battery) {
            (Some(n), _) => n,
            (None, Some(_)) => AnalysisConfig::default().samples,
            (None, None) => SINGLE_RUN_SAMPLES,
        }
    }

    pub fn analysis_config(&self) -> AnalysisConfig {
        let o = &self.analysis;
        AnalysisConfig {
            samples: self.samples(),
            seed: self.seed,
            theta_grid: self.theta_grid,
            rel_tol: self.rel_tol,
            confidence: o.confidence,
            window_rule: o.window_rule,
            classify_rule: o.classify_rule,
            thresholds: o.thresholds,
            tolerances: o.tolerances,
            aux_samples: o.aux_samples,
        }
    }

    /// Every problem with the configuration, including an unwritable
    /// output directory.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.battery.is_none() {
            out.extend(self.scenario.violations().into_iter().map(|v| format!("scenario: {v}")));
        } else {
            if self.battery_params.ms.is_empty() {
                out.push("battery_params.ms: at least one fading parameter is needed".into());
            }
            if let Err(e) = self.battery_params.matrix_scenarios() {
                out.push(format!("battery_params: {e}"));
            }
        }
        out.extend(self.analysis_config().violations());
        if let Err(e) = check_writable(&self.outputs.dir) {
            out.push(format!("outputs.dir {}: {e}", self.outputs.dir.display()));
        }
        out
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(v))
        }
    }
}

fn check_writable(dir: &Path) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let probe = dir.join(".sirtail-write-probe");
    fs::write(&probe, b"")?;
    fs::remove_file(probe)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_through_toml() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::parse(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn empty_file_gives_defaults() {
        let c = RunConfig::parse("").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.samples(), SINGLE_RUN_SAMPLES);
        assert_eq!(c.scenario.label(), "simple/ad_hoc/singular");
    }

    #[test]
    fn battery_default_samples() {
        let c = RunConfig::parse("battery = \"nearest_matrix\"").unwrap();
        assert_eq!(c.battery, Some(Battery::NearestMatrix));
        assert_eq!(c.samples(), 4_000_000);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::parse("sampels = 3").is_err());
    }

    #[test]
    fn every_violation_listed() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = RunConfig::default();
        c.outputs.dir = dir.path().to_path_buf();
        c.samples = Some(0);
        c.rel_tol = 2.0;
        c.scenario.lambda = -1.0;
        c.scenario.path_loss.alpha = 1.5;
        let v = c.violations();
        assert_eq!(v.len(), 4, "{v:?}");
        assert!(v.iter().any(|s| s.contains("lambda")));
        assert!(v.iter().any(|s| s.contains("samples")));
    }

    #[test]
    fn scenario_parses_from_toml() {
        let c = RunConfig::parse(
            r#"
            [scenario]
            topology = "cellular"
            multiplicity = "duplicated"
            lambda = 2.0
            process = { kind = "matern_ii", hardcore_radius = 0.1 }
            path_loss = { kind = "bounded", alpha = 3.0, epsilon = 0.5 }
            fading = { m = 2.0 }
            "#,
        )
        .unwrap();
        assert_eq!(c.scenario.label(), "duplicated/cellular/bounded");
        assert_eq!(c.scenario.path_loss.epsilon, 0.5);
        assert!(c.scenario.violations().is_empty());
    }
}
