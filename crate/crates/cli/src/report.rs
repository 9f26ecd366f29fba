//! Report files. Every file is written to a temporary name and renamed into
//! place, so a directory never holds a half-written output.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sirtail::analytic::InterferenceMode;
use sirtail::battery::{ScenarioAnalysis, TailSummary, Verdict, VerdictRow};
use sirtail::estimator::TailFit;

use crate::config::RunConfig;

pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> io::Result<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

/// Directory name for the i-th scenario of a run.
pub fn scenario_dir(i: usize, a: &ScenarioAnalysis) -> String {
    format!("{i:02}_{}_m{}", a.label.replace('/', "_"), a.scenario.fading.m)
}

#[derive(Serialize)]
struct FitRecord<'a> {
    mode: InterferenceMode,
    regime: sirtail::model::Regime,
    window: Option<(f64, f64)>,
    power: Option<&'a TailFit>,
    classify_window: Option<(f64, f64)>,
    exponential: Option<&'a TailFit>,
    class: Option<sirtail::estimator::TailClass>,
}

impl<'a> From<&'a TailSummary> for FitRecord<'a> {
    fn from(t: &'a TailSummary) -> Self {
        Self {
            mode: t.mode,
            regime: t.regime,
            window: t.window,
            power: t.power_fit.as_ref(),
            classify_window: t.classify_window,
            exponential: t.exponential_fit.as_ref(),
            class: t.class,
        }
    }
}

#[derive(Serialize)]
struct Comparison<'a> {
    scenario: &'a sirtail::model::NetworkScenario,
    label: &'a str,
    aux_moments: &'a sirtail::analytic::AuxMoments,
    tails: &'a [TailSummary],
    exact: &'a [sirtail::battery::ExactComparison],
    verdicts: Vec<&'a VerdictRow>,
}

/// Curves, fits and comparisons for one analysed scenario.
pub fn write_scenario(dir: &Path, a: &ScenarioAnalysis, rows: &[VerdictRow]) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    for (name, est) in [("ccdf_sir.csv", &a.sir), ("ccdf_sir0.csv", &a.sir0)] {
        let mut buf = Vec::new();
        est.write_csv(&mut buf)?;
        write_atomic(&dir.join(name), &buf)?;
    }
    let fits: Vec<FitRecord> = a.tails.iter().map(FitRecord::from).collect();
    write_json(&dir.join("fits.json"), &fits)?;
    let verdicts = rows
        .iter()
        .filter(|r| r.scenario == a.label && r.m == a.scenario.fading.m)
        .collect();
    write_json(
        &dir.join("comparison.json"),
        &Comparison {
            scenario: &a.scenario,
            label: &a.label,
            aux_moments: &a.aux_moments,
            tails: &a.tails,
            exact: &a.exact,
            verdicts,
        },
    )
}

pub fn write_verdicts(dir: &Path, rows: &[VerdictRow]) -> io::Result<()> {
    write_json(&dir.join("verdicts.json"), &rows)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "battery",
        "anchor",
        "scenario",
        "m",
        "mode",
        "regime",
        "expected_family",
        "expected_order",
        "fitted_class",
        "fitted_order",
        "fitted_order_se",
        "tolerance",
        "verdict",
        "evidence",
        "note",
    ])?;
    for r in rows {
        w.write_record([
            r.battery.clone(),
            r.anchor.clone(),
            r.scenario.clone(),
            r.m.to_string(),
            tag(&r.mode),
            tag(&r.regime),
            tag(&r.expected_family),
            num(Some(r.expected_order)),
            r.fitted_class.as_ref().map(tag).unwrap_or_default(),
            num(r.fitted_order),
            num(r.fitted_order_se),
            r.tolerance.to_string(),
            tag(&r.verdict),
            tag(&r.evidence),
            r.note.clone(),
        ])?;
    }
    let buf = w.into_inner().map_err(|e| io::Error::other(e.to_string()))?;
    write_atomic(&dir.join("verdicts.csv"), &buf)
}

// serde name of a unit enum variant
fn tag<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => String::new(),
    }
}

fn num(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => format!("{v:.6}"),
        _ => String::new(),
    }
}

#[derive(Serialize)]
pub struct ScenarioEntry {
    pub dir: String,
    pub label: String,
    pub seed: u64,
    pub samples: usize,
    pub window_radius: f64,
    pub far_field_mean: f64,
    pub no_interferer: usize,
    pub excluded_sir: usize,
    pub excluded_sir0: usize,
}

impl ScenarioEntry {
    pub fn new(dir: String, a: &ScenarioAnalysis) -> Self {
        Self {
            dir,
            label: a.label.clone(),
            seed: a.seed,
            samples: a.samples,
            window_radius: a.window_radius,
            far_field_mean: a.far_field_mean,
            no_interferer: a.no_interferer,
            excluded_sir: a.sir.excluded,
            excluded_sir0: a.sir0.excluded,
        }
    }
}

#[derive(Serialize)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
    pub unreachable: usize,
    pub all_passed: bool,
}

impl Tally {
    pub fn of(rows: &[VerdictRow]) -> Self {
        let count = |v: Verdict| rows.iter().filter(|r| r.verdict == v).count();
        let fail = count(Verdict::Fail);
        Self {
            pass: count(Verdict::Pass),
            fail,
            unreachable: count(Verdict::Unreachable),
            all_passed: fail == 0,
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: u64,
    samples: usize,
    rel_tol: f64,
    config: ManifestConfig<'a>,
    scenarios: &'a [ScenarioEntry],
    verdicts: Tally,
}

// the configuration minus the output location, so that runs into
// different directories stay byte-identical
#[derive(Serialize)]
struct ManifestConfig<'a> {
    scenario: &'a sirtail::model::NetworkScenario,
    theta_grid: &'a sirtail::estimator::ThetaGrid,
    battery: Option<sirtail::battery::Battery>,
    battery_params: &'a sirtail::battery::BatteryParams,
    analysis: &'a crate::config::AnalysisOptions,
}

pub fn write_manifest(
    dir: &Path,
    command: &str,
    cfg: &RunConfig,
    scenarios: &[ScenarioEntry],
    rows: &[VerdictRow],
) -> io::Result<()> {
    write_json(
        &dir.join("manifest.json"),
        &Manifest {
            tool: "sirtail",
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed: cfg.seed,
            samples: cfg.samples(),
            rel_tol: cfg.rel_tol,
            config: ManifestConfig {
                scenario: &cfg.scenario,
                theta_grid: &cfg.theta_grid,
                battery: cfg.battery,
                battery_params: &cfg.battery_params,
                analysis: &cfg.analysis,
            },
            scenarios,
            verdicts: Tally::of(rows),
        },
    )
}

/// One summary line per (value, mode, regime) of a sweep.
#[derive(Debug, Serialize)]
pub struct SweepRow {
    pub parameter: String,
    pub value: f64,
    pub mode: String,
    pub regime: String,
    pub class: String,
    pub power_exponent: String,
    pub power_exponent_se: String,
    pub power_r_squared: String,
    pub exponential_exponent: String,
    pub exponential_r_squared: String,
    pub expected_family: String,
    pub expected_order: String,
}

impl SweepRow {
    pub fn new(parameter: &str, value: f64, t: &TailSummary, expected: Option<&VerdictRow>) -> Self {
        Self {
            parameter: parameter.into(),
            value,
            mode: tag(&t.mode),
            regime: tag(&t.regime),
            class: t.class.as_ref().map(tag).unwrap_or_default(),
            power_exponent: num(t.power_fit.map(|f| f.exponent)),
            power_exponent_se: num(t.power_fit.map(|f| f.exponent_se)),
            power_r_squared: num(t.power_fit.map(|f| f.r_squared)),
            exponential_exponent: num(t.exponential_fit.map(|f| f.exponent)),
            exponential_r_squared: num(t.exponential_fit.map(|f| f.r_squared)),
            expected_family: expected.map(|r| tag(&r.expected_family)).unwrap_or_default(),
            expected_order: num(expected.map(|r| r.expected_order)),
        }
    }
}

pub fn write_sweep_summary(dir: &Path, rows: &[SweepRow]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let buf = w.into_inner().map_err(|e| io::Error::other(e.to_string()))?;
    write_atomic(&dir.join("summary.csv"), &buf)
}
