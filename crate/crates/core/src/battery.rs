//! Scenario analyses and batteries: Monte Carlo curves, tail fits and
//! verdicts against the tail-law matrix.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::analytic::{
    ps_exact_adhoc_bounded_ppp_rayleigh, ps_exact_adhoc_singular_ppp_nakagami2, ps_exact_adhoc_singular_ppp_rayleigh,
    ps_exact_dup_adhoc_bounded_ppp_rayleigh, ps_exact_dup_adhoc_singular_ppp_rayleigh, table_order, tail_law,
    AsymptoteRequest, AuxMoments, InterferenceMode, PalmMoment, PalmVariant,
};
use crate::engine::{Simulator, DEFAULT_REL_TOL};
use crate::error::{invalid, Error, Result};
use crate::estimator::{
    auto_window, classify_tail_with, estimate_ccdf_values, estimate_interference_moment_with,
    estimate_mean_sq_second_nearest, estimate_palm_inv_moment_with, fit_exponential_tail, fit_power_tail,
    wilson_interval, CcdfEstimate, ClassifyThresholds, TailClass, TailFit, ThetaGrid, WindowRule,
};
use crate::model::{
    FadingModel, LawStatus, Multiplicity, NetworkScenario, PathLossKind, PathLossModel, ProcessKind, Regime,
    TailFamily, TailLaw, Topology,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Battery {
    /// Every cell of the total-interference matrix.
    TailMatrix,
    /// Every cell of the nearest-interferer matrix.
    NearestMatrix,
    /// Matched scenario pairs for the three support conjectures.
    Conjectures,
    /// Cellular networks where only the serving location is duplicated.
    EdgeUser,
}

impl Battery {
    pub fn name(&self) -> &'static str {
        match self {
            Battery::TailMatrix => "tail_matrix",
            Battery::NearestMatrix => "nearest_matrix",
            Battery::Conjectures => "conjectures",
            Battery::EdgeUser => "edge_user",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Allowed |fitted - symbolic| tail order.
    pub order: f64,
    /// Fraction of grid points whose exact value must fall inside the CI.
    pub exact_coverage: f64,
    /// Confidence level of the CIs used for exact-curve agreement.
    pub exact_confidence: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            order: 0.1,
            exact_coverage: 0.95,
            exact_confidence: 0.997,
        }
    }
}

/// Everything an analysis needs besides the scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalysisConfig {
    pub samples: usize,
    pub seed: u64,
    pub theta_grid: ThetaGrid,
    pub rel_tol: f64,
    /// Confidence level of the reported CCDF intervals.
    pub confidence: f64,
    /// Window for power-law order fits. Deep by default: at the default
    /// ceiling of 0.2 several m = 2 tails are still far from their
    /// asymptotic slope.
    pub window_rule: WindowRule,
    /// Broader window on which the two upper-tail families are compared;
    /// curvature only shows over a wide θ range.
    pub classify_rule: WindowRule,
    pub thresholds: ClassifyThresholds,
    pub tolerances: Tolerances,
    /// Samples for each auxiliary moment a pre-constant needs.
    pub aux_samples: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            samples: 4_000_000,
            seed: 1,
            theta_grid: ThetaGrid {
                min: 1e-13,
                max: 1e11,
                points_per_decade: 10,
            },
            rel_tol: DEFAULT_REL_TOL,
            confidence: 0.95,
            window_rule: WindowRule {
                ceiling: 0.005,
                ..WindowRule::default()
            },
            classify_rule: WindowRule {
                ceiling: 0.3,
                ..WindowRule::default()
            },
            thresholds: ClassifyThresholds::default(),
            tolerances: Tolerances::default(),
            aux_samples: 20_000,
        }
    }
}

impl AnalysisConfig {
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.samples == 0 {
            out.push("samples must be at least 1".into());
        }
        if let Err(e) = self.theta_grid.validate() {
            out.push(e.to_string());
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            out.push(format!("rel_tol must lie in (0,1) (got {})", self.rel_tol));
        }
        for (name, c) in [
            ("confidence", self.confidence),
            ("tolerances.exact_confidence", self.tolerances.exact_confidence),
        ] {
            if !(c > 0.0 && c < 1.0) {
                out.push(format!("{name} must lie in (0,1) (got {c})"));
            }
        }
        if !(self.tolerances.order > 0.0) {
            out.push("tolerances.order must be positive".into());
        }
        for (name, r) in [("window_rule", self.window_rule), ("classify_rule", self.classify_rule)] {
            if !(r.ceiling > 0.0 && r.ceiling < 1.0) {
                out.push(format!("{name}.ceiling must lie in (0,1) (got {})", r.ceiling));
            }
            if !(r.floor_count > 0.0) {
                out.push(format!("{name}.floor_count must be positive (got {})", r.floor_count));
            }
        }
        if self.aux_samples == 0 {
            out.push("aux_samples must be at least 1".into());
        }
        out
    }
}

/// Parameters shared by every scenario of a battery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BatteryParams {
    pub lambda: f64,
    pub link_distance: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub ms: Vec<f64>,
}

impl Default for BatteryParams {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            link_distance: 1.0,
            alpha: 4.0,
            epsilon: 1.0,
            ms: vec![1.0, 2.0],
        }
    }
}

impl BatteryParams {
    pub fn scenario(&self, top: Topology, mult: Multiplicity, pl: PathLossKind, m: f64) -> Result<NetworkScenario> {
        let path_loss = match pl {
            PathLossKind::Singular => PathLossModel::singular(self.alpha)?,
            PathLossKind::Bounded => PathLossModel::bounded(self.alpha, self.epsilon)?,
        };
        let sc = NetworkScenario::new(top, mult, path_loss, FadingModel::nakagami(m)?)
            .with_lambda(self.lambda)
            .with_link_distance(self.link_distance);
        sc.validate()?;
        Ok(sc)
    }

    /// The eight model rows, for every configured m.
    pub fn matrix_scenarios(&self) -> Result<Vec<NetworkScenario>> {
        let mut out = Vec::new();
        for &m in &self.ms {
            for mult in [Multiplicity::Simple, Multiplicity::Duplicated] {
                for top in [Topology::AdHoc, Topology::Cellular] {
                    for pl in [PathLossKind::Singular, PathLossKind::Bounded] {
                        out.push(self.scenario(top, mult, pl, m)?);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Fits and the symbolic law for one (mode, regime) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailSummary {
    pub mode: InterferenceMode,
    pub regime: Regime,
    pub law: Option<TailLaw>,
    pub law_error: Option<String>,
    /// Window of the power-law fit.
    pub window: Option<(f64, f64)>,
    pub power_fit: Option<TailFit>,
    /// Window of the exponential fit and the classification.
    pub classify_window: Option<(f64, f64)>,
    pub exponential_fit: Option<TailFit>,
    /// Upper tail only.
    pub class: Option<TailClass>,
    /// exp(fitted intercept) / analytic pre-constant, power laws only.
    pub pre_constant_ratio: Option<f64>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactPoint {
    pub theta: f64,
    pub exact: f64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub inside: bool,
}

/// Closed-form curve against the Monte Carlo estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactComparison {
    pub formula: String,
    pub mode: InterferenceMode,
    pub confidence: f64,
    /// Grid points with exact tail probability at least floor_count/n.
    pub points: Vec<ExactPoint>,
    pub coverage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioAnalysis {
    pub label: String,
    pub scenario: NetworkScenario,
    pub samples: usize,
    pub seed: u64,
    pub window_radius: f64,
    pub far_field_mean: f64,
    /// Samples with no interferer in the window.
    pub no_interferer: usize,
    pub aux_moments: AuxMoments,
    pub sir: CcdfEstimate,
    pub sir0: CcdfEstimate,
    pub tails: Vec<TailSummary>,
    pub exact: Vec<ExactComparison>,
}

impl ScenarioAnalysis {
    pub fn tail(&self, mode: InterferenceMode, regime: Regime) -> &TailSummary {
        self.tails
            .iter()
            .find(|t| t.mode == mode && t.regime == regime)
            .expect("every mode and regime is summarized")
    }

    pub fn ccdf(&self, mode: InterferenceMode) -> &CcdfEstimate {
        match mode {
            InterferenceMode::TotalInterference => &self.sir,
            InterferenceMode::NearestOnly => &self.sir0,
        }
    }
}

type Curve = Box<dyn Fn(f64) -> Result<f64>>;

/// Closed forms available for the scenario and mode.
pub fn exact_curves(sc: &NetworkScenario, mode: InterferenceMode) -> Vec<(String, Curve)> {
    let (lam, b, a, eps) = (sc.lambda, sc.link_distance, sc.path_loss.alpha, sc.path_loss.epsilon);
    let ppp = sc.process == ProcessKind::Ppp;
    let m = sc.fading.m;
    let mut out: Vec<(String, Curve)> = Vec::new();
    match mode {
        InterferenceMode::TotalInterference if ppp && sc.topology == Topology::AdHoc => {
            match (sc.multiplicity, sc.path_loss.kind) {
                (Multiplicity::Simple, PathLossKind::Singular) if m == 1.0 => out.push((
                    "exp(-pi lambda b^2 theta^delta Gamma(1+delta) Gamma(1-delta))".into(),
                    Box::new(move |t| ps_exact_adhoc_singular_ppp_rayleigh(t, lam, b, a)),
                )),
                (Multiplicity::Simple, PathLossKind::Singular) if m == 2.0 => out.push((
                    "(1 + delta c) exp(-c), Nakagami m = 2".into(),
                    Box::new(move |t| ps_exact_adhoc_singular_ppp_nakagami2(t, lam, b, a)),
                )),
                (Multiplicity::Simple, PathLossKind::Bounded) if m == 1.0 => out.push((
                    "Laplace transform of I at (eps + b^alpha) theta".into(),
                    Box::new(move |t| ps_exact_adhoc_bounded_ppp_rayleigh(t, lam, b, a, eps)),
                )),
                (Multiplicity::Duplicated, PathLossKind::Singular) if m == 1.0 => out.push((
                    "(1+theta)^-1 exp(-(pi lambda/2) theta^delta b^2 E[(ha+hb)^delta] Gamma(1-delta))".into(),
                    Box::new(move |t| ps_exact_dup_adhoc_singular_ppp_rayleigh(t, lam, b, a, None)),
                )),
                (Multiplicity::Duplicated, PathLossKind::Bounded) if m == 1.0 => out.push((
                    "duplicated bounded closed form".into(),
                    Box::new(move |t| ps_exact_dup_adhoc_bounded_ppp_rayleigh(t, lam, b, a, eps)),
                )),
                _ => {}
            }
        }
        // the nearest interferer is the serving partner: SIR_0 = h_0/h_1
        InterferenceMode::NearestOnly
            if sc.topology == Topology::Cellular && sc.multiplicity == Multiplicity::Duplicated =>
        {
            out.push((
                "P(h0/h1 > theta) = 1 - I_{theta/(1+theta)}(m, m)".into(),
                Box::new(move |t| Ok(1.0 - beta_reg(m, m, t / (1.0 + t)))),
            ));
        }
        _ => {}
    }
    out
}

fn aux_seed(seed: u64, k: u64) -> u64 {
    seed ^ 0x5DEE_CE66_D1CE_B00D_u64.wrapping_mul(k + 1)
}

// the symbolic law, estimating any auxiliary moment it asks for
fn law_with_aux(
    req: AsymptoteRequest,
    aux: &mut AuxMoments,
    cfg: &AnalysisConfig,
) -> std::result::Result<TailLaw, String> {
    let sc = req.scenario;
    for _ in 0..4 {
        match tail_law(&req.with_aux(*aux)) {
            Err(Error::MissingAuxMoment { estimator }) => {
                let r = match estimator {
                    "estimate_palm_inv_moment" => estimate_palm_inv_moment_with(
                        &sc,
                        sc.delta(),
                        cfg.aux_samples,
                        aux_seed(cfg.seed, 0),
                        cfg.rel_tol,
                    )
                    .map(|e| {
                        aux.palm_inv_moment = Some(PalmMoment {
                            value: e.value,
                            variant: PalmVariant::for_scenario(&sc),
                        })
                    }),
                    "estimate_interference_moment" => match sc.fading.integer_m() {
                        Some(m) => estimate_interference_moment_with(
                            &sc,
                            m,
                            cfg.aux_samples,
                            aux_seed(cfg.seed, 1),
                            cfg.rel_tol,
                        )
                        .map(|e| aux.interference_m_moment = Some(e.value)),
                        None => Err(invalid("m", "the interference moment needs an integer m")),
                    },
                    "estimate_mean_sq_second_nearest" => {
                        estimate_mean_sq_second_nearest(&sc, cfg.aux_samples, aux_seed(cfg.seed, 2))
                            .map(|e| aux.mean_sq_second_nearest = Some(e.value))
                    }
                    other => Err(invalid("estimator", format!("unknown estimator {other}"))),
                };
                r.map_err(|e| e.to_string())?;
            }
            other => return other.map_err(|e| e.to_string()),
        }
    }
    Err("auxiliary moments did not resolve".into())
}

fn summarize(
    est: &CcdfEstimate,
    mode: InterferenceMode,
    regime: Regime,
    law: std::result::Result<TailLaw, String>,
    cfg: &AnalysisConfig,
) -> TailSummary {
    let mut s = TailSummary {
        mode,
        regime,
        law: law.as_ref().ok().copied(),
        law_error: law.err(),
        window: None,
        power_fit: None,
        classify_window: None,
        exponential_fit: None,
        class: None,
        pre_constant_ratio: None,
        note: None,
    };
    match auto_window(est, regime, cfg.window_rule).and_then(|w| {
        s.window = Some(w);
        fit_power_tail(est, regime, w)
    }) {
        Ok(f) => s.power_fit = Some(f),
        Err(e) => s.note = Some(e.to_string()),
    }
    if regime == Regime::UpperTail {
        if let Ok(w) = auto_window(est, regime, cfg.classify_rule) {
            s.classify_window = Some(w);
            s.exponential_fit = fit_exponential_tail(est, w).ok();
            s.class = Some(classify_tail_with(est, w, cfg.thresholds));
        }
    }
    if let (Some(f), Some(l)) = (s.power_fit, s.law) {
        if let (TailFamily::PowerLaw, Some(c)) = (l.family, l.pre_constant) {
            s.pre_constant_ratio = Some(f.intercept.exp() / c);
        }
    }
    s
}

fn compare_exact(
    est: &CcdfEstimate,
    formula: String,
    f: &Curve,
    mode: InterferenceMode,
    cfg: &AnalysisConfig,
) -> Result<ExactComparison> {
    let conf = cfg.tolerances.exact_confidence;
    let z = statrs::distribution::ContinuousCDF::inverse_cdf(
        &statrs::distribution::Normal::new(0.0, 1.0).expect("standard normal"),
        0.5 + conf / 2.0,
    );
    let floor = cfg.window_rule.floor_count / est.n as f64;
    let mut points = Vec::new();
    for (i, &t) in est.thetas.iter().enumerate() {
        let exact = f(t)?;
        if exact < floor || 1.0 - exact < floor {
            continue;
        }
        let k = (est.p_hat[i] * est.n as f64).round() as usize;
        let (lo, hi) = wilson_interval(k, est.n, z);
        points.push(ExactPoint {
            theta: t,
            exact,
            p_hat: est.p_hat[i],
            ci_low: lo,
            ci_high: hi,
            inside: lo <= exact && exact <= hi,
        });
    }
    let coverage = if points.is_empty() {
        0.0
    } else {
        points.iter().filter(|p| p.inside).count() as f64 / points.len() as f64
    };
    Ok(ExactComparison {
        formula,
        mode,
        confidence: conf,
        points,
        coverage,
    })
}

/// Simulates one scenario and summarizes both tails for both modes.
pub fn analyze(scenario: &NetworkScenario, cfg: &AnalysisConfig) -> Result<ScenarioAnalysis> {
    let v = cfg.violations();
    if !v.is_empty() {
        return Err(invalid("config", v.join("; ")));
    }
    let sim = Simulator::with_tolerance(scenario, cfg.rel_tol)?;
    let draws = sim.batch_map(cfg.samples, cfg.seed, |s| (s.sir, s.sir0, s.no_interferer))?;
    let grid = cfg.theta_grid.points();
    let sir: Vec<f64> = draws.iter().map(|d| d.0).collect();
    let est_sir = estimate_ccdf_values(&sir, &grid, cfg.confidence)?;
    drop(sir);
    let sir0: Vec<f64> = draws.iter().map(|d| d.1).collect();
    let est_sir0 = estimate_ccdf_values(&sir0, &grid, cfg.confidence)?;
    drop(sir0);
    let no_interferer = draws.iter().filter(|d| d.2).count();
    drop(draws);

    let mut aux = AuxMoments::default();
    let mut tails = Vec::new();
    let mut exact = Vec::new();
    for mode in [InterferenceMode::TotalInterference, InterferenceMode::NearestOnly] {
        let est = match mode {
            InterferenceMode::TotalInterference => &est_sir,
            InterferenceMode::NearestOnly => &est_sir0,
        };
        for regime in [Regime::LowerTail, Regime::UpperTail] {
            let law = law_with_aux(AsymptoteRequest::new(*scenario, regime, mode), &mut aux, cfg);
            tails.push(summarize(est, mode, regime, law, cfg));
        }
        for (formula, f) in exact_curves(scenario, mode) {
            exact.push(compare_exact(est, formula, &f, mode, cfg)?);
        }
    }
    Ok(ScenarioAnalysis {
        label: scenario.label(),
        scenario: *scenario,
        samples: cfg.samples,
        seed: cfg.seed,
        window_radius: sim.window().radius,
        far_field_mean: sim.far_field(),
        no_interferer,
        aux_moments: aux,
        sir: est_sir,
        sir0: est_sir0,
        tails,
        exact,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The regime needs more samples than were drawn; no fit attempted.
    Unreachable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evidence {
    Proven,
    Conjectured,
    Empirical,
}

impl From<LawStatus> for Evidence {
    fn from(s: LawStatus) -> Self {
        match s {
            LawStatus::Proven => Evidence::Proven,
            LawStatus::Conjectured => Evidence::Conjectured,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictRow {
    pub battery: String,
    /// The claim under test.
    pub anchor: String,
    pub scenario: String,
    pub m: f64,
    pub mode: InterferenceMode,
    pub regime: Regime,
    pub expected_family: TailFamily,
    /// Positive order as in the matrix; NaN when the row only checks a
    /// family.
    pub expected_order: f64,
    pub fitted_class: Option<TailClass>,
    /// Positive fitted order (sign convention of the matrix).
    pub fitted_order: Option<f64>,
    pub fitted_order_se: Option<f64>,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub evidence: Evidence,
    pub note: String,
}

impl VerdictRow {
    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

fn matrix_name(mode: InterferenceMode) -> &'static str {
    match mode {
        InterferenceMode::TotalInterference => "total-interference tail matrix",
        InterferenceMode::NearestOnly => "nearest-interferer tail matrix",
    }
}

fn regime_name(regime: Regime) -> &'static str {
    match regime {
        Regime::LowerTail => "lower tail",
        Regime::UpperTail => "upper tail",
    }
}

/// Checks one matrix cell: lower tails by fitted order, upper tails by
/// family and, for power laws, order.
pub fn cell_row(a: &ScenarioAnalysis, battery: &str, mode: InterferenceMode, regime: Regime, tol: f64) -> VerdictRow {
    let sc = &a.scenario;
    let (family, order) = table_order(
        sc.topology,
        sc.multiplicity,
        sc.path_loss.kind,
        regime,
        mode,
        sc.fading.m,
        sc.delta(),
    );
    let t = a.tail(mode, regime);
    let evidence = t.law.map_or(Evidence::Conjectured, |l| l.status.into());
    let mut row = VerdictRow {
        battery: battery.into(),
        anchor: format!(
            "{} | {} | {}: {} of order {}",
            matrix_name(mode),
            a.label,
            regime_name(regime),
            family_name(family),
            order
        ),
        scenario: a.label.clone(),
        m: sc.fading.m,
        mode,
        regime,
        expected_family: family,
        expected_order: order,
        fitted_class: t.class,
        fitted_order: t.power_fit.map(|f| f.exponent.abs()),
        fitted_order_se: t.power_fit.map(|f| f.exponent_se),
        tolerance: tol,
        verdict: Verdict::Fail,
        evidence,
        note: t.note.clone().unwrap_or_default(),
    };
    let Some(fit) = t.power_fit else {
        // only rare-event lower tails may be out of reach
        if regime == Regime::LowerTail && order >= 2.0 {
            row.verdict = Verdict::Unreachable;
            row.note = format!("reachable window too short at n = {}: {}", a.samples, row.note);
        }
        return row;
    };
    let fitted = match regime {
        Regime::LowerTail => fit.exponent,
        Regime::UpperTail => -fit.exponent,
    };
    let order_ok = (fitted - order).abs() <= tol;
    let pass = match (regime, family) {
        (Regime::LowerTail, _) => order_ok,
        (Regime::UpperTail, TailFamily::PowerLaw) => t.class == Some(TailClass::PowerLaw) && order_ok,
        (Regime::UpperTail, TailFamily::Exponential) => t.class == Some(TailClass::Exponential),
    };
    if family == TailFamily::Exponential && regime == Regime::UpperTail {
        row.fitted_order = t.exponential_fit.map(|f| f.exponent);
        row.fitted_order_se = t.exponential_fit.map(|f| f.exponent_se);
        row.anchor = format!(
            "{} | {} | upper tail: exponential, exp(-c theta^{})",
            matrix_name(mode),
            a.label,
            order
        );
    }
    row.verdict = if pass { Verdict::Pass } else { Verdict::Fail };
    row
}

fn family_name(f: TailFamily) -> &'static str {
    match f {
        TailFamily::PowerLaw => "power law",
        TailFamily::Exponential => "exponential",
    }
}

/// Rows for closed-form agreement of one analysis.
pub fn exact_rows(a: &ScenarioAnalysis, battery: &str, tol: &Tolerances) -> Vec<VerdictRow> {
    a.exact
        .iter()
        .map(|e| VerdictRow {
            battery: battery.into(),
            anchor: format!("closed form {} | {}", e.formula, a.label),
            scenario: a.label.clone(),
            m: a.scenario.fading.m,
            mode: e.mode,
            regime: Regime::UpperTail,
            expected_family: TailFamily::Exponential,
            expected_order: f64::NAN,
            fitted_class: None,
            fitted_order: None,
            fitted_order_se: None,
            tolerance: tol.exact_coverage,
            verdict: if e.coverage >= tol.exact_coverage && !e.points.is_empty() {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            evidence: Evidence::Proven,
            note: format!(
                "{} of {} grid points inside the {} interval",
                e.points.iter().filter(|p| p.inside).count(),
                e.points.len(),
                e.confidence
            ),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatteryReport {
    pub battery: Battery,
    pub params: BatteryParams,
    pub analyses: Vec<ScenarioAnalysis>,
    pub rows: Vec<VerdictRow>,
}

impl BatteryReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(VerdictRow::passed)
    }
}

fn scenario_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_add(i as u64)
}

fn run_all(scenarios: &[NetworkScenario], cfg: &AnalysisConfig) -> Result<Vec<ScenarioAnalysis>> {
    scenarios
        .iter()
        .enumerate()
        .map(|(i, sc)| {
            analyze(
                sc,
                &AnalysisConfig {
                    seed: scenario_seed(cfg.seed, i),
                    ..*cfg
                },
            )
        })
        .collect()
}

/// The rows a matrix battery derives from its analyses.
pub fn matrix_rows(analyses: &[ScenarioAnalysis], battery: Battery, cfg: &AnalysisConfig) -> Vec<VerdictRow> {
    let mode = match battery {
        Battery::NearestMatrix => InterferenceMode::NearestOnly,
        _ => InterferenceMode::TotalInterference,
    };
    let mut rows = Vec::new();
    for a in analyses {
        for regime in [Regime::LowerTail, Regime::UpperTail] {
            rows.push(cell_row(a, battery.name(), mode, regime, cfg.tolerances.order));
        }
    }
    rows
}

/// Every cell of both matrices plus the closed-form checks for one
/// stand-alone scenario.
pub fn scenario_rows(a: &ScenarioAnalysis, battery: &str, cfg: &AnalysisConfig) -> Vec<VerdictRow> {
    let mut rows = Vec::new();
    for mode in [InterferenceMode::TotalInterference, InterferenceMode::NearestOnly] {
        for regime in [Regime::LowerTail, Regime::UpperTail] {
            rows.push(cell_row(a, battery, mode, regime, cfg.tolerances.order));
        }
    }
    rows.extend(exact_rows(a, battery, &cfg.tolerances));
    rows
}

/// One conjecture checked on a scenario where its support condition holds
/// and one where it fails.
#[derive(Debug, Clone, Copy)]
struct ConjecturePair {
    name: &'static str,
    condition: &'static str,
    holds: NetworkScenario,
    fails: NetworkScenario,
    regime: Regime,
}

fn conjecture_pairs(p: &BatteryParams) -> Result<Vec<ConjecturePair>> {
    use Multiplicity::Simple;
    use PathLossKind::*;
    use Topology::*;
    let ad_sing = p.scenario(AdHoc, Simple, Singular, 1.0)?;
    let cell_sing = p.scenario(Cellular, Simple, Singular, 1.0)?;
    let cell_bound = p.scenario(Cellular, Simple, Bounded, 1.0)?;
    Ok(vec![
        ConjecturePair {
            name: "lower heavy tail",
            condition: "0 in supp(l(x0)/l(y)) <=> 1 - P_s = Theta(theta^delta)",
            holds: ad_sing,
            fails: cell_sing,
            regime: Regime::LowerTail,
        },
        ConjecturePair {
            name: "heavy tail",
            condition: "0 in supp(1/l(x0)) <=> P_s = Theta(theta^-delta)",
            holds: cell_sing,
            fails: cell_bound,
            regime: Regime::UpperTail,
        },
        ConjecturePair {
            name: "exponential tail",
            condition: "Rayleigh: 0 notin supp(1/l(x0)) <=> P_s = exp(-Theta(theta^delta))",
            holds: ad_sing,
            fails: cell_sing,
            regime: Regime::UpperTail,
        },
    ])
}

// whether the fitted behaviour matches the conjectured right-hand side
fn conjecture_rhs(name: &str, t: &TailSummary, delta: f64, tol: f64) -> Option<bool> {
    match name {
        "lower heavy tail" => t.power_fit.map(|f| (f.exponent - delta).abs() <= tol),
        "heavy tail" => t
            .power_fit
            .map(|f| t.class == Some(TailClass::PowerLaw) && (-f.exponent - delta).abs() <= tol),
        _ => t.class.map(|c| c == TailClass::Exponential),
    }
}

fn run_conjectures(p: &BatteryParams, cfg: &AnalysisConfig) -> Result<(Vec<ScenarioAnalysis>, Vec<VerdictRow>)> {
    let pairs = conjecture_pairs(p)?;
    // each distinct scenario is simulated once
    let mut scenarios: Vec<NetworkScenario> = Vec::new();
    for c in &pairs {
        for sc in [c.holds, c.fails] {
            if !scenarios.contains(&sc) {
                scenarios.push(sc);
            }
        }
    }
    let analyses = run_all(&scenarios, cfg)?;
    let find = |sc: &NetworkScenario| analyses.iter().find(|a| a.scenario == *sc).expect("simulated");
    let mut rows = Vec::new();
    for c in &pairs {
        for (sc, holds) in [(c.holds, true), (c.fails, false)] {
            let a = find(&sc);
            let t = a.tail(InterferenceMode::TotalInterference, c.regime);
            let rhs = conjecture_rhs(c.name, t, sc.delta(), cfg.tolerances.order);
            let verdict = match rhs {
                Some(r) if r == holds => Verdict::Pass,
                Some(_) => Verdict::Fail,
                None => Verdict::Unreachable,
            };
            rows.push(VerdictRow {
                battery: Battery::Conjectures.name().into(),
                anchor: format!(
                    "conjecture {}: {} | condition {}",
                    c.name,
                    c.condition,
                    if holds { "holds" } else { "fails" }
                ),
                scenario: a.label.clone(),
                m: sc.fading.m,
                mode: InterferenceMode::TotalInterference,
                regime: c.regime,
                expected_family: if c.name == "exponential tail" {
                    TailFamily::Exponential
                } else {
                    TailFamily::PowerLaw
                },
                expected_order: sc.delta(),
                fitted_class: t.class,
                fitted_order: t.power_fit.map(|f| f.exponent.abs()),
                fitted_order_se: t.power_fit.map(|f| f.exponent_se),
                tolerance: cfg.tolerances.order,
                verdict,
                evidence: Evidence::Empirical,
                note: format!(
                    "right-hand side {} expected to {}",
                    c.name,
                    if holds { "hold" } else { "fail" }
                ),
            });
        }
    }
    Ok((analyses, rows))
}

/// Runs a battery over the scenarios it defines.
pub fn run_battery(battery: Battery, params: &BatteryParams, cfg: &AnalysisConfig) -> Result<BatteryReport> {
    if params.ms.is_empty() {
        return Err(invalid("ms", "at least one fading parameter is needed"));
    }
    let (analyses, rows) = match battery {
        Battery::TailMatrix | Battery::NearestMatrix => {
            let analyses = run_all(&params.matrix_scenarios()?, cfg)?;
            let mut rows = matrix_rows(&analyses, battery, cfg);
            let mode = match battery {
                Battery::NearestMatrix => InterferenceMode::NearestOnly,
                _ => InterferenceMode::TotalInterference,
            };
            for a in &analyses {
                rows.extend(
                    exact_rows(a, battery.name(), &cfg.tolerances)
                        .into_iter()
                        .filter(|r| r.mode == mode),
                );
            }
            (analyses, rows)
        }
        Battery::Conjectures => run_conjectures(params, cfg)?,
        Battery::EdgeUser => {
            let mut scenarios = Vec::new();
            for &m in &params.ms {
                for pl in [PathLossKind::Singular, PathLossKind::Bounded] {
                    scenarios.push(params.scenario(Topology::Cellular, Multiplicity::EdgeUser, pl, m)?);
                }
            }
            let analyses = run_all(&scenarios, cfg)?;
            let rows = analyses
                .iter()
                .flat_map(|a| {
                    [Regime::LowerTail, Regime::UpperTail].map(|r| VerdictRow {
                        evidence: Evidence::Empirical,
                        ..cell_row(
                            a,
                            Battery::EdgeUser.name(),
                            InterferenceMode::TotalInterference,
                            r,
                            cfg.tolerances.order,
                        )
                    })
                })
                .collect();
            (analyses, rows)
        }
    };
    Ok(BatteryReport {
        battery,
        params: params.clone(),
        analyses,
        rows,
    })
}
