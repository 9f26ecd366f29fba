//! Empirical success probabilities, tail fits and the Monte Carlo moments
//! the analytic pre-constants need.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::engine::{substream, SimRng, Simulator, SirSample, CHUNK, DEFAULT_REL_TOL};
use crate::error::{invalid, Error, Result};
use crate::model::{NetworkScenario, PathLossKind, Regime, TailFamily, Topology};

/// Log-spaced θ grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaGrid {
    pub min: f64,
    pub max: f64,
    pub points_per_decade: u32,
}

impl Default for ThetaGrid {
    fn default() -> Self {
        Self {
            min: 1e-3,
            max: 1e3,
            points_per_decade: 10,
        }
    }
}

impl ThetaGrid {
    pub fn new(min: f64, max: f64, points_per_decade: u32) -> Result<Self> {
        let g = Self {
            min,
            max,
            points_per_decade,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min > 0.0 && self.max > self.min && self.max.is_finite()) {
            return Err(invalid(
                "theta_grid",
                format!("need 0 < min < max (got [{}, {}])", self.min, self.max),
            ));
        }
        if self.points_per_decade == 0 {
            return Err(invalid("theta_grid", "points_per_decade must be at least 1"));
        }
        Ok(())
    }

    /// Grid points; both ends are included.
    pub fn points(&self) -> Vec<f64> {
        let (a, b) = (self.min.log10(), self.max.log10());
        let k = ((b - a) * f64::from(self.points_per_decade)).round().max(1.0) as usize;
        (0..=k).map(|i| 10f64.powf(a + (b - a) * i as f64 / k as f64)).collect()
    }
}

/// Which ratio a CCDF is taken of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    Sir,
    Sir0,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcdfEstimate {
    pub thetas: Vec<f64>,
    pub p_hat: Vec<f64>,
    pub ci_low: Vec<f64>,
    pub ci_high: Vec<f64>,
    pub n: usize,
    pub excluded: usize,
    pub confidence: f64,
}

fn z_score(confidence: f64) -> Result<f64> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(invalid("confidence", format!("must lie in (0,1) (got {confidence})")));
    }
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    Ok(normal.inverse_cdf(0.5 + confidence / 2.0))
}

/// Wilson score interval for `k` successes out of `n`.
pub fn wilson_interval(k: usize, n: usize, z: f64) -> (f64, f64) {
    wilson(k as f64 / n as f64, n, z)
}

// Wilson bounds around a success fraction p
fn wilson(p: f64, n: usize, z: f64) -> (f64, f64) {
    let nf = n as f64;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = z / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    ((centre - half).max(0.0).min(p), (centre + half).min(1.0).max(p))
}

fn check_grid(thetas: &[f64]) -> Result<()> {
    if thetas.is_empty() {
        return Err(invalid("theta_grid", "empty grid"));
    }
    if thetas.iter().any(|t| !(*t > 0.0)) || thetas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("theta_grid", "must be positive and strictly increasing"));
    }
    Ok(())
}

/// P(X > θ) over the grid from raw values. NaN values are excluded and
/// counted; +∞ counts as exceeding every θ.
pub fn estimate_ccdf_values(values: &[f64], thetas: &[f64], confidence: f64) -> Result<CcdfEstimate> {
    check_grid(thetas)?;
    let z = z_score(confidence)?;
    let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
    let excluded = values.len() - v.len();
    if v.is_empty() {
        return Err(Error::EmptySamples);
    }
    v.sort_unstable_by(f64::total_cmp);
    let n = v.len();
    let mut est = CcdfEstimate {
        thetas: thetas.to_vec(),
        p_hat: Vec::with_capacity(thetas.len()),
        ci_low: Vec::with_capacity(thetas.len()),
        ci_high: Vec::with_capacity(thetas.len()),
        n,
        excluded,
        confidence,
    };
    for &t in thetas {
        let k = n - v.partition_point(|&x| x <= t);
        let (lo, hi) = wilson_interval(k, n, z);
        est.p_hat.push(k as f64 / n as f64);
        est.ci_low.push(lo);
        est.ci_high.push(hi);
    }
    Ok(est)
}

/// P_s(θ) (or P_0(θ)) from simulated samples.
pub fn estimate_ccdf(samples: &[SirSample], thetas: &[f64], which: Statistic, confidence: f64) -> Result<CcdfEstimate> {
    let values: Vec<f64> = samples
        .iter()
        .map(|s| match which {
            Statistic::Sir => s.sir,
            Statistic::Sir0 => s.sir0,
        })
        .collect();
    estimate_ccdf_values(&values, thetas, confidence)
}

impl CcdfEstimate {
    /// A noise-free estimate of a known curve, with the Wilson intervals an
    /// `n`-sample estimate would have.
    pub fn from_curve(thetas: &[f64], p: &[f64], n: usize, confidence: f64) -> Result<Self> {
        check_grid(thetas)?;
        if p.len() != thetas.len() {
            return Err(invalid("p", "length differs from the grid"));
        }
        if n == 0 {
            return Err(Error::EmptySamples);
        }
        let z = z_score(confidence)?;
        let mut est = CcdfEstimate {
            thetas: thetas.to_vec(),
            p_hat: p.to_vec(),
            ci_low: Vec::new(),
            ci_high: Vec::new(),
            n,
            excluded: 0,
            confidence,
        };
        for &q in p {
            let (lo, hi) = wilson(q, n, z);
            est.ci_low.push(lo);
            est.ci_high.push(hi);
        }
        Ok(est)
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    /// Linear interpolation of p_hat in log θ; None outside the grid.
    pub fn at(&self, theta: f64) -> Option<f64> {
        let i = self.thetas.partition_point(|&t| t < theta);
        if i < self.thetas.len() && self.thetas[i] == theta {
            return Some(self.p_hat[i]);
        }
        if i == 0 || i == self.thetas.len() {
            return None;
        }
        let (t0, t1) = (self.thetas[i - 1].ln(), self.thetas[i].ln());
        let w = (theta.ln() - t0) / (t1 - t0);
        Some(self.p_hat[i - 1] * (1.0 - w) + self.p_hat[i] * w)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "theta,p_hat,ci_low,ci_high")?;
        for i in 0..self.len() {
            writeln!(
                out,
                "{:.8e},{:.8e},{:.8e},{:.8e}",
                self.thetas[i], self.p_hat[i], self.ci_low[i], self.ci_high[i]
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub family: TailFamily,
    pub exponent: f64,
    pub exponent_se: f64,
    /// Log pre-constant: ln C for power laws, ln A for exp(-Aθ^δ).
    pub intercept: f64,
    pub window: (f64, f64),
    pub r_squared: f64,
}

/// Rule for picking a fit window automatically: the tail probability
/// (1-p for the lower tail, p for the upper) must lie in
/// [floor_count/n, ceiling].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowRule {
    pub floor_count: f64,
    pub ceiling: f64,
}

impl Default for WindowRule {
    fn default() -> Self {
        Self {
            floor_count: 10.0,
            ceiling: 0.2,
        }
    }
}

/// Fewest grid points a fit accepts.
pub const MIN_FIT_POINTS: usize = 5;

fn tail_prob(est: &CcdfEstimate, regime: Regime, i: usize) -> f64 {
    match regime {
        Regime::LowerTail => 1.0 - est.p_hat[i],
        Regime::UpperTail => est.p_hat[i],
    }
}

/// Largest contiguous run of grid points obeying `rule`. Errors when the
/// run is shorter than [`MIN_FIT_POINTS`].
pub fn auto_window(est: &CcdfEstimate, regime: Regime, rule: WindowRule) -> Result<(f64, f64)> {
    let floor = rule.floor_count / est.n as f64;
    let ok = |i: usize| {
        let q = tail_prob(est, regime, i);
        q >= floor && q <= rule.ceiling
    };
    let mut best: Option<(usize, usize)> = None;
    let mut start = None;
    for i in 0..=est.len() {
        if i < est.len() && ok(i) {
            start.get_or_insert(i);
        } else if let Some(s) = start.take() {
            if best.is_none_or(|(a, b)| i - s > b - a + 1) {
                best = Some((s, i - 1));
            }
        }
    }
    match best {
        Some((a, b)) if b + 1 - a >= MIN_FIT_POINTS => Ok((est.thetas[a], est.thetas[b])),
        _ => Err(Error::RegimeUnreachable(format!(
            "fewer than {MIN_FIT_POINTS} grid points with tail probability in [{floor:.3e}, {}] (n = {})",
            rule.ceiling, est.n
        ))),
    }
}

struct LineFit {
    slope: f64,
    slope_se: f64,
    intercept: f64,
    r_squared: f64,
}

fn weighted_line(x: &[f64], y: &[f64], w: &[f64]) -> LineFit {
    let sw: f64 = w.iter().sum();
    let mx = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let my = y.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..x.len() {
        let (dx, dy) = (x[i] - mx, y[i] - my);
        sxx += w[i] * dx * dx;
        sxy += w[i] * dx * dy;
        syy += w[i] * dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = (0..x.len())
        .map(|i| w[i] * (y[i] - intercept - slope * x[i]).powi(2))
        .sum();
    let dof = (x.len() as f64 - 2.0).max(1.0);
    let r_squared = if syy > 0.0 {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    LineFit {
        slope,
        slope_se: (ss_res / dof / sxx).sqrt(),
        intercept,
        r_squared,
    }
}

// (x, y, weight) triples for the points of `window`, transformed by `f`;
// weights are the inverse squared CI width after the transform.
fn fit_points(
    est: &CcdfEstimate,
    window: (f64, f64),
    f: impl Fn(f64) -> f64,
    regime_lower: bool,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let (mut xs, mut ys, mut ws) = (Vec::new(), Vec::new(), Vec::new());
    for i in 0..est.len() {
        let t = est.thetas[i];
        let p = est.p_hat[i];
        if t < window.0 || t > window.1 || !(p > 0.0 && p < 1.0) {
            continue;
        }
        let (q, lo, hi) = if regime_lower {
            (1.0 - p, 1.0 - est.ci_high[i], 1.0 - est.ci_low[i])
        } else {
            (p, est.ci_low[i], est.ci_high[i])
        };
        let y = f(q);
        let (a, b) = (f(lo.max(q * 1e-3)), f(hi.min(1.0 - (1.0 - q) * 1e-3)));
        let width = (b - a).abs().max(1e-12 * (1.0 + y.abs()));
        xs.push(t.ln());
        ys.push(y);
        ws.push(1.0 / (width * width));
    }
    if xs.len() < MIN_FIT_POINTS {
        return Err(Error::RegimeUnreachable(format!(
            "{} usable grid points in [{:.3e}, {:.3e}] (need {MIN_FIT_POINTS})",
            xs.len(),
            window.0,
            window.1
        )));
    }
    Ok((xs, ys, ws))
}

fn check_window(window: (f64, f64)) -> Result<()> {
    if !(window.0 > 0.0 && window.1 > window.0) {
        return Err(invalid("window", format!("need 0 < lo < hi (got {window:?})")));
    }
    Ok(())
}

/// Least squares in log-log coordinates: ln(1-p) vs ln θ for the lower
/// tail, ln p vs ln θ for the upper tail.
pub fn fit_power_tail(est: &CcdfEstimate, regime: Regime, window: (f64, f64)) -> Result<TailFit> {
    check_window(window)?;
    let lower = regime == Regime::LowerTail;
    let (x, y, w) = fit_points(est, window, f64::ln, lower)?;
    let l = weighted_line(&x, &y, &w);
    Ok(TailFit {
        family: TailFamily::PowerLaw,
        exponent: l.slope,
        exponent_se: l.slope_se,
        intercept: l.intercept,
        window,
        r_squared: l.r_squared,
    })
}

/// Least squares of ln(-ln p) vs ln θ: slope estimates δ, intercept ln A
/// for p ≈ exp(-Aθ^δ).
pub fn fit_exponential_tail(est: &CcdfEstimate, window: (f64, f64)) -> Result<TailFit> {
    check_window(window)?;
    let (x, y, w) = fit_points(est, window, |q| (-q.ln()).ln(), false)?;
    let l = weighted_line(&x, &y, &w);
    Ok(TailFit {
        family: TailFamily::Exponential,
        exponent: l.slope,
        exponent_se: l.slope_se,
        intercept: l.intercept,
        window,
        r_squared: l.r_squared,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailClass {
    PowerLaw,
    Exponential,
    Inconclusive,
}

impl From<TailFamily> for TailClass {
    fn from(f: TailFamily) -> Self {
        match f {
            TailFamily::PowerLaw => TailClass::PowerLaw,
            TailFamily::Exponential => TailClass::Exponential,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyThresholds {
    pub margin: f64,
    pub floor: f64,
}

impl Default for ClassifyThresholds {
    fn default() -> Self {
        Self {
            margin: 0.02,
            floor: 0.98,
        }
    }
}

/// Picks the upper-tail family whose fit has the clearly better r².
pub fn classify_tail(est: &CcdfEstimate, window: (f64, f64)) -> TailClass {
    classify_tail_with(est, window, ClassifyThresholds::default())
}

pub fn classify_tail_with(est: &CcdfEstimate, window: (f64, f64), th: ClassifyThresholds) -> TailClass {
    let (Ok(p), Ok(e)) = (
        fit_power_tail(est, Regime::UpperTail, window),
        fit_exponential_tail(est, window),
    ) else {
        return TailClass::Inconclusive;
    };
    if p.r_squared >= e.r_squared + th.margin && p.r_squared >= th.floor {
        TailClass::PowerLaw
    } else if e.r_squared >= p.r_squared + th.margin && e.r_squared >= th.floor {
        TailClass::Exponential
    } else {
        TailClass::Inconclusive
    }
}

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub value: f64,
    pub se: f64,
    pub n: usize,
    /// Window radius the samples were drawn on.
    pub window_radius: f64,
    pub rel_tol: f64,
    /// Relative standard error above [`UNSTABLE_REL_SE`], or the two halves
    /// of the run disagree by more than four standard errors.
    pub unstable: bool,
}

/// Relative standard error above which an estimate is flagged.
pub const UNSTABLE_REL_SE: f64 = 0.1;

/// Running mean and sum of squared deviations; merges are exact up to
/// rounding and applied in chunk order.
#[derive(Debug, Clone, Copy, Default)]
struct Accum {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Accum {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Accum) -> Accum {
        if self.n == 0.0 {
            return o;
        }
        if o.n == 0.0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Accum {
            n,
            mean: self.mean + d * o.n / n,
            m2: self.m2 + o.m2 + d * d * self.n * o.n / n,
        }
    }

    fn se(&self) -> f64 {
        if self.n < 2.0 {
            return f64::INFINITY;
        }
        (self.m2 / (self.n - 1.0) / self.n).sqrt()
    }
}

/// Mean and standard error of a slice.
pub fn mean_se(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::EmptySamples);
    }
    let mut a = Accum::default();
    values.iter().for_each(|&x| a.push(x));
    Ok((a.mean, a.se()))
}

// n draws of `draw`, chunked on rng substreams of `seed`
fn mc_moment(
    sim: &Simulator,
    n: usize,
    seed: u64,
    rel_tol: f64,
    draw: impl Fn(&Simulator, &mut SimRng, &mut Vec<f64>) -> Result<f64> + Sync,
) -> Result<MomentEstimate> {
    if n == 0 {
        return Err(invalid("n", "sample count must be at least 1"));
    }
    let chunks: Vec<Accum> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut rng = substream(seed, c as u64);
            let mut buf = Vec::new();
            let mut a = Accum::default();
            for _ in 0..CHUNK.min(n - c * CHUNK) {
                a.push(draw(sim, &mut rng, &mut buf)?);
            }
            Ok(a)
        })
        .collect::<Result<_>>()?;
    let half = chunks.len() / 2;
    let first = chunks[..half].iter().fold(Accum::default(), |a, &b| a.merge(b));
    let second = chunks[half..].iter().fold(Accum::default(), |a, &b| a.merge(b));
    let all = first.merge(second);
    let se = all.se();
    let split = half > 0 && (first.mean - second.mean).abs() > 4.0 * (first.se().powi(2) + second.se().powi(2)).sqrt();
    Ok(MomentEstimate {
        value: all.mean,
        se,
        n,
        window_radius: sim.window().radius,
        rel_tol,
        unstable: !(se <= UNSTABLE_REL_SE * all.mean.abs()) || split,
    })
}

/// E_o^!(I_∞^{-δ}): interference at a typical location of the process,
/// the location itself removed, pair-summed fades for duplicated
/// scenarios. Truncation biases I down and the moment up; the far field is
/// mean-compensated to remove most of it.
pub fn estimate_palm_inv_moment(scenario: &NetworkScenario, delta: f64, n: usize, seed: u64) -> Result<MomentEstimate> {
    estimate_palm_inv_moment_with(scenario, delta, n, seed, DEFAULT_REL_TOL)
}

pub fn estimate_palm_inv_moment_with(
    scenario: &NetworkScenario,
    delta: f64,
    n: usize,
    seed: u64,
    rel_tol: f64,
) -> Result<MomentEstimate> {
    if scenario.path_loss.kind != PathLossKind::Singular {
        return Err(invalid(
            "path_loss",
            "the Palm inverse moment is defined for singular path loss",
        ));
    }
    if !(0.0..1.0).contains(&delta) {
        return Err(invalid("delta", format!("must lie in [0,1) (got {delta})")));
    }
    let sim = Simulator::with_tolerance(scenario, rel_tol)?;
    mc_moment(&sim, n, seed, rel_tol, |s, rng, buf| {
        Ok(s.palm_interference(rng, buf)?.powf(-delta))
    })
}

/// E[I^m] of the total interference at the receiver (partner included for
/// duplicated scenarios). Bounded path loss only.
pub fn estimate_interference_moment(scenario: &NetworkScenario, m: u32, n: usize, seed: u64) -> Result<MomentEstimate> {
    estimate_interference_moment_with(scenario, m, n, seed, DEFAULT_REL_TOL)
}

pub fn estimate_interference_moment_with(
    scenario: &NetworkScenario,
    m: u32,
    n: usize,
    seed: u64,
    rel_tol: f64,
) -> Result<MomentEstimate> {
    if scenario.path_loss.kind != PathLossKind::Bounded {
        return Err(invalid(
            "path_loss",
            "interference moments may diverge under singular path loss",
        ));
    }
    if m == 0 {
        return Err(invalid("m", "must be at least 1"));
    }
    let sim = Simulator::with_tolerance(scenario, rel_tol)?;
    mc_moment(&sim, n, seed, rel_tol, |s, rng, _| {
        Ok(s.sample(rng)?.interference.powi(m as i32))
    })
}

/// E[R̄_2²], R̄_2 the distance from a typical location to its nearest
/// other location.
pub fn estimate_mean_sq_second_nearest(scenario: &NetworkScenario, n: usize, seed: u64) -> Result<MomentEstimate> {
    if scenario.topology != Topology::Cellular {
        return Err(invalid(
            "topology",
            "second-nearest distances are defined for cellular scenarios",
        ));
    }
    let sim = Simulator::with_tolerance(scenario, DEFAULT_REL_TOL)?;
    mc_moment(&sim, n, seed, DEFAULT_REL_TOL, |s, rng, buf| {
        s.palm_nearest_sq(rng, buf)
    })
}

/// Empirical lower-tail constant (1-p̂(θ))/θ^order at a grid point.
pub fn lower_tail_constant(est: &CcdfEstimate, theta: f64, order: f64) -> Option<f64> {
    est.at(theta).map(|p| (1.0 - p) / theta.powf(order))
}
