//! Monte Carlo SIR samples for every scenario of the model matrix.
//!
//! The receiver sits at the origin of a disk window. Only distances to the
//! origin enter the SIR, so samplers work on squared distances of distinct
//! locations; fades are drawn per unit of multiplicity and summed per
//! location before the path loss is applied.

use std::f64::consts::PI;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{FadeSampler, Multiplicity, NetworkScenario, PathLossKind, ProcessKind, Topology};
use crate::process::{nearest, poisson_count, sample_reduced_palm, sample_support, PointPattern, Window};

/// Relative truncation tolerance used when none is configured.
pub const DEFAULT_REL_TOL: f64 = 1e-2;

/// Largest admissible window, in units of the mean inter-point spacing.
pub const MAX_WINDOW_SPACINGS: f64 = 1e4;

/// Samples per rng substream in [`batch_simulate`].
pub const CHUNK: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SirSample {
    pub signal: f64,
    pub interference: f64,
    pub nearest_interference: f64,
    pub sir: f64,
    pub sir0: f64,
    pub serving_distance: f64,
    /// No interferer inside the window; `sir0` is infinite.
    pub no_interferer: bool,
}

impl SirSample {
    pub const CSV_HEADER: &'static str = "signal,interference,nearest_interference,sir,sir0,serving_distance";

    pub fn write_csv_row<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(
            out,
            "{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e}",
            self.signal, self.interference, self.nearest_interference, self.sir, self.sir0, self.serving_distance
        )
    }
}

pub fn write_samples_csv<W: Write>(samples: &[SirSample], mut out: W) -> io::Result<()> {
    writeln!(out, "{}", SirSample::CSV_HEADER)?;
    for s in samples {
        s.write_csv_row(&mut out)?;
    }
    Ok(())
}

/// Treatment of the interferers beyond the window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FarField {
    /// Drop them.
    Truncate,
    /// Replace them by their mean (Campbell), which removes the truncation
    /// bias and leaves only its fluctuation.
    #[default]
    MeanCompensated,
}

/// Window radius W such that the mean interference beyond W is at most
/// `rel_tol` times the mean interference from outside the unit reference
/// radius: W = ρ·rel_tol^{-1/(α-2)}, with ρ = λ_s^{-1/2} the mean spacing
/// of distinct locations.
pub fn required_window_radius(scenario: &NetworkScenario, rel_tol: f64) -> Result<f64> {
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(invalid("rel_tol", format!("must lie in (0,1) (got {rel_tol})")));
    }
    scenario.path_loss.validate()?;
    let lam = scenario.support_intensity();
    if !(lam > 0.0 && lam.is_finite()) {
        return Err(invalid("lambda", "must be positive"));
    }
    let spacing = 1.0 / lam.sqrt();
    let w = spacing * rel_tol.powf(-1.0 / (scenario.path_loss.alpha - 2.0));
    let limit = spacing * MAX_WINDOW_SPACINGS;
    if !(w <= limit) {
        return Err(Error::WindowTooLarge { radius: w, limit });
    }
    Ok(w)
}

/// Mean interference from beyond radius `w`: 2πλ·E[h]·∫_w^∞ ℓ(r) r dr.
pub fn far_field_mean(scenario: &NetworkScenario, w: f64) -> f64 {
    2.0 * PI * scenario.lambda * scenario.path_loss.tail_integral(w)
}

/// I = Σ_x (Σ_k h_{x,k}) ℓ(‖x‖) over the pattern, one fade per unit of
/// multiplicity, skipping `exclude`.
pub fn interference<R: Rng + ?Sized>(
    pattern: &PointPattern,
    scenario: &NetworkScenario,
    exclude: Option<usize>,
    rng: &mut R,
) -> Result<f64> {
    let want = scenario.units_per_location();
    if pattern.multiplicities.iter().any(|&k| k != want) {
        return Err(invalid(
            "pattern",
            format!("multiplicities do not match a {:?} scenario", scenario.multiplicity),
        ));
    }
    let fades = scenario.fading.sampler();
    let mut total = 0.0;
    for i in 0..pattern.len() {
        if Some(i) == exclude {
            continue;
        }
        let d2 = pattern.distance_sq(i);
        if d2 == 0.0 && scenario.path_loss.kind == PathLossKind::Singular {
            return Err(Error::Domain(
                "interferer at the receiver with singular path loss".into(),
            ));
        }
        let h: f64 = (0..want).map(|_| fades.sample(rng)).sum();
        total += h * scenario.path_loss.eval_sq(d2);
    }
    Ok(total)
}

/// Precomputed sampler for one scenario and window.
#[derive(Debug, Clone)]
pub struct Simulator {
    scenario: NetworkScenario,
    window: Window,
    fades: FadeSampler,
    far_field: f64,
}

impl Simulator {
    pub fn new(scenario: &NetworkScenario, window: Window, far_field: FarField) -> Result<Self> {
        scenario.validate()?;
        let far = match far_field {
            FarField::Truncate => 0.0,
            FarField::MeanCompensated => far_field_mean(scenario, window.radius),
        };
        Ok(Self {
            scenario: *scenario,
            window,
            fades: scenario.fading.sampler(),
            far_field: far,
        })
    }

    /// Window from [`required_window_radius`] with mean compensation.
    pub fn with_tolerance(scenario: &NetworkScenario, rel_tol: f64) -> Result<Self> {
        let w = Window::new(required_window_radius(scenario, rel_tol)?)?;
        Self::new(scenario, w, FarField::MeanCompensated)
    }

    pub fn scenario(&self) -> &NetworkScenario {
        &self.scenario
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn far_field(&self) -> f64 {
        self.far_field
    }

    #[inline]
    fn fade(&self, rng: &mut (impl Rng + ?Sized)) -> f64 {
        self.fades.sample(rng)
    }

    #[inline]
    fn units(&self, rng: &mut (impl Rng + ?Sized), k: u32) -> f64 {
        if k == 1 {
            self.fade(rng)
        } else {
            (0..k).map(|_| self.fade(rng)).sum()
        }
    }

    /// Squared distances of the distinct locations, stationary version.
    fn fill_support<R: Rng + ?Sized>(&self, rng: &mut R, buf: &mut Vec<f64>) -> Result<()> {
        buf.clear();
        let lam = self.scenario.support_intensity();
        match self.scenario.process {
            ProcessKind::Ppp => {
                let w2 = self.window.radius * self.window.radius;
                let n = poisson_count(lam * self.window.area(), rng);
                buf.extend((0..n).map(|_| w2 * rng.random::<f64>()));
            }
            ref kind => {
                let p = sample_support(kind, lam, self.window, rng)?;
                buf.extend((0..p.len()).map(|i| p.distance_sq(i)));
            }
        }
        Ok(())
    }

    /// Squared distances of the distinct locations under the reduced Palm
    /// distribution (typical location at the origin, removed).
    fn fill_palm<R: Rng + ?Sized>(&self, rng: &mut R, buf: &mut Vec<f64>) -> Result<()> {
        buf.clear();
        let lam = self.scenario.support_intensity();
        match self.scenario.process {
            ProcessKind::Ppp => {
                let w2 = self.window.radius * self.window.radius;
                let n = poisson_count(lam * self.window.area(), rng);
                buf.extend((0..n).map(|_| w2 * rng.random::<f64>()));
            }
            ref kind => {
                let p = sample_reduced_palm(kind, lam, self.window, rng)?;
                buf.extend((0..p.len()).map(|i| p.distance_sq(i)));
            }
        }
        Ok(())
    }

    /// One SIR draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<SirSample> {
        let mut buf = Vec::new();
        self.sample_into(rng, &mut buf)
    }

    fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, buf: &mut Vec<f64>) -> Result<SirSample> {
        self.fill_support(rng, buf)?;
        self.sir_from_support(buf, rng)
    }

    /// SIR for a given set of location distances (squared), drawing all
    /// fades from `rng`. The far-field term is added to I.
    pub fn sir_from_support<R: Rng + ?Sized>(&self, r2: &[f64], rng: &mut R) -> Result<SirSample> {
        let sc = &self.scenario;
        let pl = &sc.path_loss;
        let partnered = matches!(sc.multiplicity, Multiplicity::Duplicated | Multiplicity::EdgeUser);
        let units = sc.units_per_location();

        let (serving, d2_serv) = match sc.topology {
            Topology::AdHoc => (None, sc.link_distance * sc.link_distance),
            Topology::Cellular => {
                let (i, d2) = argmin(r2, None).ok_or(Error::EmptyPattern)?;
                (Some(i), d2)
            }
        };
        let l_serv = pl.eval_sq(d2_serv);
        let signal = self.fade(rng) * l_serv;

        let mut interference = self.far_field;
        // (squared distance, interference) of the nearest interferer so far
        let mut near: Option<(f64, f64)> = None;
        if partnered {
            let p = self.fade(rng) * l_serv;
            interference += p;
            near = Some((d2_serv, p));
        }
        for (i, &d2) in r2.iter().enumerate() {
            if Some(i) == serving {
                continue;
            }
            let l = pl.eval_sq(d2);
            let first = self.fade(rng);
            let h = if units == 1 {
                first
            } else {
                first + self.units(rng, units - 1)
            };
            interference += h * l;
            if near.is_none_or(|(b, _)| d2 < b) {
                near = Some((d2, first * l));
            }
        }
        let nearest_interference = near.map_or(0.0, |(_, p)| p);
        Ok(SirSample {
            signal,
            interference,
            nearest_interference,
            sir: signal / interference,
            sir0: signal / nearest_interference,
            serving_distance: d2_serv.sqrt(),
            no_interferer: near.is_none(),
        })
    }

    /// I_∞ seen from a typical location of the process (reduced Palm), with
    /// every other location carrying its full multiplicity of fades. For a
    /// duplicated scenario the fades are pair sums. The typical location's
    /// own partner is not included.
    pub fn palm_interference<R: Rng + ?Sized>(&self, rng: &mut R, buf: &mut Vec<f64>) -> Result<f64> {
        self.fill_palm(rng, buf)?;
        let units = self.scenario.units_per_location();
        let pl = &self.scenario.path_loss;
        let mut total = self.far_field;
        for &d2 in buf.iter() {
            total += self.units(rng, units) * pl.eval_sq(d2);
        }
        Ok(total)
    }

    /// R̄_2²: squared distance from a typical location to the nearest other
    /// location (reduced Palm). Errors when the window holds no other point.
    pub fn palm_nearest_sq<R: Rng + ?Sized>(&self, rng: &mut R, buf: &mut Vec<f64>) -> Result<f64> {
        self.fill_palm(rng, buf)?;
        argmin(buf, None).map(|(_, d2)| d2).ok_or(Error::NoInterferer)
    }

    /// `n` samples from substream `stream` of `seed`.
    pub fn run_chunk(&self, seed: u64, stream: u64, n: usize) -> Result<Vec<SirSample>> {
        let mut rng = substream(seed, stream);
        let mut buf = Vec::new();
        (0..n).map(|_| self.sample_into(&mut rng, &mut buf)).collect()
    }

    /// `n` samples split into fixed-size chunks, each on its own substream;
    /// the output order depends only on `seed`.
    pub fn batch(&self, n: usize, seed: u64) -> Result<Vec<SirSample>> {
        self.batch_map(n, seed, |s| s)
    }

    /// [`Simulator::batch`] with each sample mapped through `f` as it is
    /// drawn.
    pub fn batch_map<T: Send>(&self, n: usize, seed: u64, f: impl Fn(SirSample) -> T + Sync) -> Result<Vec<T>> {
        if n == 0 {
            return Err(invalid("n", "sample count must be at least 1"));
        }
        let chunks: Vec<Vec<T>> = (0..n.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut rng = substream(seed, c as u64);
                let mut buf = Vec::new();
                (0..CHUNK.min(n - c * CHUNK))
                    .map(|_| self.sample_into(&mut rng, &mut buf).map(&f))
                    .collect::<Result<Vec<T>>>()
            })
            .collect::<Result<_>>()?;
        Ok(chunks.into_iter().flatten().collect())
    }
}

/// Generator behind every simulation stream.
pub type SimRng = Xoshiro256PlusPlus;

/// Deterministic rng substream: the seeded generator advanced by `stream`
/// jumps of 2^128 steps, so substreams never overlap.
pub fn substream(seed: u64, stream: u64) -> SimRng {
    let mut rng = SimRng::seed_from_u64(seed);
    for _ in 0..stream {
        rng.jump();
    }
    rng
}

fn argmin(r2: &[f64], exclude: Option<usize>) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &d2) in r2.iter().enumerate() {
        if Some(i) != exclude && best.is_none_or(|(_, b)| d2 < b) {
            best = Some((i, d2));
        }
    }
    best
}

/// One SIR draw with a freshly sampled pattern, far field mean-compensated.
pub fn sample_sir<R: Rng + ?Sized>(scenario: &NetworkScenario, window: Window, rng: &mut R) -> Result<SirSample> {
    Simulator::new(scenario, window, FarField::MeanCompensated)?.sample(rng)
}

/// SIR for a given support pattern (distinct locations); the scenario's
/// multiplicity decides how many fades each location carries. No far-field
/// term is added.
pub fn sir_for_pattern<R: Rng + ?Sized>(
    scenario: &NetworkScenario,
    pattern: &PointPattern,
    rng: &mut R,
) -> Result<SirSample> {
    if scenario.topology == Topology::Cellular {
        nearest(pattern, None).map_err(|_| Error::EmptyPattern)?;
    }
    let sim = Simulator::new(scenario, pattern.window, FarField::Truncate)?;
    let r2: Vec<f64> = (0..pattern.len()).map(|i| pattern.distance_sq(i)).collect();
    sim.sir_from_support(&r2, rng)
}

/// `n` independent samples, deterministic for a fixed seed.
pub fn batch_simulate(scenario: &NetworkScenario, window: Window, n: usize, seed: u64) -> Result<Vec<SirSample>> {
    Simulator::new(scenario, window, FarField::MeanCompensated)?.batch(n, seed)
}
