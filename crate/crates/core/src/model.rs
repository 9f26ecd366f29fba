//! Domain types shared by every other module: path-loss laws, Nakagami
//! fading, the scenario selector, tail-law descriptors, and the gamma-moment
//! algebra behind the closed-form pre-constants.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::special::gamma_ratio;

/// δ = 2/α.
pub fn delta_of(alpha: f64) -> Result<f64> {
    if !(alpha > 2.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!(
            "path loss exponent must exceed 2 (got {alpha}); interference diverges"
        )));
    }
    Ok(2.0 / alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathLossKind {
    Singular,
    Bounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossModel {
    pub kind: PathLossKind,
    pub alpha: f64,
    #[serde(default)]
    pub epsilon: f64,
}

impl PathLossModel {
    pub fn singular(alpha: f64) -> Result<Self> {
        let model = Self {
            kind: PathLossKind::Singular,
            alpha,
            epsilon: 0.0,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn bounded(alpha: f64, epsilon: f64) -> Result<Self> {
        let model = Self {
            kind: PathLossKind::Bounded,
            alpha,
            epsilon,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        delta_of(self.alpha)?;
        if self.kind == PathLossKind::Bounded && !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(invalid("epsilon", "bounded path loss needs epsilon > 0"));
        }
        Ok(())
    }

    pub fn delta(&self) -> f64 {
        2.0 / self.alpha
    }

    /// ℓ(r) for a distance r.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::Domain(format!("distance must be non-negative (got {r})")));
        }
        match self.kind {
            PathLossKind::Singular if r == 0.0 => {
                Err(Error::Domain("singular path loss evaluated at the origin".into()))
            }
            PathLossKind::Singular => Ok(r.powf(-self.alpha)),
            PathLossKind::Bounded => Ok(1.0 / (self.epsilon + r.powf(self.alpha))),
        }
    }

    /// ℓ evaluated from a squared distance; the hot path of the simulator.
    /// Returns +inf for singular path loss at r² = 0.
    #[inline]
    pub fn eval_sq(&self, r2: f64) -> f64 {
        let half = 0.5 * self.alpha;
        let r_alpha = if half == half.trunc() && half <= 16.0 {
            r2.powi(half as i32)
        } else {
            r2.powf(half)
        };
        match self.kind {
            PathLossKind::Singular => 1.0 / r_alpha,
            PathLossKind::Bounded => 1.0 / (self.epsilon + r_alpha),
        }
    }

    /// ∫_w^∞ ℓ(r) r dr, the radial Campbell integral of the path loss beyond
    /// radius `w`.
    pub fn tail_integral(&self, w: f64) -> f64 {
        let a = self.alpha;
        let singular = w.powf(2.0 - a) / (a - 2.0);
        match self.kind {
            PathLossKind::Singular => singular,
            PathLossKind::Bounded => {
                let wa = w.powf(a);
                if wa > 2.0 * self.epsilon {
                    // 1/(ε + r^α) = Σ_k (-ε)^k r^{-α(k+1)}
                    let mut sum = 0.0;
                    let mut coef = 1.0;
                    for k in 0..200 {
                        let p = a * (k as f64 + 1.0);
                        let term = coef * w.powf(2.0 - p) / (p - 2.0);
                        sum += term;
                        if term.abs() < 1e-17 * sum.abs() {
                            break;
                        }
                        coef *= -self.epsilon;
                    }
                    sum
                } else {
                    // split at the radius where the series converges fast
                    let w1 = (4.0 * self.epsilon).powf(1.0 / a);
                    let inner = simpson(|r| r / (self.epsilon + r.powf(a)), w, w1, 2000);
                    inner + self.tail_integral(w1)
                }
            }
        }
    }
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let x = a + h * i as f64;
        acc += if i % 2 == 1 { 4.0 * f(x) } else { 2.0 * f(x) };
    }
    acc * h / 3.0
}

/// Free-function form of [`PathLossModel::eval`].
pub fn path_loss(model: &PathLossModel, r: f64) -> Result<f64> {
    model.eval(r)
}

/// Nakagami-m power fading: h ~ gamma(m, 1/m), unit mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FadingModel {
    pub m: f64,
}

impl FadingModel {
    pub const RAYLEIGH: FadingModel = FadingModel { m: 1.0 };

    pub fn nakagami(m: f64) -> Result<Self> {
        let f = Self { m };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m >= 0.5) || !self.m.is_finite() {
            return Err(invalid(
                "m",
                format!("Nakagami parameter must be >= 0.5 (got {})", self.m),
            ));
        }
        Ok(())
    }

    pub fn is_rayleigh(&self) -> bool {
        self.m == 1.0
    }

    /// Integer value of m, if it is one.
    pub fn integer_m(&self) -> Option<u32> {
        (self.m == self.m.trunc() && self.m >= 1.0 && self.m <= 64.0).then_some(self.m as u32)
    }

    pub fn sampler(&self) -> FadeSampler {
        if self.is_rayleigh() {
            FadeSampler::Exponential
        } else if let Some(k @ 2..=8) = self.integer_m() {
            FadeSampler::Erlang(k)
        } else {
            FadeSampler::Gamma(Gamma::new(self.m, 1.0 / self.m).expect("validated shape"))
        }
    }
}

/// Draws fading powers. Rayleigh uses the exponential ziggurat directly and
/// small integer m a sum of m exponentials, which is cheaper than the
/// general gamma sampler.
#[derive(Debug, Clone, Copy)]
pub enum FadeSampler {
    Exponential,
    Erlang(u32),
    Gamma(Gamma<f64>),
}

impl FadeSampler {
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            FadeSampler::Exponential => Exp1.sample(rng),
            FadeSampler::Erlang(k) => {
                let mut acc: f64 = 0.0;
                for _ in 0..*k {
                    let e: f64 = Exp1.sample(rng);
                    acc += e;
                }
                acc / f64::from(*k)
            }
            FadeSampler::Gamma(g) => g.sample(rng),
        }
    }
}

/// E[X^t] for X ~ gamma(shape, scale).
pub fn gamma_moment(shape: f64, scale: f64, t: f64) -> Result<f64> {
    if !(shape > 0.0) || !(scale > 0.0) {
        return Err(Error::Domain(format!(
            "gamma moment needs shape, scale > 0 (got {shape}, {scale})"
        )));
    }
    if !(shape + t > 0.0) {
        return Err(Error::Domain(format!("moment of order {t} diverges for shape {shape}")));
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    Ok(scale.powf(t) * gamma_ratio(shape, t))
}

/// E[h^t] for a single Nakagami-m fade.
pub fn fading_moment(fading: &FadingModel, t: f64) -> Result<f64> {
    gamma_moment(fading.m, 1.0 / fading.m, t)
}

/// E[(h_a + h_b)^t] for two i.i.d. fades; the sum is gamma(2m, 1/m).
pub fn pair_fading_moment(fading: &FadingModel, t: f64) -> Result<f64> {
    gamma_moment(2.0 * fading.m, 1.0 / fading.m, t)
}

/// sinc δ = sin(πδ)/(πδ) for δ in (0, 1).
pub fn sinc_delta(delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("sinc_delta needs 0 < delta < 1 (got {delta})")));
    }
    Ok(sinc(delta))
}

pub(crate) fn sinc(delta: f64) -> f64 {
    let x = PI * delta;
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    AdHoc,
    Cellular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Multiplicity {
    Simple,
    Duplicated,
    /// Only the desired transmitter's location carries a colocated partner;
    /// every other interferer is simple. Models cell-edge users and shared towers.
    EdgeUser,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProcessKind {
    Ppp,
    /// Matérn type II hard-core process; the parent intensity is solved from
    /// the target intensity.
    #[serde(rename = "matern_ii")]
    MaternII {
        hardcore_radius: f64,
    },
    /// Square lattice with uniform global translation and Gaussian per-point
    /// jitter; the spacing is set by the target intensity.
    PerturbedLattice {
        jitter_sd: f64,
    },
}

impl ProcessKind {
    pub fn is_poisson(&self) -> bool {
        matches!(self, ProcessKind::Ppp)
    }

    pub fn name(&self) -> &'static str {
        match self {
            ProcessKind::Ppp => "ppp",
            ProcessKind::MaternII { .. } => "matern_ii",
            ProcessKind::PerturbedLattice { .. } => "perturbed_lattice",
        }
    }
}

/// Full model selector for one simulated network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkScenario {
    pub topology: Topology,
    pub multiplicity: Multiplicity,
    pub process: ProcessKind,
    /// Total transmitter intensity, counting colocated duplicates.
    pub lambda: f64,
    /// Ad hoc link distance; ignored for cellular.
    #[serde(default = "default_link")]
    pub link_distance: f64,
    pub path_loss: PathLossModel,
    pub fading: FadingModel,
}

fn default_link() -> f64 {
    1.0
}

impl NetworkScenario {
    pub fn new(topology: Topology, multiplicity: Multiplicity, path_loss: PathLossModel, fading: FadingModel) -> Self {
        Self {
            topology,
            multiplicity,
            process: ProcessKind::Ppp,
            lambda: 1.0,
            link_distance: 1.0,
            path_loss,
            fading,
        }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_link_distance(mut self, b: f64) -> Self {
        self.link_distance = b;
        self
    }

    pub fn with_process(mut self, process: ProcessKind) -> Self {
        self.process = process;
        self
    }

    pub fn delta(&self) -> f64 {
        self.path_loss.delta()
    }

    /// Intensity of the set of distinct locations.
    pub fn support_intensity(&self) -> f64 {
        match self.multiplicity {
            Multiplicity::Duplicated => self.lambda / 2.0,
            Multiplicity::Simple | Multiplicity::EdgeUser => self.lambda,
        }
    }

    /// Fades drawn per interferer location.
    pub fn units_per_location(&self) -> u32 {
        match self.multiplicity {
            Multiplicity::Duplicated => 2,
            Multiplicity::Simple | Multiplicity::EdgeUser => 1,
        }
    }

    /// Every violated constraint, in one list.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Err(e) = self.path_loss.validate() {
            out.push(e.to_string());
        }
        if let Err(e) = self.fading.validate() {
            out.push(e.to_string());
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            out.push(format!("lambda must be positive (got {})", self.lambda));
        }
        if self.topology == Topology::AdHoc && !(self.link_distance > 0.0 && self.link_distance.is_finite()) {
            out.push(format!("link_distance must be positive (got {})", self.link_distance));
        }
        match self.process {
            ProcessKind::Ppp => {}
            ProcessKind::MaternII { hardcore_radius } => {
                let lam = self.support_intensity();
                if !(hardcore_radius > 0.0) {
                    out.push("hardcore_radius must be positive".into());
                } else if lam * PI * hardcore_radius * hardcore_radius >= 1.0 {
                    out.push(format!(
                        "Matérn II cannot reach intensity {lam} with hard-core radius {hardcore_radius} \
                         (needs lambda * pi * r^2 < 1)"
                    ));
                }
            }
            ProcessKind::PerturbedLattice { jitter_sd } => {
                if !(jitter_sd >= 0.0) {
                    out.push("jitter_sd must be non-negative".into());
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(invalid("scenario", v.join("; ")))
        }
    }

    /// Short label used in reports, e.g. `duplicated/cellular/singular`.
    pub fn label(&self) -> String {
        let mult = match self.multiplicity {
            Multiplicity::Simple => "simple",
            Multiplicity::Duplicated => "duplicated",
            Multiplicity::EdgeUser => "edge_user",
        };
        let top = match self.topology {
            Topology::AdHoc => "ad_hoc",
            Topology::Cellular => "cellular",
        };
        let pl = match self.path_loss.kind {
            PathLossKind::Singular => "singular",
            PathLossKind::Bounded => "bounded",
        };
        format!("{mult}/{top}/{pl}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    LowerTail,
    UpperTail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailFamily {
    PowerLaw,
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PreConstantSource {
    Exact,
    Estimated,
    Unknown,
}

/// Whether a table entry is proven for the scenario at hand or only
/// conjectured (non-Poisson processes or non-Rayleigh fading on entries
/// proven only for those cases).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawStatus {
    Proven,
    Conjectured,
}

/// Asymptotic regime descriptor.
///
/// `order` is always positive: `1 - P_s = Θ(θ^order)` for the lower tail,
/// `P_s = Θ(θ^-order)` for a power-law upper tail, and
/// `P_s = exp(-Θ(θ^order))` for an exponential upper tail. For exponential
/// laws the pre-constant is the constant in the exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailLaw {
    pub regime: Regime,
    pub family: TailFamily,
    pub order: f64,
    pub pre_constant: Option<f64>,
    #[serde(rename = "source")]
    pub pre_constant_source: PreConstantSource,
    pub status: LawStatus,
}

impl TailLaw {
    /// Signed exponent a log-log fit should recover: `+order` for the lower
    /// tail, `-order` for a power-law upper tail.
    pub fn fitted_exponent(&self) -> f64 {
        match self.regime {
            Regime::LowerTail => self.order,
            Regime::UpperTail => -self.order,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn delta_examples() {
        assert_eq!(delta_of(4.0).unwrap(), 0.5);
        assert!((delta_of(3.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!(delta_of(2.0).is_err());
        assert!(delta_of(1.5).is_err());
    }

    #[test]
    fn path_loss_examples() {
        let s = PathLossModel::singular(4.0).unwrap();
        assert_eq!(path_loss(&s, 2.0).unwrap(), 0.0625);
        assert!(path_loss(&s, 0.0).is_err());
        let b = PathLossModel::bounded(4.0, 1.0).unwrap();
        assert_eq!(path_loss(&b, 0.0).unwrap(), 1.0);
        assert_eq!(path_loss(&b, 1.0).unwrap(), 0.5);
        assert!(PathLossModel::bounded(4.0, 0.0).is_err());
    }

    #[test]
    fn eval_sq_matches_eval() {
        for model in [
            PathLossModel::singular(4.0).unwrap(),
            PathLossModel::singular(3.3).unwrap(),
            PathLossModel::bounded(6.0, 0.5).unwrap(),
            PathLossModel::bounded(2.5, 2.0).unwrap(),
        ] {
            for r in [0.1, 0.7, 1.0, 3.0, 12.0] {
                let a = model.eval(r).unwrap();
                let b = model.eval_sq(r * r);
                assert!(((a - b) / a).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn tail_integral_against_quadrature() {
        // independent route: Simpson on the substituted integrand r = w / t
        for model in [
            PathLossModel::singular(4.0).unwrap(),
            PathLossModel::bounded(4.0, 1.0).unwrap(),
            PathLossModel::bounded(3.0, 5.0).unwrap(),
        ] {
            for w in [0.5, 1.0, 10.0] {
                let a = model.alpha;
                let f = |t: f64| {
                    let t = t.max(1e-12);
                    let r = w / t;
                    model.eval(r).unwrap() * r * w / (t * t)
                };
                // t^{α-3} behaviour near 0 is integrable and smooth for α ≥ 3
                let q = simpson(f, 0.0, 1.0, 200_000);
                let got = model.tail_integral(w);
                assert!(((got - q) / q).abs() < 1e-6, "alpha={a} w={w}: {got} vs {q}");
            }
        }
    }

    #[test]
    fn gamma_moment_examples() {
        assert!((gamma_moment(1.0, 1.0, 0.5).unwrap() - 0.886_226_925_452_758).abs() < 1e-12);
        assert_eq!(gamma_moment(2.7, 3.0, 0.0).unwrap(), 1.0);
        assert!((gamma_moment(2.0, 1.0, 0.5).unwrap() - 1.329_340_388_179_137).abs() < 1e-12);
        assert!(gamma_moment(1.0, 1.0, -1.0).is_err());
        assert!(gamma_moment(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn fading_moment_examples() {
        let rayleigh = FadingModel::RAYLEIGH;
        let m2 = FadingModel::nakagami(2.0).unwrap();
        assert!((fading_moment(&rayleigh, 0.5).unwrap() - 0.886_226_925_452_758).abs() < 1e-12);
        assert!((fading_moment(&m2, -0.5).unwrap() - 1.253_314_137_315_500).abs() < 1e-12);
        assert!(fading_moment(&rayleigh, -1.0).is_err());
    }

    #[test]
    fn pair_fading_moment_examples() {
        let rayleigh = FadingModel::RAYLEIGH;
        assert!((pair_fading_moment(&rayleigh, 0.5).unwrap() - 1.329_340_388_179_137).abs() < 1e-12);
        assert_eq!(pair_fading_moment(&rayleigh, 0.0).unwrap(), 1.0);
        let m2 = FadingModel::nakagami(2.0).unwrap();
        // 0.5^0.5 Γ(4.5)/Γ(4)
        assert!((pair_fading_moment(&m2, 0.5).unwrap() - 1.370_812_337_688_828).abs() < 1e-12);
    }

    #[test]
    fn moments_against_mc() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000;
        // (h_a + h_b)^0.5 for Rayleigh pairs
        let mut acc = 0.0;
        let mut acc2 = 0.0;
        for _ in 0..n {
            let s: f64 = Exp1.sample(&mut rng);
            let t: f64 = Exp1.sample(&mut rng);
            let v = (s + t).sqrt();
            acc += v;
            acc2 += v * v;
        }
        let mean = acc / n as f64;
        let se = ((acc2 / n as f64 - mean * mean) / n as f64).sqrt();
        assert!((mean - 1.329_340_388).abs() < 4.0 * se);

        // h^-0.5 for m = 2
        let g = Gamma::new(2.0, 0.5).unwrap();
        let mut acc = 0.0;
        let mut acc2 = 0.0;
        for _ in 0..n {
            let v: f64 = g.sample(&mut rng);
            let v = v.powf(-0.5);
            acc += v;
            acc2 += v * v;
        }
        let mean = acc / n as f64;
        let se = ((acc2 / n as f64 - mean * mean) / n as f64).sqrt();
        assert!((mean - 1.253_314_137).abs() < 4.0 * se);
    }

    #[test]
    fn sinc_examples() {
        assert!((sinc_delta(0.5).unwrap() - 2.0 / PI).abs() < 1e-15);
        assert!((sinc_delta(1e-9).unwrap() - 1.0).abs() < 1e-15);
        assert!((sinc_delta(2.0 / 3.0).unwrap() - 0.413_496_671_566_344).abs() < 1e-12);
        assert!(sinc_delta(0.0).is_err());
        assert!(sinc_delta(1.0).is_err());
        // series and direct branch agree across the switch
        let x = 0.999e-4 / PI;
        assert!((sinc(x) - (PI * x).sin() / (PI * x)).abs() < 1e-15);
    }

    #[test]
    fn fading_sample_mean_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for m in [0.5, 1.0, 2.0, 4.0] {
            let sampler = FadingModel::nakagami(m).unwrap().sampler();
            let n = 1_000_000;
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..n {
                let h = sampler.sample(&mut rng);
                assert!(h > 0.0);
                s += h;
                s2 += h * h;
            }
            let mean = s / n as f64;
            let se = ((s2 / n as f64 - mean * mean) / n as f64).sqrt();
            assert!((mean - 1.0).abs() < 4.0 * se, "m={m}: mean {mean} se {se}");
        }
    }

    #[test]
    fn scenario_violations_are_collected() {
        let mut s = NetworkScenario::new(
            Topology::AdHoc,
            Multiplicity::Simple,
            PathLossModel {
                kind: PathLossKind::Bounded,
                alpha: 1.5,
                epsilon: 0.0,
            },
            FadingModel { m: 0.1 },
        );
        s.lambda = -1.0;
        let v = s.violations();
        assert!(v.len() >= 3, "{v:?}");
        assert!(s.validate().is_err());
        let _ = gamma(1.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn mean_identity(shape in 0.2f64..20.0, scale in 0.05f64..10.0) {
                let m1 = gamma_moment(shape, scale, 1.0).unwrap();
                prop_assert!(((m1 - shape * scale) / (shape * scale)).abs() < 1e-12);
            }

            #[test]
            fn unit_mean_fading(m in 0.5f64..30.0) {
                let f = FadingModel::nakagami(m).unwrap();
                prop_assert!((fading_moment(&f, 1.0).unwrap() - 1.0).abs() < 1e-12);
            }

            #[test]
            fn reciprocal_moment_product(m in 1.0f64..12.0, delta in 0.05f64..0.95) {
                let f = FadingModel::nakagami(m).unwrap();
                let prod = fading_moment(&f, delta).unwrap() * fading_moment(&f, -delta).unwrap();
                let expect = gamma(m + delta) * gamma(m - delta) / (gamma(m) * gamma(m));
                prop_assert!(((prod - expect) / expect).abs() < 1e-12);
            }

            #[test]
            fn path_loss_monotone_and_dominated(alpha in 2.1f64..8.0, eps in 0.01f64..10.0,
                                                r in 0.01f64..50.0, dr in 0.001f64..5.0) {
                let s = PathLossModel::singular(alpha).unwrap();
                let b = PathLossModel::bounded(alpha, eps).unwrap();
                prop_assert!(s.eval(r + dr).unwrap() < s.eval(r).unwrap());
                prop_assert!(b.eval(r + dr).unwrap() < b.eval(r).unwrap());
                prop_assert!(b.eval(r).unwrap() <= s.eval(r).unwrap());
            }
        }
    }
}
