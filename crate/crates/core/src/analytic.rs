//! Closed-form success probabilities for Poisson networks and the
//! asymptotic tail laws of every model in the matrix.
//!
//! Functions named `ps_exact_*` are exact; `ps_tail_*` and
//! [`interference_ccdf_tail`] are asymptotes and only meaningful in their
//! limit.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{
    delta_of, fading_moment, pair_fading_moment, sinc_delta, FadingModel, LawStatus, Multiplicity, NetworkScenario,
    PathLossKind, PreConstantSource, ProcessKind, Regime, TailFamily, TailLaw, Topology,
};
use crate::special::{binomial, gamma};

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be positive and finite (got {v})")))
    }
}

fn check_common(theta: f64, lambda: f64, b: f64) -> Result<()> {
    check_positive("theta", theta)?;
    check_positive("lambda", lambda)?;
    check_positive("b", b)
}

/// exp(-πλθ^δ b² Γ(1+δ)Γ(1-δ)): simple ad hoc, singular, PPP, Rayleigh.
pub fn ps_exact_adhoc_singular_ppp_rayleigh(theta: f64, lambda: f64, b: f64, alpha: f64) -> Result<f64> {
    check_common(theta, lambda, b)?;
    let d = delta_of(alpha)?;
    Ok((-PI * lambda * theta.powf(d) * b * b * gamma(1.0 + d) * gamma(1.0 - d)).exp())
}

/// (1 + δc)·e^{-c}, c = πλE[h^δ]Γ(1-δ)2^δ b²θ^δ: simple ad hoc, singular,
/// PPP, Nakagami m = 2.
pub fn ps_exact_adhoc_singular_ppp_nakagami2(theta: f64, lambda: f64, b: f64, alpha: f64) -> Result<f64> {
    check_common(theta, lambda, b)?;
    let d = delta_of(alpha)?;
    let c = nakagami2_exponent(lambda, b, d)? * theta.powf(d);
    Ok((1.0 + d * c) * (-c).exp())
}

fn nakagami2_exponent(lambda: f64, b: f64, d: f64) -> Result<f64> {
    let eh = fading_moment(&FadingModel { m: 2.0 }, d)?;
    Ok(PI * lambda * eh * gamma(1.0 - d) * 2f64.powf(d) * b * b)
}

/// E[e^{-sI}] = exp(-(πλ/sinc δ)·s(s+ε)^{δ-1}) for bounded path loss, PPP,
/// Rayleigh.
pub fn laplace_interference_bounded_ppp_rayleigh(s: f64, lambda: f64, alpha: f64, epsilon: f64) -> Result<f64> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(invalid("s", format!("must be non-negative (got {s})")));
    }
    check_positive("lambda", lambda)?;
    check_positive("epsilon", epsilon)?;
    let d = delta_of(alpha)?;
    if s == 0.0 {
        return Ok(1.0);
    }
    Ok((-(PI * lambda / sinc_delta(d)?) * s * (s + epsilon).powf(d - 1.0)).exp())
}

/// Simple ad hoc, bounded, PPP, Rayleigh: the Laplace transform at
/// s = (ε + b^α)θ.
pub fn ps_exact_adhoc_bounded_ppp_rayleigh(theta: f64, lambda: f64, b: f64, alpha: f64, epsilon: f64) -> Result<f64> {
    check_common(theta, lambda, b)?;
    laplace_interference_bounded_ppp_rayleigh((epsilon + b.powf(alpha)) * theta, lambda, alpha, epsilon)
}

/// (1+θ)^{-k}·exp(-(πλ/2)θ^δ b² E[(h_a+h_b)^δ] Γ(1-δ)): duplicated ad hoc,
/// singular, PPP support, Rayleigh, with `k` colocated interferers (1 by
/// default). `lambda` counts both points of each pair.
pub fn ps_exact_dup_adhoc_singular_ppp_rayleigh(
    theta: f64,
    lambda: f64,
    b: f64,
    alpha: f64,
    k: Option<u32>,
) -> Result<f64> {
    check_common(theta, lambda, b)?;
    let d = delta_of(alpha)?;
    let k = k.unwrap_or(1);
    let c = dup_singular_exponent(lambda, b, d)?;
    Ok((1.0 + theta).powi(-(k as i32)) * (-c * theta.powf(d)).exp())
}

fn dup_singular_exponent(lambda: f64, b: f64, d: f64) -> Result<f64> {
    let pair = pair_fading_moment(&FadingModel::RAYLEIGH, d)?;
    Ok(PI * lambda / 2.0 * b * b * pair * gamma(1.0 - d))
}

/// Duplicated ad hoc, bounded, PPP support, Rayleigh, exact:
/// (1+θ)^{-1}·exp(-(πλ/sinc δ)·s₁(s₁+ε)^{δ-1}·(δ + c(1-δ))) with
/// s₁ = θ(ε+b^α) and c = (s₁+2ε)/(2(s₁+ε)).
pub fn ps_exact_dup_adhoc_bounded_ppp_rayleigh(
    theta: f64,
    lambda: f64,
    b: f64,
    alpha: f64,
    epsilon: f64,
) -> Result<f64> {
    check_common(theta, lambda, b)?;
    check_positive("epsilon", epsilon)?;
    let d = delta_of(alpha)?;
    let s1 = theta * (epsilon + b.powf(alpha));
    let c = (s1 + 2.0 * epsilon) / (2.0 * (s1 + epsilon));
    let e = PI * lambda / sinc_delta(d)? * s1 * (s1 + epsilon).powf(d - 1.0) * (d + c * (1.0 - d));
    Ok((-e).exp() / (1.0 + theta))
}

/// Large-θ asymptote of the duplicated ad hoc bounded model (PPP support,
/// Rayleigh): (1+θ)^{-1}·exp(-(πλ(δ+1)/(2 sinc δ))·s₁(s₁+ε)^{δ-1}).
pub fn ps_tail_dup_adhoc_bounded_ppp_rayleigh(
    theta: f64,
    lambda: f64,
    b: f64,
    alpha: f64,
    epsilon: f64,
) -> Result<f64> {
    check_common(theta, lambda, b)?;
    check_positive("epsilon", epsilon)?;
    let d = delta_of(alpha)?;
    let s1 = theta * (epsilon + b.powf(alpha));
    let e = PI * lambda * (d + 1.0) / (2.0 * sinc_delta(d)?) * s1 * (s1 + epsilon).powf(d - 1.0);
    Ok((-e).exp() / (1.0 + theta))
}

/// Asymptote πλE[h^δ]y^{-δ} of P(I > y), shared by the nearest-interferer
/// power I_0.
pub fn interference_ccdf_tail(y: f64, lambda: f64, fading: &FadingModel, delta: f64) -> Result<f64> {
    check_positive("y", y)?;
    check_positive("lambda", lambda)?;
    Ok(PI * lambda * fading_moment(fading, delta)? * y.powf(-delta))
}

/// Γ̄(m-i) = δΓ(m-i+δ) for i < m and Γ(1+δ) for i = m.
pub fn gamma_bar(m: u32, i: u32, delta: f64) -> Result<f64> {
    if m < 1 {
        return Err(invalid("m", "must be at least 1"));
    }
    if i > m {
        return Err(invalid("i", format!("must lie in [0, {m}] (got {i})")));
    }
    Ok(if i < m {
        delta * gamma(f64::from(m - i) + delta)
    } else {
        gamma(1.0 + delta)
    })
}

/// Σ_{i=0}^{m} C(m,i) Γ(m+i) Γ̄(m-i).
pub fn pair_gamma_sum(m: u32, delta: f64) -> Result<f64> {
    (0..=m)
        .map(|i| Ok(binomial(m, i) * gamma(f64::from(m + i)) * gamma_bar(m, i, delta)?))
        .sum()
}

/// Pre-constant of P_s(θ) ~ C θ^{-(m+δ)} for duplicated cellular networks
/// with singular path loss. `palm_inv` is E_o^!(I_∞^{-δ}) with pair-summed
/// fades.
pub fn dup_cellular_constant(lambda: f64, m: u32, delta: f64, palm_inv: f64) -> Result<f64> {
    let mf = f64::from(m);
    let g = gamma(mf);
    Ok(lambda * PI * mf.powf(-delta) / (2.0 * (mf + delta) * g * g) * palm_inv * pair_gamma_sum(m, delta)?)
}

/// Whether the SIR uses every interferer or only the nearest one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterferenceMode {
    TotalInterference,
    NearestOnly,
}

/// Which I_∞ a Palm inverse moment was estimated for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PalmVariant {
    /// One fade per point (simple processes).
    SingleFade,
    /// (h_{y,1} + h_{y,2}) per location of the support process.
    PairSummed,
}

impl PalmVariant {
    pub fn name(&self) -> &'static str {
        match self {
            PalmVariant::SingleFade => "single_fade",
            PalmVariant::PairSummed => "pair_summed",
        }
    }

    pub fn for_scenario(scenario: &NetworkScenario) -> Self {
        match scenario.multiplicity {
            Multiplicity::Duplicated => PalmVariant::PairSummed,
            Multiplicity::Simple | Multiplicity::EdgeUser => PalmVariant::SingleFade,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PalmMoment {
    pub value: f64,
    pub variant: PalmVariant,
}

/// Estimated quantities some pre-constants depend on.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct AuxMoments {
    /// E_o^!(I_∞^{-δ}).
    pub palm_inv_moment: Option<PalmMoment>,
    /// E[I^m] with I the total interference of the scenario.
    pub interference_m_moment: Option<f64>,
    /// E[R̄_2²].
    pub mean_sq_second_nearest: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoteRequest {
    pub scenario: NetworkScenario,
    pub regime: Regime,
    pub mode: InterferenceMode,
    pub aux_moments: Option<AuxMoments>,
}

impl AsymptoteRequest {
    pub fn new(scenario: NetworkScenario, regime: Regime, mode: InterferenceMode) -> Self {
        Self {
            scenario,
            regime,
            mode,
            aux_moments: None,
        }
    }

    pub fn with_aux(mut self, aux: AuxMoments) -> Self {
        self.aux_moments = Some(aux);
        self
    }

    fn aux(&self) -> AuxMoments {
        self.aux_moments.unwrap_or_default()
    }
}

/// Family and order of one table cell, from the model selectors alone.
/// Edge-user scenarios take the duplicated entries.
pub fn table_order(
    topology: Topology,
    multiplicity: Multiplicity,
    path_loss: PathLossKind,
    regime: Regime,
    mode: InterferenceMode,
    m: f64,
    delta: f64,
) -> (TailFamily, f64) {
    use InterferenceMode::*;
    use Multiplicity::*;
    use PathLossKind::*;
    use TailFamily::*;
    use Topology::*;
    let simple = multiplicity == Simple;
    match regime {
        // lower tails do not depend on the interference mode
        Regime::LowerTail => match (topology, path_loss) {
            (AdHoc, Singular) => (PowerLaw, delta),
            _ => (PowerLaw, m),
        },
        Regime::UpperTail => match mode {
            TotalInterference => match (topology, path_loss) {
                (Cellular, Singular) if simple => (PowerLaw, delta),
                (Cellular, Singular) => (PowerLaw, m + delta),
                _ => (Exponential, delta),
            },
            NearestOnly => match (topology, path_loss) {
                (Cellular, Singular) if simple => (PowerLaw, delta),
                _ => (PowerLaw, m),
            },
        },
    }
}

fn status(req: &AsymptoteRequest) -> LawStatus {
    let sc = &req.scenario;
    if sc.multiplicity == Multiplicity::EdgeUser {
        return LawStatus::Conjectured;
    }
    let ppp = sc.process == ProcessKind::Ppp;
    let rayleigh = sc.fading.is_rayleigh();
    let integer_m = sc.fading.integer_m().is_some();
    let proven = match (req.regime, req.mode) {
        (Regime::LowerTail, _) | (Regime::UpperTail, InterferenceMode::NearestOnly) => true,
        (Regime::UpperTail, InterferenceMode::TotalInterference) => {
            match (sc.multiplicity, sc.topology, sc.path_loss.kind) {
                (Multiplicity::Simple, Topology::AdHoc, _) => ppp && integer_m,
                (Multiplicity::Simple, Topology::Cellular, PathLossKind::Singular) => true,
                (Multiplicity::Duplicated, Topology::Cellular, PathLossKind::Singular) => integer_m,
                _ => ppp && rayleigh,
            }
        }
    };
    if proven {
        LawStatus::Proven
    } else {
        LawStatus::Conjectured
    }
}

fn law(req: &AsymptoteRequest, family: TailFamily, order: f64, pre: Option<f64>, source: PreConstantSource) -> TailLaw {
    TailLaw {
        regime: req.regime,
        family,
        order,
        pre_constant: pre,
        pre_constant_source: if pre.is_some() {
            source
        } else {
            PreConstantSource::Unknown
        },
        status: status(req),
    }
}

fn base_order(req: &AsymptoteRequest) -> (TailFamily, f64) {
    let sc = &req.scenario;
    table_order(
        sc.topology,
        sc.multiplicity,
        sc.path_loss.kind,
        req.regime,
        req.mode,
        sc.fading.m,
        sc.delta(),
    )
}

/// Constant of the ratio h_0/h_1 of two i.i.d. gamma(m, 1/m) fades in both
/// tails: P(h_0/h_1 < θ) ~ P(h_0/h_1 > 1/θ) ~ θ^m Γ(2m)/(mΓ(m)²).
fn fade_ratio_constant(m: f64) -> f64 {
    gamma(2.0 * m) / (m * gamma(m) * gamma(m))
}

/// Table entry for θ → 0 with its pre-constant.
pub fn lower_tail_law(req: &AsymptoteRequest) -> Result<TailLaw> {
    let sc = &req.scenario;
    sc.validate()?;
    if req.regime != Regime::LowerTail {
        return Err(invalid("regime", "lower_tail_law needs the lower-tail regime"));
    }
    let (family, order) = base_order(req);
    let d = sc.delta();
    let m = sc.fading.m;
    let b = sc.link_distance;
    let exact = PreConstantSource::Exact;
    let f = &sc.fading;
    let nearest = req.mode == InterferenceMode::NearestOnly;
    let (pre, source) = match (sc.multiplicity, sc.topology, sc.path_loss.kind) {
        (Multiplicity::Simple, Topology::AdHoc, PathLossKind::Singular) => (
            Some(PI * sc.lambda * b * b * fading_moment(f, d)? * fading_moment(f, -d)?),
            exact,
        ),
        (Multiplicity::Duplicated, Topology::AdHoc, PathLossKind::Singular) if !nearest => (
            Some(PI * sc.lambda * b * b / 2.0 * pair_fading_moment(f, d)? * fading_moment(f, -d)?),
            exact,
        ),
        (Multiplicity::Simple | Multiplicity::Duplicated, Topology::AdHoc, PathLossKind::Bounded) if !nearest => {
            let moment = req.aux().interference_m_moment.ok_or(Error::MissingAuxMoment {
                estimator: "estimate_interference_moment",
            })?;
            let inv_gain = sc.path_loss.epsilon + b.powf(sc.path_loss.alpha);
            (
                Some(m.powf(m - 1.0) / gamma(m) * inv_gain.powf(m) * moment),
                PreConstantSource::Estimated,
            )
        }
        (Multiplicity::Duplicated, Topology::Cellular, _) if nearest => (Some(fade_ratio_constant(m)), exact),
        _ => (None, PreConstantSource::Unknown),
    };
    Ok(law(req, family, order, pre, source))
}

fn palm_moment(req: &AsymptoteRequest) -> Result<f64> {
    let pm = req.aux().palm_inv_moment.ok_or(Error::MissingAuxMoment {
        estimator: "estimate_palm_inv_moment",
    })?;
    let expected = PalmVariant::for_scenario(&req.scenario);
    if pm.variant != expected {
        return Err(Error::AuxMomentVariant {
            expected: expected.name(),
            got: pm.variant.name(),
        });
    }
    Ok(pm.value)
}

/// Table entry for θ → ∞ with its pre-constant. For exponential laws the
/// pre-constant is the constant c in P_s ≈ exp(-c θ^δ).
pub fn upper_tail_law(req: &AsymptoteRequest) -> Result<TailLaw> {
    let sc = &req.scenario;
    sc.validate()?;
    if req.regime != Regime::UpperTail {
        return Err(invalid("regime", "upper_tail_law needs the upper-tail regime"));
    }
    let (family, order) = base_order(req);
    let d = sc.delta();
    let m = sc.fading.m;
    let b = sc.link_distance;
    let lam = sc.lambda;
    let f = &sc.fading;
    let ppp = sc.process == ProcessKind::Ppp;
    let exact = PreConstantSource::Exact;
    let estimated = PreConstantSource::Estimated;
    let (pre, source) = match req.mode {
        InterferenceMode::TotalInterference => match (sc.multiplicity, sc.topology, sc.path_loss.kind) {
            (Multiplicity::Simple, Topology::AdHoc, PathLossKind::Singular) if ppp && f.is_rayleigh() => {
                (Some(PI * lam * b * b * gamma(1.0 + d) * gamma(1.0 - d)), exact)
            }
            (Multiplicity::Simple, Topology::AdHoc, PathLossKind::Singular) if ppp && m == 2.0 => {
                (Some(nakagami2_exponent(lam, b, d)?), exact)
            }
            (Multiplicity::Simple, Topology::AdHoc, PathLossKind::Bounded) if ppp && f.is_rayleigh() => {
                let inv_gain = sc.path_loss.epsilon + b.powf(sc.path_loss.alpha);
                (Some(PI * lam / sinc_delta(d)? * inv_gain.powf(d)), exact)
            }
            (Multiplicity::Duplicated, Topology::AdHoc, PathLossKind::Singular) if ppp && f.is_rayleigh() => {
                (Some(dup_singular_exponent(lam, b, d)?), exact)
            }
            (Multiplicity::Duplicated, Topology::AdHoc, PathLossKind::Bounded) if ppp && f.is_rayleigh() => {
                let inv_gain = sc.path_loss.epsilon + b.powf(sc.path_loss.alpha);
                (
                    Some(PI * lam * (d + 1.0) / (2.0 * sinc_delta(d)?) * inv_gain.powf(d)),
                    exact,
                )
            }
            (Multiplicity::Simple, Topology::Cellular, PathLossKind::Singular) => {
                (Some(PI * lam * palm_moment(req)? * fading_moment(f, d)?), estimated)
            }
            (Multiplicity::Duplicated, Topology::Cellular, PathLossKind::Singular) => {
                let mi = f.integer_m().ok_or_else(|| {
                    invalid(
                        "m",
                        format!("the duplicated cellular constant needs an integer m (got {m})"),
                    )
                })?;
                (Some(dup_cellular_constant(lam, mi, d, palm_moment(req)?)?), estimated)
            }
            _ => (None, PreConstantSource::Unknown),
        },
        InterferenceMode::NearestOnly => match (sc.multiplicity, sc.topology, sc.path_loss.kind) {
            (Multiplicity::Simple, Topology::Cellular, PathLossKind::Singular) => {
                let r2 = req.aux().mean_sq_second_nearest.ok_or(Error::MissingAuxMoment {
                    estimator: "estimate_mean_sq_second_nearest",
                })?;
                (
                    Some(lam * PI * fading_moment(f, -d)? * r2 * fading_moment(f, d)?),
                    estimated,
                )
            }
            (Multiplicity::Duplicated, Topology::Cellular, _) => (Some(fade_ratio_constant(m)), exact),
            _ => (None, PreConstantSource::Unknown),
        },
    };
    Ok(law(req, family, order, pre, source))
}

/// Dispatches on the request's regime.
pub fn tail_law(req: &AsymptoteRequest) -> Result<TailLaw> {
    match req.regime {
        Regime::LowerTail => lower_tail_law(req),
        Regime::UpperTail => upper_tail_law(req),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PathLossModel;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        ((a - b) / b).abs() < rel
    }

    // ∫_0^∞ f(r) dr with r = e^u, composite Simpson in u
    fn integrate_half_line(f: &dyn Fn(f64) -> f64) -> f64 {
        let (lo, hi, n) = (-40.0, 40.0, 40_000);
        let h = (hi - lo) / n as f64;
        let g = |u: f64| {
            let r = f64::exp(u);
            f(r) * r
        };
        let mut acc = g(lo) + g(hi);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * g(lo + i as f64 * h);
        }
        acc * h / 3.0
    }

    // -log E[e^{-sI}] for a PPP of intensity lam; `ml` is 1 - L_h written
    // without cancellation
    fn campbell_exponent(lam: f64, l: &dyn Fn(f64) -> f64, ml: &dyn Fn(f64) -> f64, s: f64) -> f64 {
        2.0 * PI * lam * integrate_half_line(&|r| ml(s * l(r)) * r)
    }

    fn ml_exp(x: f64) -> f64 {
        x / (1.0 + x)
    }

    // gamma(2, 1): 1 - (1+x)^{-2}
    fn ml_pair(x: f64) -> f64 {
        x * (2.0 + x) / ((1.0 + x) * (1.0 + x))
    }

    #[test]
    fn void_formula_examples() {
        let p = ps_exact_adhoc_singular_ppp_rayleigh(1.0, 1.0, 1.0, 4.0).unwrap();
        assert!((p - (-PI * PI / 2.0).exp()).abs() < 1e-15);
        assert!(close(p, 7.1918e-3, 1e-4));
        assert!(ps_exact_adhoc_singular_ppp_rayleigh(1e-14, 1.0, 1.0, 4.0).unwrap() > 0.99999);
        let t = 1e-10;
        let c = (1.0 - ps_exact_adhoc_singular_ppp_rayleigh(t, 1.0, 1.0, 4.0).unwrap()) / t.sqrt();
        assert!(close(c, PI * PI / 2.0, 1e-4));
        assert!(ps_exact_adhoc_singular_ppp_rayleigh(0.0, 1.0, 1.0, 4.0).is_err());
        assert!(ps_exact_adhoc_singular_ppp_rayleigh(1.0, 1.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn void_formula_against_campbell() {
        // P = E[exp(-θ b^α I)] with the interference exponent by quadrature
        let (lam, b, a): (f64, f64, f64) = (0.7, 1.3, 3.5);
        for t in [0.1, 1.0, 5.0] {
            let e = campbell_exponent(lam, &|r| r.powf(-a), &ml_exp, t * b.powf(a));
            let got = ps_exact_adhoc_singular_ppp_rayleigh(t, lam, b, a).unwrap();
            assert!(close(got, (-e).exp(), 1e-7), "{got} vs {}", (-e).exp());
        }
    }

    #[test]
    fn nakagami2_against_campbell() {
        // P = E[(1 + sI)e^{-sI}], s = 2θb^α; E[sI e^{-sI}] = -s L'(s)
        let (lam, b, a): (f64, f64, f64) = (1.0, 1.0, 4.0);
        // gamma(2, 1/2): 1 - (1+x/2)^{-2}
        let lh = |x: f64| (x + x * x / 4.0) / ((1.0 + x / 2.0) * (1.0 + x / 2.0));
        let l = |r: f64| r.powf(-a);
        for t in [0.2, 1.0, 3.0] {
            let s = 2.0 * t * b.powf(a);
            let lap = |s: f64| (-campbell_exponent(lam, &l, &lh, s)).exp();
            let h = 1e-4 * s;
            let deriv = (lap(s + h) - lap(s - h)) / (2.0 * h);
            let expect = lap(s) - s * deriv;
            let got = ps_exact_adhoc_singular_ppp_nakagami2(t, lam, b, a).unwrap();
            assert!(close(got, expect, 1e-6), "theta={t}: {got} vs {expect}");
        }
        assert!(ps_exact_adhoc_singular_ppp_nakagami2(1e-14, 1.0, 1.0, 4.0).unwrap() > 0.99999);
        // log P / θ^δ approaches minus the exponent constant
        let c = nakagami2_exponent(1.0, 1.0, 0.5).unwrap();
        let t: f64 = 2500.0;
        let got = -ps_exact_adhoc_singular_ppp_nakagami2(t, 1.0, 1.0, 4.0).unwrap().ln() / t.sqrt();
        assert!(close(got, c, 2e-2));
    }

    #[test]
    fn laplace_bounded_examples() {
        assert_eq!(
            laplace_interference_bounded_ppp_rayleigh(0.0, 1.0, 4.0, 1.0).unwrap(),
            1.0
        );
        let v = laplace_interference_bounded_ppp_rayleigh(1.0, 1.0, 4.0, 1.0).unwrap();
        assert!(close(v, (-(PI * PI / 2.0) * 0.5f64.sqrt()).exp(), 1e-12));
        assert!(close(v, 3.052e-2, 1e-3));
        for s in [0.3, 2.0, 17.0] {
            let e = campbell_exponent(1.3, &|r| 1.0 / (0.5 + r.powi(3)), &ml_exp, s);
            let got = laplace_interference_bounded_ppp_rayleigh(s, 1.3, 3.0, 0.5).unwrap();
            assert!(close(got, (-e).exp(), 1e-7));
        }
        let s: f64 = 1e4;
        let got = -laplace_interference_bounded_ppp_rayleigh(s, 1.0, 4.0, 1.0)
            .unwrap()
            .ln()
            / s.sqrt();
        assert!(close(got, PI * PI / 2.0, 1e-4));
        let p = ps_exact_adhoc_bounded_ppp_rayleigh(0.5, 1.0, 1.0, 4.0, 1.0).unwrap();
        assert!(close(p, v, 1e-14));
        assert!(ps_exact_adhoc_bounded_ppp_rayleigh(1e-14, 1.0, 1.0, 4.0, 1.0).unwrap() > 0.99999);
        // log P ~ -A θ^δ, A = (π/sinc δ)(ε+b^α)^δ ≈ 6.979
        let a = PI * PI / 2.0 * 2f64.sqrt();
        assert!(close(a, 6.979, 1e-3));
        let t: f64 = 5e3;
        let got = -ps_exact_adhoc_bounded_ppp_rayleigh(t, 1.0, 1.0, 4.0, 1.0).unwrap().ln() / t.sqrt();
        assert!(close(got, a, 1e-4));
    }

    #[test]
    fn dup_singular_examples() {
        let p = ps_exact_dup_adhoc_singular_ppp_rayleigh(1.0, 2.0, 1.0, 4.0, None).unwrap();
        let expect = 0.5 * (-PI * 1.329_340_388_179_137 * PI.sqrt()).exp();
        assert!(close(p, expect, 1e-12));
        assert!(close(p, 3.05e-4, 1e-3));
        assert!(ps_exact_dup_adhoc_singular_ppp_rayleigh(1e-14, 2.0, 1.0, 4.0, None).unwrap() > 0.99999);
        let k2 = ps_exact_dup_adhoc_singular_ppp_rayleigh(3.0, 2.0, 1.0, 4.0, Some(2)).unwrap();
        let k1 = ps_exact_dup_adhoc_singular_ppp_rayleigh(3.0, 2.0, 1.0, 4.0, Some(1)).unwrap();
        assert!(close(k2, k1 / 4.0, 1e-14));
        // quadrature: support PPP λ/2 with gamma(2,1) pair fades
        let (lam, b, a): (f64, f64, f64) = (1.4, 0.8, 3.0);
        for t in [0.1, 2.0] {
            let e = campbell_exponent(lam / 2.0, &|r| r.powf(-a), &ml_pair, t * b.powf(a));
            let expect = (-e).exp() / (1.0 + t);
            let got = ps_exact_dup_adhoc_singular_ppp_rayleigh(t, lam, b, a, None).unwrap();
            assert!(close(got, expect, 1e-7));
        }
    }

    #[test]
    fn dup_bounded_exact_and_asymptote() {
        let (lam, b, a, eps): (f64, f64, f64, f64) = (1.0, 1.0, 4.0, 1.0);
        for t in [0.5, 10.0, 300.0] {
            let s1 = t * (eps + b.powf(a));
            let e = campbell_exponent(lam / 2.0, &|r| 1.0 / (eps + r.powf(a)), &ml_pair, s1);
            let expect = (-e).exp() / (1.0 + t);
            let got = ps_exact_dup_adhoc_bounded_ppp_rayleigh(t, lam, b, a, eps).unwrap();
            assert!(close(got, expect, 1e-7), "theta={t}: {got} vs {expect}");
        }
        // the stated arithmetic example evaluates with λ = 1: (1/11)e^{-16.15}
        let p = ps_tail_dup_adhoc_bounded_ppp_rayleigh(10.0, 1.0, 1.0, 4.0, 1.0).unwrap();
        let e = 3.0 * PI * PI / 8.0 * 20.0 / 21f64.sqrt();
        assert!(close(p, (-e).exp() / 11.0, 1e-12));
        assert!((e - 16.15).abs() < 0.01);
        // at λ = 2 the exponent doubles
        let p2 = ps_tail_dup_adhoc_bounded_ppp_rayleigh(10.0, 2.0, 1.0, 4.0, 1.0).unwrap();
        assert!(close(p2, (-2.0 * e).exp() / 11.0, 1e-12));
        // asymptote and exact agree in log-ratio per θ^δ as θ grows
        // their log gap shrinks like θ^{δ-1}
        let gap = |t: f64| {
            let ex = ps_exact_dup_adhoc_bounded_ppp_rayleigh(t, 2.0, 1.0, 4.0, 1.0)
                .unwrap()
                .ln();
            ex - ps_tail_dup_adhoc_bounded_ppp_rayleigh(t, 2.0, 1.0, 4.0, 1.0)
                .unwrap()
                .ln()
        };
        let (g1, g2) = (gap(30.0), gap(3000.0));
        assert!(g1 < 0.0 && g2 < 0.0 && g2.abs() < g1.abs() / 5.0, "{g1} {g2}");
        // −log(P(1+θ))/θ^δ → (πλ(δ+1)/(2 sinc δ))(ε+b^α)^δ
        let t: f64 = 3e3;
        let v = -(ps_tail_dup_adhoc_bounded_ppp_rayleigh(t, 2.0, 1.0, 4.0, 1.0).unwrap() * (1.0 + t)).ln() / t.sqrt();
        let lim = PI * 2.0 * 1.5 / (2.0 * 2.0 / PI) * 2f64.sqrt();
        assert!(close(v, lim, 1e-3));
    }

    #[test]
    fn interference_tail_examples() {
        let v = interference_ccdf_tail(100.0, 1.0, &FadingModel::RAYLEIGH, 0.5).unwrap();
        assert!(close(v, 0.27840, 1e-4));
        let w = interference_ccdf_tail(200.0, 1.0, &FadingModel::RAYLEIGH, 0.5).unwrap();
        assert!(close(w / v, 2f64.powf(-0.5), 1e-14));
    }

    #[test]
    fn gamma_bar_examples() {
        assert!((gamma_bar(1, 0, 0.5).unwrap() - 0.443_113_462_726_379).abs() < 1e-12);
        assert!((gamma_bar(1, 1, 0.5).unwrap() - 0.886_226_925_452_758).abs() < 1e-12);
        assert_eq!(gamma_bar(2, 2, 0.5).unwrap(), gamma(1.5));
        assert!(gamma_bar(2, 3, 0.5).is_err());
        assert!(gamma_bar(0, 0, 0.5).is_err());
    }

    #[test]
    fn dup_cellular_constant_reduces_at_m1() {
        for d in [0.3, 0.5, 2.0 / 3.0] {
            let sum = pair_gamma_sum(1, d).unwrap();
            assert!(((sum - (d + 1.0) * gamma(1.0 + d)) / sum).abs() < 1e-12);
            let c = dup_cellular_constant(2.0, 1, d, 0.37).unwrap();
            let reduced = 2.0 * PI / 2.0 * gamma(1.0 + d) * 0.37;
            assert!(((c - reduced) / reduced).abs() < 1e-12);
        }
    }

    #[test]
    fn void_formula_is_the_m1_instance() {
        for d in [0.25, 0.5, 0.8] {
            let general = fading_moment(&FadingModel::RAYLEIGH, d).unwrap() * gamma(1.0 - d);
            assert!((general - gamma(1.0 + d) * gamma(1.0 - d)).abs() < 1e-12);
        }
    }

    #[test]
    fn pair_to_single_substitution_gives_void_exponent() {
        // (πλ'/2)b²E[(h_a+h_b)^δ]Γ(1-δ) with E[(h_a+h_b)^δ] → E[h^δ] and λ'/2 → λ
        let (lam, b, d) = (1.7, 1.2, 0.5);
        let substituted = PI * lam * b * b * fading_moment(&FadingModel::RAYLEIGH, d).unwrap() * gamma(1.0 - d);
        let void = -ps_exact_adhoc_singular_ppp_rayleigh(1.0, lam, b, 2.0 / d).unwrap().ln();
        assert!(((substituted - void) / void).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn exact_forms_are_decreasing_probabilities(
            lam in 0.05f64..3.0, b in 0.3f64..2.0, alpha in 2.2f64..6.0, eps in 0.1f64..3.0,
            t1 in 1e-3f64..20.0, ratio in 1.01f64..5.0,
        ) {
            let t2 = t1 * ratio;
            let fs: [&dyn Fn(f64) -> f64; 5] = [
                &|t| ps_exact_adhoc_singular_ppp_rayleigh(t, lam, b, alpha).unwrap(),
                &|t| ps_exact_adhoc_singular_ppp_nakagami2(t, lam, b, alpha).unwrap(),
                &|t| ps_exact_adhoc_bounded_ppp_rayleigh(t, lam, b, alpha, eps).unwrap(),
                &|t| ps_exact_dup_adhoc_singular_ppp_rayleigh(t, lam, b, alpha, None).unwrap(),
                &|t| ps_exact_dup_adhoc_bounded_ppp_rayleigh(t, lam, b, alpha, eps).unwrap(),
            ];
            for f in fs {
                let (p1, p2) = (f(t1), f(t2));
                prop_assert!((0.0..1.0).contains(&p1));
                prop_assert!(p2 >= 0.0 && p2 <= p1);
                // strict unless both underflowed
                prop_assert!(p2 < p1 || p1 == 0.0);
            }
        }
    }

    fn scenario(top: Topology, mult: Multiplicity, pl: PathLossKind, m: f64) -> NetworkScenario {
        let path_loss = match pl {
            PathLossKind::Singular => PathLossModel::singular(4.0).unwrap(),
            PathLossKind::Bounded => PathLossModel::bounded(4.0, 1.0).unwrap(),
        };
        NetworkScenario::new(top, mult, path_loss, FadingModel::nakagami(m).unwrap())
    }

    fn full_aux(sc: &NetworkScenario) -> AuxMoments {
        AuxMoments {
            palm_inv_moment: Some(PalmMoment {
                value: 0.5,
                variant: PalmVariant::for_scenario(sc),
            }),
            interference_m_moment: Some(5.0),
            mean_sq_second_nearest: Some(0.3),
        }
    }

    // Every cell of the order matrix, for total and nearest-only interference:
    // (mult, topology, path loss, lower order, upper family, upper order).
    #[test]
    fn laws_reproduce_order_matrix() {
        use InterferenceMode::*;
        use Multiplicity::*;
        use PathLossKind::*;
        use TailFamily::*;
        use Topology::*;
        let d = 0.5;
        for m in [1.0, 2.0, 3.0] {
            let total = [
                (Simple, AdHoc, Singular, d, Exponential, d),
                (Simple, AdHoc, Bounded, m, Exponential, d),
                (Simple, Cellular, Singular, m, PowerLaw, d),
                (Simple, Cellular, Bounded, m, Exponential, d),
                (Duplicated, AdHoc, Singular, d, Exponential, d),
                (Duplicated, AdHoc, Bounded, m, Exponential, d),
                (Duplicated, Cellular, Singular, m, PowerLaw, d + m),
                (Duplicated, Cellular, Bounded, m, Exponential, d),
            ];
            let nearest = [
                (Simple, AdHoc, Singular, d, PowerLaw, m),
                (Simple, AdHoc, Bounded, m, PowerLaw, m),
                (Simple, Cellular, Singular, m, PowerLaw, d),
                (Simple, Cellular, Bounded, m, PowerLaw, m),
                (Duplicated, AdHoc, Singular, d, PowerLaw, m),
                (Duplicated, AdHoc, Bounded, m, PowerLaw, m),
                (Duplicated, Cellular, Singular, m, PowerLaw, m),
                (Duplicated, Cellular, Bounded, m, PowerLaw, m),
            ];
            for (mode, table) in [(TotalInterference, total), (NearestOnly, nearest)] {
                for (mult, top, pl, low, fam, up) in table {
                    let sc = scenario(top, mult, pl, m);
                    let aux = full_aux(&sc);
                    let lo = lower_tail_law(&AsymptoteRequest::new(sc, Regime::LowerTail, mode).with_aux(aux)).unwrap();
                    assert_eq!((lo.family, lo.order), (PowerLaw, low), "{} {mode:?} m={m}", sc.label());
                    let hi = upper_tail_law(&AsymptoteRequest::new(sc, Regime::UpperTail, mode).with_aux(aux)).unwrap();
                    assert_eq!((hi.family, hi.order), (fam, up), "{} {mode:?} m={m}", sc.label());
                    assert!(hi.order > 0.0 && lo.order > 0.0);
                }
            }
        }
    }

    #[test]
    fn lower_tail_constants() {
        let sc = scenario(Topology::AdHoc, Multiplicity::Simple, PathLossKind::Singular, 1.0);
        let l = lower_tail_law(&AsymptoteRequest::new(
            sc,
            Regime::LowerTail,
            InterferenceMode::TotalInterference,
        ))
        .unwrap();
        assert!(close(l.pre_constant.unwrap(), PI * PI / 2.0, 1e-12));
        assert_eq!(l.pre_constant_source, PreConstantSource::Exact);
        assert_eq!(l.status, LawStatus::Proven);

        let dup = scenario(Topology::AdHoc, Multiplicity::Duplicated, PathLossKind::Singular, 1.0).with_lambda(2.0);
        let l = lower_tail_law(&AsymptoteRequest::new(
            dup,
            Regime::LowerTail,
            InterferenceMode::TotalInterference,
        ))
        .unwrap();
        assert!(close(l.pre_constant.unwrap(), PI * gamma(2.5) * gamma(0.5), 1e-12));
        assert!(close(l.pre_constant.unwrap(), 7.402, 1e-4));

        let cell = scenario(Topology::Cellular, Multiplicity::Simple, PathLossKind::Bounded, 2.0);
        let l = lower_tail_law(&AsymptoteRequest::new(
            cell,
            Regime::LowerTail,
            InterferenceMode::TotalInterference,
        ))
        .unwrap();
        assert_eq!(
            (l.order, l.pre_constant, l.pre_constant_source),
            (2.0, None, PreConstantSource::Unknown)
        );

        let bounded = scenario(Topology::AdHoc, Multiplicity::Simple, PathLossKind::Bounded, 2.0);
        let req = AsymptoteRequest::new(bounded, Regime::LowerTail, InterferenceMode::TotalInterference);
        assert_eq!(
            lower_tail_law(&req),
            Err(Error::MissingAuxMoment {
                estimator: "estimate_interference_moment"
            })
        );
        let aux = AuxMoments {
            interference_m_moment: Some(30.0),
            ..Default::default()
        };
        let l = lower_tail_law(&req.with_aux(aux)).unwrap();
        // (m^{m-1}/Γ(m))(ε+b^α)^m E[I^m] = 2·4·30
        assert!(close(l.pre_constant.unwrap(), 240.0, 1e-12));
        assert_eq!(l.pre_constant_source, PreConstantSource::Estimated);
    }

    #[test]
    fn upper_tail_constants() {
        let total = InterferenceMode::TotalInterference;
        let sc = scenario(Topology::Cellular, Multiplicity::Simple, PathLossKind::Singular, 1.0);
        let req = AsymptoteRequest::new(sc, Regime::UpperTail, total);
        assert_eq!(
            upper_tail_law(&req),
            Err(Error::MissingAuxMoment {
                estimator: "estimate_palm_inv_moment"
            })
        );
        let pm = |v, variant| AuxMoments {
            palm_inv_moment: Some(PalmMoment { value: v, variant }),
            ..Default::default()
        };
        let l = upper_tail_law(&req.with_aux(pm(0.4, PalmVariant::SingleFade))).unwrap();
        assert!(close(l.pre_constant.unwrap(), PI * 0.4 * gamma(1.5), 1e-12));
        assert_eq!(
            upper_tail_law(&req.with_aux(pm(0.4, PalmVariant::PairSummed))),
            Err(Error::AuxMomentVariant {
                expected: "single_fade",
                got: "pair_summed"
            })
        );

        let dup = scenario(
            Topology::Cellular,
            Multiplicity::Duplicated,
            PathLossKind::Singular,
            1.0,
        )
        .with_lambda(2.0);
        let req = AsymptoteRequest::new(dup, Regime::UpperTail, total).with_aux(pm(0.3, PalmVariant::PairSummed));
        let l = upper_tail_law(&req).unwrap();
        assert_eq!(l.order, 1.5);
        assert!(close(l.pre_constant.unwrap(), 2.0 * PI / 2.0 * gamma(1.5) * 0.3, 1e-12));
        let frac = NetworkScenario {
            fading: FadingModel::nakagami(1.5).unwrap(),
            ..dup
        };
        let req = AsymptoteRequest::new(frac, Regime::UpperTail, total).with_aux(pm(0.3, PalmVariant::PairSummed));
        assert!(upper_tail_law(&req).is_err());

        let adhoc = scenario(Topology::AdHoc, Multiplicity::Simple, PathLossKind::Singular, 1.0);
        let l = upper_tail_law(&AsymptoteRequest::new(adhoc, Regime::UpperTail, total)).unwrap();
        assert_eq!(l.family, TailFamily::Exponential);
        assert!(close(l.pre_constant.unwrap(), PI * PI / 2.0, 1e-12));
        let bounded = scenario(Topology::AdHoc, Multiplicity::Simple, PathLossKind::Bounded, 1.0);
        let l = upper_tail_law(&AsymptoteRequest::new(bounded, Regime::UpperTail, total)).unwrap();
        assert!(close(l.pre_constant.unwrap(), PI * PI / 2.0 * 2f64.sqrt(), 1e-12));
        let m3 = scenario(Topology::AdHoc, Multiplicity::Simple, PathLossKind::Bounded, 3.0);
        let l = upper_tail_law(&AsymptoteRequest::new(m3, Regime::UpperTail, total)).unwrap();
        assert_eq!(
            (l.pre_constant, l.pre_constant_source),
            (None, PreConstantSource::Unknown)
        );
        assert_eq!(l.status, LawStatus::Proven);
        // non-Poisson processes on PPP-only cells are conjectured
        let mat = adhoc.with_process(ProcessKind::MaternII { hardcore_radius: 0.3 });
        let l = upper_tail_law(&AsymptoteRequest::new(mat, Regime::UpperTail, total)).unwrap();
        assert_eq!((l.status, l.pre_constant), (LawStatus::Conjectured, None));

        let near = InterferenceMode::NearestOnly;
        let req = AsymptoteRequest::new(sc, Regime::UpperTail, near);
        assert_eq!(
            upper_tail_law(&req),
            Err(Error::MissingAuxMoment {
                estimator: "estimate_mean_sq_second_nearest"
            })
        );
        let aux = AuxMoments {
            mean_sq_second_nearest: Some(1.0 / PI),
            ..Default::default()
        };
        let l = upper_tail_law(&req.with_aux(aux)).unwrap();
        // Rayleigh, PPP: Γ(1-δ)Γ(1+δ) = π/2, matching atan(√θ)/√θ
        assert!(close(l.pre_constant.unwrap(), PI / 2.0, 1e-12));
        let dc = scenario(Topology::Cellular, Multiplicity::Duplicated, PathLossKind::Bounded, 2.0);
        let l = upper_tail_law(&AsymptoteRequest::new(dc, Regime::UpperTail, near)).unwrap();
        assert!(close(l.pre_constant.unwrap(), 3.0, 1e-12));
    }

    #[test]
    fn fade_ratio_constant_matches_closed_ratio_cdf() {
        // m = 1: P(h0/h1 < θ) = θ/(1+θ); m = 2: P = θ²(θ+3)/(1+θ)³
        assert!(close(fade_ratio_constant(1.0), 1.0, 1e-14));
        let t: f64 = 1e-7;
        let p2 = t * t * (t + 3.0) / (1.0 + t).powi(3);
        assert!(close(p2 / (t * t), fade_ratio_constant(2.0), 1e-6));
    }

    #[test]
    fn edge_user_is_conjectured() {
        let sc = scenario(Topology::Cellular, Multiplicity::EdgeUser, PathLossKind::Singular, 1.0);
        let req =
            AsymptoteRequest::new(sc, Regime::UpperTail, InterferenceMode::TotalInterference).with_aux(full_aux(&sc));
        let l = upper_tail_law(&req).unwrap();
        assert_eq!((l.order, l.status, l.pre_constant), (1.5, LawStatus::Conjectured, None));
    }
}
