use proptest::prelude::*;
use sirtail::analytic::ps_exact_adhoc_singular_ppp_rayleigh;
use sirtail::battery::BatteryParams;
use sirtail::engine::{batch_simulate, required_window_radius, DEFAULT_REL_TOL};
use sirtail::estimator::{estimate_ccdf, fit_power_tail, Statistic, ThetaGrid};
use sirtail::model::{FadingModel, Multiplicity, NetworkScenario, PathLossModel, Regime, Topology};
use sirtail::process::Window;

fn adhoc() -> NetworkScenario {
    NetworkScenario::new(
        Topology::AdHoc,
        Multiplicity::Simple,
        PathLossModel::singular(4.0).unwrap(),
        FadingModel::RAYLEIGH,
    )
}

fn window(sc: &NetworkScenario) -> Window {
    Window::new(required_window_radius(sc, DEFAULT_REL_TOL).unwrap()).unwrap()
}

#[test]
fn samples_do_not_depend_on_thread_count() {
    let sc = adhoc();
    let w = window(&sc);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| batch_simulate(&sc, w, 50_000, 3).unwrap())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn simulate_estimate_fit() {
    let sc = adhoc();
    let samples = batch_simulate(&sc, window(&sc), 200_000, 21).unwrap();
    let grid = ThetaGrid::new(1e-3, 1.0, 10).unwrap().points();
    let est = estimate_ccdf(&samples, &grid, Statistic::Sir, 0.99).unwrap();
    for (i, &t) in grid.iter().enumerate() {
        let exact = ps_exact_adhoc_singular_ppp_rayleigh(t, 1.0, 1.0, 4.0).unwrap();
        // 0.99 bands plus a little slack for the many simultaneous checks
        let pad = 0.5 * (est.ci_high[i] - est.ci_low[i]);
        assert!(
            exact >= est.ci_low[i] - pad && exact <= est.ci_high[i] + pad,
            "theta {t}"
        );
    }
    let f = fit_power_tail(&est, Regime::LowerTail, (1e-3, 1e-2)).unwrap();
    assert!((f.exponent - 0.5).abs() < 0.1, "{}", f.exponent);
}

#[test]
fn every_matrix_scenario_orders_sir_below_sir0() {
    let params = BatteryParams::default();
    for sc in params.matrix_scenarios().unwrap() {
        let samples = batch_simulate(&sc, window(&sc), 2_000, 5).unwrap();
        for s in samples {
            assert!(s.sir > 0.0 && s.sir <= s.sir0, "{}: {s:?}", sc.label());
            assert!(s.interference >= s.nearest_interference);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn ccdf_is_a_survival_function(lambda in 0.5f64..2.0, alpha in 3.0f64..6.0, seed in 0u64..1000) {
        let sc = adhoc().with_lambda(lambda);
        let sc = NetworkScenario { path_loss: PathLossModel::singular(alpha).unwrap(), ..sc };
        let samples = batch_simulate(&sc, window(&sc), 2_000, seed).unwrap();
        let grid = ThetaGrid::new(1e-3, 1e3, 5).unwrap().points();
        for which in [Statistic::Sir, Statistic::Sir0] {
            let e = estimate_ccdf(&samples, &grid, which, 0.95).unwrap();
            prop_assert!(e.p_hat.windows(2).all(|p| p[1] <= p[0]));
            prop_assert!(e.p_hat.iter().all(|p| (0.0..=1.0).contains(p)));
        }
    }
}
