//! Agreement between the three computation routes, plus reference values
//! frozen from an independent 40-digit covariance-matrix evaluation.

use std::f64::consts::PI;

use approx::assert_relative_eq;
use proptest::prelude::*;
use su11_core::closed_form;
use su11_core::fock::FockOracle;
use su11_core::{run_interferometer, InterferometerConfig, Mode};

/// `(g1, g2, theta, ts2, ti2, n_i, mean, variance)`
type Frozen = (f64, f64, f64, f64, f64, f64, f64, f64);

const FROZEN: [Frozen; 4] = [
    (
        0.2,
        0.1,
        PI / 3.0,
        0.64,
        0.36,
        1.0,
        0.08619295704893623,
        0.09203130604156036,
    ),
    (
        0.1,
        0.1,
        0.0,
        1.0,
        1.0,
        0.0,
        0.040536185919227405,
        0.042179368288105576,
    ),
    (
        0.3,
        0.25,
        2.0,
        0.25,
        0.81,
        4.0,
        0.2625286232035709,
        0.2913204665826751,
    ),
    (
        0.45,
        0.2,
        1.3,
        0.156,
        0.42,
        1e4,
        703.06619441372,
        834.9641799828156,
    ),
];

fn frozen_configs() -> impl Iterator<Item = (InterferometerConfig, f64, f64)> {
    FROZEN
        .into_iter()
        .map(|(g1, g2, theta, ts2, ti2, n_i, mean, var)| {
            let cfg = InterferometerConfig::default()
                .with_gains(g1, g2)
                .with_theta(theta)
                .with_power_transmission(ts2, ti2)
                .with_seed(n_i);
            (cfg, mean, var)
        })
}

#[test]
fn gaussian_engine_matches_frozen_moments() {
    for (cfg, mean, var) in frozen_configs() {
        let stats = run_interferometer(&cfg).unwrap().photon_stats(Mode::Signal);
        assert_relative_eq!(stats.mean, mean, max_relative = 1e-12);
        assert_relative_eq!(stats.variance, var, max_relative = 1e-12);
    }
}

#[test]
fn closed_form_matches_frozen_means() {
    for (cfg, mean, _) in frozen_configs() {
        assert_relative_eq!(closed_form::mean_signal(&cfg), mean, max_relative = 1e-12);
    }
}

#[test]
fn fock_oracle_matches_frozen_moments_in_regime() {
    let oracle = FockOracle::default();
    for (cfg, mean, var) in frozen_configs().filter(|(c, _, _)| c.n_i <= 4.0 && c.g1 <= 0.3) {
        let run = oracle.pipeline(&cfg).unwrap();
        assert_relative_eq!(run.signal.mean, mean, max_relative = 1e-7);
        assert_relative_eq!(run.signal.variance, var, max_relative = 1e-6);
        assert_relative_eq!(run.trace, 1.0, epsilon = 1e-9);
    }
}

#[test]
fn idler_statistics_agree_too() {
    let (cfg, _, _) = frozen_configs().next().unwrap();
    let fock = FockOracle::default().pipeline(&cfg).unwrap();
    let gauss = run_interferometer(&cfg).unwrap().photon_stats(Mode::Idler);
    assert_relative_eq!(fock.idler.mean, gauss.mean, max_relative = 1e-7);
    assert_relative_eq!(fock.idler.variance, gauss.variance, max_relative = 1e-6);
}

#[test]
fn doubling_the_cutoff_changes_nothing() {
    let cfg = InterferometerConfig::default()
        .with_gains(0.3, 0.3)
        .with_theta(0.7)
        .with_power_transmission(0.5, 0.8)
        .with_seed(2.0);
    let small = FockOracle::with_cutoff(32).pipeline(&cfg).unwrap();
    let large = FockOracle::with_cutoff(64).pipeline(&cfg).unwrap();
    assert_eq!((small.cutoff, large.cutoff), (32, 64));
    assert!((small.signal.mean - large.signal.mean).abs() < 1e-8);
    assert!((small.signal.variance - large.signal.variance).abs() < 1e-8);
}

fn oracle_regime() -> impl Strategy<Value = InterferometerConfig> {
    (
        0.0..=0.3f64,
        0.0..=0.3f64,
        0.0..(2.0 * PI),
        0.1..=1.0f64,
        0.1..=1.0f64,
        0.0..=4.0f64,
    )
        .prop_map(|(g1, g2, theta, t_s, t_i, n_i)| InterferometerConfig {
            g1,
            g2,
            theta,
            t_s,
            t_i,
            n_i,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn three_routes_agree(cfg in oracle_regime()) {
        let closed = closed_form::mean_signal(&cfg);
        let gauss = run_interferometer(&cfg).unwrap().photon_stats(Mode::Signal);
        let fock = FockOracle::default().pipeline(&cfg).unwrap();
        let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-300);
        prop_assert!(rel(closed, gauss.mean) < 1e-10 || (closed - gauss.mean).abs() < 1e-12);
        prop_assert!(rel(fock.signal.mean, closed) < 1e-7 || (fock.signal.mean - closed).abs() < 1e-9);
        prop_assert!(rel(fock.signal.variance, gauss.variance) < 1e-6 || (fock.signal.variance - gauss.variance).abs() < 1e-9);
    }
}
