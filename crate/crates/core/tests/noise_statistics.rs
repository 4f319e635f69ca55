mod common;

use common::{autocorrelation, ks_critical_1pct, ks_distance_normal, pearson};
use ktfloor::noise::trial_stream;
use ktfloor::{OuProcess, PhysicalEnvironment, RcStage};

fn process() -> OuProcess {
    let stage = RcStage::new(1e-15, 1e6, 0.0, PhysicalEnvironment::room()).unwrap();
    OuProcess::from_stage(&stage).unwrap()
}

#[test]
fn independent_draws_pass_variance_and_ks() {
    let p = process();
    let tau = p.correlation_time();
    let sigma = p.stationary_sigma();
    let n = 1_000_000;
    // steps of 10τ leave e^-10 correlation
    let path = p.sample_stationary_path(10.0 * tau, n, 2024).unwrap();
    let var = path.samples.iter().map(|v| v * v).sum::<f64>() / n as f64;
    let se = sigma * sigma * (2.0 / n as f64).sqrt();
    assert!(
        (var - sigma * sigma).abs() < 3.0 * se,
        "var {var:e}, sigma² {:e}",
        sigma * sigma
    );

    let d = ks_distance_normal(&path.samples, sigma);
    assert!(d < ks_critical_1pct(n), "KS D = {d}");
}

#[test]
fn autocorrelation_follows_exponential() {
    let p = process();
    let tau = p.correlation_time();
    let path = p.sample_stationary_path(0.5 * tau, 10_000_000, 7).unwrap();
    for (lag, delta) in [(1, 0.5f64), (2, 1.0), (4, 2.0)] {
        let rho = autocorrelation(&path.samples, lag);
        let want = (-delta).exp();
        assert!((rho - want).abs() < 0.01, "lag {delta}τ: {rho} vs {want}");
    }
}

#[test]
fn distinct_seeds_are_uncorrelated() {
    let p = process();
    let dt = 3.0 * p.correlation_time();
    let a = p.sample_stationary_path(dt, 1_000_000, 1).unwrap();
    let b = p.sample_stationary_path(dt, 1_000_000, 2).unwrap();
    assert!(pearson(&a.samples, &b.samples).abs() < 0.01);
}

#[test]
fn one_step_mean_decays_from_start() {
    let p = process();
    let tau = p.correlation_time();
    let x = 5e-3;
    let seeds = 100_000u64;
    let sum: f64 = (0..seeds)
        .map(|s| p.sample_path(tau, 1, s, x).unwrap().samples[0])
        .sum();
    let mean = sum / seeds as f64;
    let want = x * (-1.0f64).exp();
    // spread of one step is σ·sqrt(1 - e^-2)
    let se = p.stationary_sigma() * (1.0 - (-2.0f64).exp()).sqrt() / (seeds as f64).sqrt();
    assert!((mean - want).abs() < 4.0 * se, "{mean:e} vs {want:e}");
}

#[test]
fn huge_step_reaches_stationary_law() {
    let p = process();
    let sigma = p.stationary_sigma();
    let n = 200_000;
    let samples: Vec<f64> = (0..n)
        .map(|s| p.sample_path(1.0, 1, s, 0.3).unwrap().samples[0])
        .collect();
    assert!(ks_distance_normal(&samples, sigma) < ks_critical_1pct(n as usize));
}

#[test]
fn trial_streams_do_not_depend_on_order() {
    use rand::Rng;
    let forward: Vec<u64> = (0..50).map(|t| trial_stream(9, t).random()).collect();
    let backward: Vec<u64> = (0..50).rev().map(|t| trial_stream(9, t).random()).collect();
    let mut backward = backward;
    backward.reverse();
    assert_eq!(forward, backward);
}

#[test]
fn zero_noise_is_partition_invariant() {
    let p = OuProcess::new(0.0, 2e-9).unwrap();
    let v0 = 1.3;
    for parts in [1usize, 2, 3, 7, 64] {
        let dt = 5e-9 / parts as f64;
        let path = p.sample_path(dt, parts, 0, v0).unwrap();
        let end = *path.samples.last().unwrap();
        let want = v0 * (-2.5f64).exp();
        assert!(
            (end - want).abs() < 64.0 * f64::EPSILON * v0,
            "{parts}: {end} vs {want}"
        );
    }
}
