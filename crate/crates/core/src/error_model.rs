//! Thermally activated bit errors and the dissipation floors they imply.
//!
//! A logic level is read against a decision threshold (by default the
//! midpoint `U1/2`) while Johnson noise of spread `σ = √(kT/C)` rides on
//! it. Observations spaced one correlation time apart count as independent
//! in the analytic model; [`first_passage_mc`] measures what that
//! independence assumption leaves out.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::RcStage;
use crate::error::{Error, Result};
use crate::noise::{trial_stream, OuProcess};
use crate::quantities::PhysicalEnvironment;
use crate::special::{inverse_upper_tail, upper_tail};

/// Decision threshold as a fraction of the swing.
pub const MIDPOINT: f64 = 0.5;

/// Estimates built on fewer expected error events than this are flagged.
pub const MIN_EXPECTED_ERRORS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorSpec {
    epsilon: f64,
    observation_time: f64,
    correlation_time: f64,
}

impl ErrorSpec {
    pub fn new(epsilon: f64, observation_time: f64, correlation_time: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        if !(observation_time >= 0.0) || !observation_time.is_finite() {
            return Err(Error::domain(
                "observation_time",
                observation_time,
                "must be >= 0 s",
            ));
        }
        if !(correlation_time > 0.0) || !correlation_time.is_finite() {
            return Err(Error::domain(
                "correlation_time",
                correlation_time,
                "must be > 0 s",
            ));
        }
        Ok(Self {
            epsilon,
            observation_time,
            correlation_time,
        })
    }

    /// Spec for the short-observation floor, where times do not enter.
    pub fn short(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, 0.0, 1.0)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn observation_time(&self) -> f64 {
        self.observation_time
    }

    pub fn correlation_time(&self) -> f64 {
        self.correlation_time
    }
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 0.5 {
        Ok(())
    } else {
        Err(Error::domain(
            "epsilon",
            epsilon,
            "must lie in the open interval (0, 0.5)",
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Short,
    Long,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FloorResult {
    pub floor_joule: f64,
    pub floor_kt: f64,
    pub regime: Regime,
}

impl FloorResult {
    fn from_kt(kt: f64, regime: Regime, env: &PhysicalEnvironment) -> Self {
        let floor_joule = env.kt_to_joules(kt);
        Self {
            floor_joule,
            floor_kt: env.joules_to_kt(floor_joule),
            regime,
        }
    }
}

/// Minimum dissipation when errors are observed within one correlation
/// time: `kT·ln(1/ε)`.
pub fn floor_short(spec: &ErrorSpec, env: &PhysicalEnvironment) -> Result<FloorResult> {
    env.require_positive_temperature()?;
    Ok(FloorResult::from_kt(-spec.epsilon.ln(), Regime::Short, env))
}

/// Minimum dissipation over an observation time `t_o ≥ τ`:
/// `kT·[ln(1/ε) + ln(t_o/τ)]`.
pub fn floor_long(spec: &ErrorSpec, env: &PhysicalEnvironment) -> Result<FloorResult> {
    env.require_positive_temperature()?;
    if spec.observation_time < spec.correlation_time {
        return Err(Error::domain(
            "observation_time",
            spec.observation_time,
            "must be >= the correlation time for the long-observation floor",
        ));
    }
    let kt = -spec.epsilon.ln() + (spec.observation_time / spec.correlation_time).ln();
    Ok(FloorResult::from_kt(kt, Regime::Long, env))
}

/// Probability that a zero-mean Gaussian level of spread `sigma` reads
/// above `threshold`.
pub fn instantaneous_error_prob(threshold: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::domain("sigma", sigma, "must be > 0 V"));
    }
    Ok(upper_tail(threshold / sigma))
}

/// Probability of at least one error in `n_observations` independent looks.
pub fn multi_sample_error(per_sample: f64, n_observations: u64) -> Result<f64> {
    if !(0.0..=1.0).contains(&per_sample) {
        return Err(Error::domain(
            "per_sample",
            per_sample,
            "must lie in [0, 1]",
        ));
    }
    if n_observations == 0 {
        return Err(Error::domain("n_observations", 0.0, "must be >= 1"));
    }
    if per_sample == 1.0 {
        return Ok(1.0);
    }
    Ok(-(n_observations as f64 * (-per_sample).ln_1p()).exp_m1())
}

/// Swing that meets an error target, and what charging to it costs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwingRequirement {
    pub u1: f64,
    pub e1_joule: f64,
    pub e1_kt: f64,
}

/// Smallest swing whose per-observation error at the midpoint threshold
/// is `epsilon`: `U1 = 2σ·Φ̄⁻¹(ε)`, so `E1 = 2kT·[Φ̄⁻¹(ε)]²`.
pub fn required_swing(epsilon: f64, stage: &RcStage) -> Result<SwingRequirement> {
    required_swing_at(epsilon, stage, MIDPOINT)
}

/// [`required_swing`] with the threshold at `threshold_fraction · U1`.
pub fn required_swing_at(
    epsilon: f64,
    stage: &RcStage,
    threshold_fraction: f64,
) -> Result<SwingRequirement> {
    check_epsilon(epsilon)?;
    check_threshold_fraction(threshold_fraction)?;
    let noise = OuProcess::from_stage(stage)?;
    let u1 = noise.stationary_sigma() * inverse_upper_tail(epsilon) / threshold_fraction;
    let sized = stage.with_swing(u1)?;
    let e1_joule = sized.charge_energy();
    Ok(SwingRequirement {
        u1,
        e1_joule,
        e1_kt: stage.env().joules_to_kt(e1_joule),
    })
}

pub(crate) fn check_threshold_fraction(f: f64) -> Result<()> {
    if f > 0.0 && f < 1.0 {
        Ok(())
    } else {
        Err(Error::domain("threshold_fraction", f, "must lie in (0, 1)"))
    }
}

/// Monte Carlo estimate of the probability that the noise crosses a
/// threshold at least once during an observation window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstPassageEstimate {
    pub epsilon_hat: f64,
    pub std_err: f64,
    pub trials: u64,
    pub errors_observed: u64,
    pub n_observations: u64,
    pub seed: u64,
    /// `multi_sample_error(Φ̄(threshold/σ), n_observations)`.
    pub analytic_prediction: f64,
    pub expected_errors: f64,
    pub low_confidence: bool,
}

/// Number of observation instants `k·τ`, `k = 1..`, inside `t_o`.
pub fn observation_count(observation_time: f64, correlation_time: f64) -> u64 {
    let ratio = observation_time / correlation_time;
    // absorb rounding in t_o = n·τ
    (ratio * (1.0 + 1e-12)).floor() as u64
}

/// Starts each trial from the stationary law, observes the capacitor
/// voltage at `k·τ` for `k = 1..=⌊t_o/τ⌋`, and counts trials with at least
/// one observation above `threshold`. Runs on the global thread pool.
pub fn first_passage_mc(
    stage: &RcStage,
    threshold: f64,
    observation_time: f64,
    trials: u64,
    seed: u64,
) -> Result<FirstPassageEstimate> {
    first_passage_mc_with_workers(stage, threshold, observation_time, trials, seed, None)
}

/// [`first_passage_mc`] on a dedicated pool of `workers` threads. The
/// result does not depend on `workers`.
pub fn first_passage_mc_with_workers(
    stage: &RcStage,
    threshold: f64,
    observation_time: f64,
    trials: u64,
    seed: u64,
    workers: Option<usize>,
) -> Result<FirstPassageEstimate> {
    let noise = OuProcess::from_stage(stage)?;
    let tau = noise.correlation_time();
    if trials == 0 {
        return Err(Error::domain("trials", 0.0, "must be >= 1"));
    }
    if !(observation_time >= tau) || !observation_time.is_finite() {
        return Err(Error::domain(
            "observation_time",
            observation_time,
            "must be >= the correlation time R·C",
        ));
    }
    let n_obs = observation_count(observation_time, tau);

    let trial_fails = |trial: u64| {
        let mut rng = trial_stream(seed, trial);
        let mut v = noise.sample_stationary(&mut rng);
        (0..n_obs).any(|_| {
            v = noise.step(v, tau, StandardNormal.sample(&mut rng));
            v > threshold
        })
    };
    let count = || {
        (0..trials)
            .into_par_iter()
            .filter(|&i| trial_fails(i))
            .count() as u64
    };
    let errors_observed = match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Io(e.to_string()))?
            .install(count),
        None => count(),
    };

    let epsilon_hat = errors_observed as f64 / trials as f64;
    let std_err = (epsilon_hat * (1.0 - epsilon_hat) / trials as f64).sqrt();
    let per_sample = instantaneous_error_prob(threshold, noise.stationary_sigma())?;
    let analytic_prediction = multi_sample_error(per_sample, n_obs)?;
    let expected_errors = analytic_prediction * trials as f64;
    Ok(FirstPassageEstimate {
        epsilon_hat,
        std_err,
        trials,
        errors_observed,
        n_observations: n_obs,
        seed,
        analytic_prediction,
        expected_errors,
        low_confidence: expected_errors < MIN_EXPECTED_ERRORS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn room() -> PhysicalEnvironment {
        PhysicalEnvironment::room()
    }

    fn short_kt(eps: f64) -> f64 {
        floor_short(&ErrorSpec::short(eps).unwrap(), &room())
            .unwrap()
            .floor_kt
    }

    #[test]
    fn short_floor_examples() {
        let just_below_half = 0.5 - 1e-12;
        assert!((short_kt(just_below_half) - std::f64::consts::LN_2).abs() < 1e-9);
        assert!((short_kt(1e-30) - 69.077_552_789_821_37).abs() < 1e-9);
        assert!((short_kt((-1.0f64).exp()) - 1.0).abs() < 1e-15);
        let r = floor_short(&ErrorSpec::short(1e-30).unwrap(), &room()).unwrap();
        assert_eq!(r.regime, Regime::Short);
        assert_eq!(r.floor_kt, room().joules_to_kt(r.floor_joule));
    }

    #[test]
    fn epsilon_domain_is_open() {
        for eps in [0.0, 0.5, 0.7, -1e-3, f64::NAN] {
            assert!(ErrorSpec::short(eps).is_err(), "{eps}");
        }
    }

    #[test]
    fn long_floor_examples() {
        let at_tau = ErrorSpec::new(1e-9, 1e-10, 1e-10).unwrap();
        let long = floor_long(&at_tau, &room()).unwrap();
        let short = floor_short(&at_tau, &room()).unwrap();
        assert!((long.floor_kt - short.floor_kt).abs() < 1e-12);
        assert_eq!(long.regime, Regime::Long);

        let year = ErrorSpec::new(1e-25, 3.156e7, 1e-10).unwrap();
        let kt = floor_long(&year, &room()).unwrap().floor_kt;
        assert!((kt - 97.86).abs() < 0.01, "{kt}");

        let doubled = ErrorSpec::new(1e-25, 2.0 * 3.156e7, 1e-10).unwrap();
        let diff = floor_long(&doubled, &room()).unwrap().floor_kt - kt;
        assert!((diff - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn long_floor_rejects_short_windows() {
        let spec = ErrorSpec::new(1e-9, 1e-11, 1e-10).unwrap();
        assert!(floor_long(&spec, &room()).is_err());
    }

    #[test]
    fn single_observation_error() {
        let s = 1.7e-3;
        assert_eq!(instantaneous_error_prob(0.0, s).unwrap(), 0.5);
        let p3 = instantaneous_error_prob(3.0 * s, s).unwrap();
        assert!((p3 - 1.349_898_031_630_094_5e-3).abs() < 1e-15);
        let p5 = instantaneous_error_prob(5.0 * s, s).unwrap();
        assert!((p5 / 2.866_515_718_791_939e-7 - 1.0).abs() < 1e-12);
        assert!(instantaneous_error_prob(1.0, 0.0).is_err());
        assert!(instantaneous_error_prob(1.0, -1.0).is_err());
    }

    #[test]
    fn repeated_observations() {
        assert_eq!(multi_sample_error(0.013, 1).unwrap(), 0.013);
        let a = multi_sample_error(1e-9, 1_000_000).unwrap();
        // 1 - exp(1e6·ln(1 - 1e-9))
        assert!((a - 9.995_001_666_e-4).abs() < 1e-12, "{a}");
        let b = multi_sample_error(1.3499e-3, 100).unwrap();
        assert!((b - 0.126_347).abs() < 1e-5, "{b}");
        assert_eq!(multi_sample_error(1.0, 7).unwrap(), 1.0);
        assert_eq!(multi_sample_error(0.0, 7).unwrap(), 0.0);
        assert!(multi_sample_error(1.1, 1).is_err());
        assert!(multi_sample_error(0.1, 0).is_err());
    }

    #[test]
    fn swing_for_three_sigma() {
        let stage = RcStage::new(1e-15, 1e3, 0.0, room()).unwrap();
        let req = required_swing(1.3499e-3, &stage).unwrap();
        assert!((req.u1 - 12.21e-3).abs() < 0.01e-3, "{}", req.u1);
        assert!((req.e1_kt - 18.0).abs() < 1e-4, "{}", req.e1_kt);
    }

    #[test]
    fn swing_vanishes_at_chance() {
        let stage = RcStage::new(1e-15, 1e3, 0.0, room()).unwrap();
        let req = required_swing(0.5 - 1e-12, &stage).unwrap();
        assert!(req.u1 < 1e-13);
        assert!(required_swing(0.5, &stage).is_err());
    }

    #[test]
    fn swing_ratio_near_asymptote() {
        let stage = RcStage::new(1e-15, 1e3, 0.0, room()).unwrap();
        let req = required_swing(1e-30, &stage).unwrap();
        let ratio = req.e1_kt / short_kt(1e-30);
        assert!((ratio - 3.805_110_5).abs() < 1e-6, "{ratio}");
    }

    #[test]
    fn observation_count_tolerates_rounding() {
        let tau = 1e-9 * 1e6 * 1e-15 / 1e-15 / 1e6;
        assert_eq!(observation_count(100.0 * tau, tau), 100);
        assert_eq!(observation_count(10.5 * tau, tau), 10);
    }

    #[test]
    fn mc_coin_flip_at_zero_threshold() {
        let stage = RcStage::new(1e-15, 1e3, 0.0, room()).unwrap();
        let tau = stage.correlation_time();
        let est = first_passage_mc(&stage, 0.0, 3.0 * tau, 20_000, 11).unwrap();
        assert_eq!(est.n_observations, 3);
        // independent fair coins give 0.875; positive correlation lowers it
        let expected = 1.0 - 0.5f64.powi(3);
        assert!(est.epsilon_hat <= expected + 3.0 * est.std_err);
        assert!(est.epsilon_hat > 0.75);
    }

    #[test]
    fn mc_single_observation_is_unbiased() {
        let stage = RcStage::new(1e-15, 1e3, 0.0, room()).unwrap();
        let sigma = OuProcess::from_stage(&stage).unwrap().stationary_sigma();
        let est = first_passage_mc(&stage, sigma, stage.correlation_time(), 100_000, 5).unwrap();
        let want = upper_tail(1.0);
        assert!((est.epsilon_hat - want).abs() < 4.0 * est.std_err);
    }

    #[test]
    fn mc_is_deterministic_across_workers() {
        let stage = RcStage::new(1e-15, 1e3, 0.0, room()).unwrap();
        let sigma = OuProcess::from_stage(&stage).unwrap().stationary_sigma();
        let t_o = 10.0 * stage.correlation_time();
        let a = first_passage_mc_with_workers(&stage, 2.0 * sigma, t_o, 5000, 99, Some(1)).unwrap();
        let b = first_passage_mc_with_workers(&stage, 2.0 * sigma, t_o, 5000, 99, Some(4)).unwrap();
        let c = first_passage_mc(&stage, 2.0 * sigma, t_o, 5000, 99).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn mc_flags_thin_budgets() {
        let stage = RcStage::new(1e-15, 1e3, 0.0, room()).unwrap();
        let sigma = OuProcess::from_stage(&stage).unwrap().stationary_sigma();
        let est = first_passage_mc(&stage, 6.0 * sigma, stage.correlation_time(), 1000, 1).unwrap();
        assert!(est.low_confidence);
        assert_eq!(est.errors_observed, 0);
    }

    #[test]
    fn mc_preconditions() {
        let stage = RcStage::new(1e-15, 1e3, 0.0, room()).unwrap();
        let tau = stage.correlation_time();
        assert!(first_passage_mc(&stage, 0.0, tau, 0, 1).is_err());
        assert!(first_passage_mc(&stage, 0.0, 0.5 * tau, 10, 1).is_err());
    }
}
