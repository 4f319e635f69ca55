//! Johnson noise on the input capacitance as an Ornstein–Uhlenbeck process.
//!
//! The capacitor node carries equipartition variance `kT/C`; the resistor
//! enters only through the correlation time `τ = R·C`. Updates use the
//! exact OU transition density, so any step size is bias free.
//!
//! Random draws come from ChaCha8 streams keyed by `(seed, trial)`: each
//! trial owns its stream, and results do not depend on how trials are
//! scheduled across threads.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::circuit::RcStage;
use crate::error::{Error, Result};
use crate::format::sci;

/// Independent random stream for one trial of a seeded experiment.
pub fn trial_stream(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OuProcess {
    stationary_sigma: f64,
    correlation_time: f64,
}

impl OuProcess {
    pub fn new(stationary_sigma: f64, correlation_time: f64) -> Result<Self> {
        if !(stationary_sigma >= 0.0) || !stationary_sigma.is_finite() {
            return Err(Error::domain(
                "stationary_sigma",
                stationary_sigma,
                "must be >= 0 V",
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
            stationary_sigma,
            correlation_time,
        })
    }

    /// Thermal noise of `stage`: `σ = √(kT/C)`, `τ = R·C`. Fails at `T = 0`;
    /// see [`OuProcess::from_stage_zero_temperature`].
    pub fn from_stage(stage: &RcStage) -> Result<Self> {
        stage.env().require_positive_temperature()?;
        Self::from_stage_zero_temperature(stage)
    }

    /// Like [`OuProcess::from_stage`] but accepts `T = 0`, giving a
    /// deterministic relaxation with `σ = 0`.
    pub fn from_stage_zero_temperature(stage: &RcStage) -> Result<Self> {
        let sigma = (stage.env().thermal_energy() / stage.capacitance()).sqrt();
        Self::new(sigma, stage.correlation_time())
    }

    pub fn stationary_sigma(&self) -> f64 {
        self.stationary_sigma
    }

    pub fn correlation_time(&self) -> f64 {
        self.correlation_time
    }

    /// Exact update over `dt`:
    /// `v·e^{−dt/τ} + σ·√(1 − e^{−2dt/τ})·z`.
    pub fn step(&self, v: f64, dt: f64, gaussian_draw: f64) -> f64 {
        let x = dt / self.correlation_time;
        let spread = self.stationary_sigma * (-(-2.0 * x).exp_m1()).sqrt();
        v * (-x).exp() + spread * gaussian_draw
    }

    /// A draw from the stationary law `N(0, σ²)`.
    pub fn sample_stationary<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        self.stationary_sigma * z
    }

    /// `n` successive samples at spacing `dt`, starting from `v0` (which is
    /// not itself recorded).
    pub fn sample_path(&self, dt: f64, n: usize, seed: u64, v0: f64) -> Result<NoisePath> {
        let mut rng = self.check_path(dt, n, seed)?;
        Ok(self.fill_path(dt, n, seed, v0, &mut rng))
    }

    /// As [`OuProcess::sample_path`] but with `v0` drawn from the
    /// stationary distribution on the same stream.
    pub fn sample_stationary_path(&self, dt: f64, n: usize, seed: u64) -> Result<NoisePath> {
        let mut rng = self.check_path(dt, n, seed)?;
        let v0 = self.sample_stationary(&mut rng);
        Ok(self.fill_path(dt, n, seed, v0, &mut rng))
    }

    fn check_path(&self, dt: f64, n: usize, seed: u64) -> Result<ChaCha8Rng> {
        if n == 0 {
            return Err(Error::domain("n", 0.0, "path length must be >= 1"));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::domain("dt", dt, "must be > 0 s"));
        }
        Ok(trial_stream(seed, 0))
    }

    fn fill_path(&self, dt: f64, n: usize, seed: u64, v0: f64, rng: &mut ChaCha8Rng) -> NoisePath {
        let mut v = v0;
        let samples = (0..n)
            .map(|_| {
                v = self.step(v, dt, StandardNormal.sample(rng));
                v
            })
            .collect();
        NoisePath { dt, samples, seed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoisePath {
    pub dt: f64,
    pub samples: Vec<f64>,
    pub seed: u64,
}

impl NoisePath {
    /// Writes `t,V` rows; sample `k` sits at `t = (k + 1)·dt`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "V"])?;
        for (k, v) in self.samples.iter().enumerate() {
            w.write_record([sci((k + 1) as f64 * self.dt), sci(*v)])?;
        }
        w.flush()?;
        Ok(())
    }
}
