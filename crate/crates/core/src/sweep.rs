//! Parameter sweeps from a JSON configuration to a CSV table.
//!
//! One sweep variable runs over a linear or logarithmic grid; every other
//! parameter comes from `fixed` or its default. Each row carries all inputs
//! and every derived quantity, in the order of the grid.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{Accounting, RcStage};
use crate::error::{Error, Result};
use crate::error_model::{first_passage_mc, floor_long, floor_short, required_swing_at, ErrorSpec};
use crate::format::sci;
use crate::gate::{run_cycle_with, FollowerGate, TotalVerdict};
use crate::quantities::PhysicalEnvironment;
use crate::tank::{break_even, TankCircuit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVariable {
    U1,
    C,
    T,
    #[serde(rename = "epsilon")]
    Epsilon,
    #[serde(rename = "t_o")]
    ObservationTime,
    #[serde(rename = "tau")]
    Tau,
    #[serde(rename = "q")]
    Quality,
    #[serde(rename = "e_switch")]
    SwitchEnergy,
}

impl SweepVariable {
    pub fn key(self) -> &'static str {
        match self {
            SweepVariable::U1 => "U1",
            SweepVariable::C => "C",
            SweepVariable::T => "T",
            SweepVariable::Epsilon => "epsilon",
            SweepVariable::ObservationTime => "t_o",
            SweepVariable::Tau => "tau",
            SweepVariable::Quality => "q",
            SweepVariable::SwitchEnergy => "e_switch",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub scale: Scale,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    #[serde(default)]
    pub fixed: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub output_path: String,
}

/// Parameters accepted in `fixed`, with defaults where one exists.
/// `C` and `U1` have none; `tau` defaults to `R·C`; `e_switch` (kT)
/// defaults to the short floor at ε = 1e-30.
pub const PARAMETERS: &[(&str, Option<f64>)] = &[
    ("U1", None),
    ("C", None),
    ("R", Some(1e3)),
    ("T", Some(300.0)),
    ("epsilon", Some(1e-30)),
    ("t_o", Some(3.156e7)),
    ("tau", None),
    ("q", Some(100.0)),
    ("e_switch", None),
    ("n_switch", Some(2.0)),
    ("L", Some(1e-6)),
    ("c_tank", Some(1e-12)),
    ("friction", Some(0.0)),
    ("threshold_fraction", Some(0.5)),
    ("mc_trials", Some(0.0)),
    ("mc_observations", Some(100.0)),
];

pub const COLUMNS: &[&str] = &[
    "index",
    "U1",
    "C",
    "R",
    "T",
    "epsilon",
    "t_o",
    "tau",
    "q",
    "e_switch_kt",
    "friction_kt",
    "thermal_energy_j",
    "e1_j",
    "e1_kt",
    "cycle_total_j",
    "cycle_total_kt",
    "sigma_v",
    "epsilon_gate",
    "gate_floor_kt",
    "verdict_total",
    "floor_short_j",
    "floor_short_kt",
    "floor_long_j",
    "floor_long_kt",
    "required_u1_v",
    "required_e1_kt",
    "required_ratio",
    "tank_efficiency",
    "break_even_j",
    "break_even_kt",
    "mc_epsilon_hat",
    "mc_std_err",
];

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SweepSpec =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.points < 2 {
            return bad(format!(
                "field `points`: need at least 2, got {}",
                self.points
            ));
        }
        if !self.from.is_finite() || !self.to.is_finite() || !(self.from < self.to) {
            return bad(format!(
                "fields `from`/`to`: need finite from < to, got {} and {}",
                self.from, self.to
            ));
        }
        if self.scale == Scale::Log && !(self.from > 0.0) {
            return bad(format!(
                "field `from`: log scale needs positive endpoints, got {}",
                self.from
            ));
        }
        for (key, value) in &self.fixed {
            if !PARAMETERS.iter().any(|(k, _)| k == key) {
                let known: Vec<_> = PARAMETERS.iter().map(|(k, _)| *k).collect();
                return bad(format!(
                    "field `fixed.{key}`: unknown parameter (known: {})",
                    known.join(", ")
                ));
            }
            if key == self.variable.key() {
                return bad(format!("field `fixed.{key}`: is the sweep variable"));
            }
            if !value.is_finite() {
                return bad(format!("field `fixed.{key}`: must be finite"));
            }
        }
        for required in ["C", "U1"] {
            if self.variable.key() != required && !self.fixed.contains_key(required) {
                return bad(format!("field `fixed.{required}`: required (no default)"));
            }
        }
        if self.output_path.is_empty() {
            return bad("field `output_path`: must not be empty".into());
        }
        Ok(())
    }

    /// Grid values in sweep order; endpoints are exact.
    pub fn grid(&self) -> Vec<f64> {
        let last = self.points - 1;
        (0..self.points)
            .map(|i| {
                if i == 0 {
                    self.from
                } else if i == last {
                    self.to
                } else {
                    let f = i as f64 / last as f64;
                    match self.scale {
                        Scale::Linear => self.from + (self.to - self.from) * f,
                        Scale::Log => self.from * (self.to / self.from).powf(f),
                    }
                }
            })
            .collect()
    }

    fn param(&self, key: &str, point: f64) -> Option<f64> {
        if self.variable.key() == key {
            return Some(point);
        }
        self.fixed.get(key).copied().or_else(|| {
            PARAMETERS
                .iter()
                .find(|(k, _)| *k == key)
                .and_then(|(_, d)| *d)
        })
    }
}

/// Evaluated sweep, ready for CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<Vec<String>>,
}

impl SweepTable {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(COLUMNS)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn run_sweep(spec: &SweepSpec, seed: u64, workers: Option<usize>) -> Result<SweepTable> {
    spec.validate()?;
    let grid = spec.grid();
    let eval = || -> Result<Vec<Vec<String>>> {
        grid.par_iter()
            .enumerate()
            .map(|(i, &x)| {
                evaluate_point(spec, i, x, seed).map_err(|e| {
                    Error::Config(format!(
                        "sweep point {i} ({} = {x:e}): {e}",
                        spec.variable.key()
                    ))
                })
            })
            .collect()
    };
    let rows = match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Io(e.to_string()))?
            .install(eval)?,
        None => eval()?,
    };
    Ok(SweepTable { rows })
}

fn opt(x: Option<f64>) -> String {
    x.map(sci).unwrap_or_default()
}

fn evaluate_point(spec: &SweepSpec, index: usize, point: f64, seed: u64) -> Result<Vec<String>> {
    let p = |key: &str| spec.param(key, point);
    let need = |key: &'static str| p(key).ok_or_else(|| Error::Config(format!("missing `{key}`")));

    let u1 = need("U1")?;
    let c = need("C")?;
    let r = need("R")?;
    let env = PhysicalEnvironment::new(need("T")?)?;
    let epsilon = need("epsilon")?;
    let t_o = need("t_o")?;
    let tau = p("tau").unwrap_or(r * c);
    let q = need("q")?;
    let friction_kt = need("friction")?;
    let threshold_fraction = need("threshold_fraction")?;

    let stage = RcStage::new(c, r, u1, env)?;
    let gate =
        FollowerGate::with_threshold(stage, env.kt_to_joules(friction_kt), threshold_fraction)?;
    let audit = run_cycle_with(&gate, Accounting::PerOperation)?;
    let sigma = (env.thermal_energy() / c).sqrt();

    let short = floor_short(&ErrorSpec::short(epsilon)?, &env)?;
    let long_spec = ErrorSpec::new(epsilon, t_o, tau)?;
    let long = (t_o >= tau)
        .then(|| floor_long(&long_spec, &env))
        .transpose()?;
    let swing = required_swing_at(epsilon, &stage, threshold_fraction)?;

    let e_switch_kt = p("e_switch").unwrap_or(short_floor_default());
    let tank = TankCircuit::with_quality(need("c_tank")?, need("L")?, q, 1.0)?;
    let n_switch = need("n_switch")?;
    if n_switch.fract() != 0.0 || n_switch < 2.0 || n_switch > u32::MAX as f64 {
        return Err(Error::domain(
            "n_switch",
            n_switch,
            "must be an integer >= 2",
        ));
    }
    let be = break_even(&tank, env.kt_to_joules(e_switch_kt), n_switch as u32, &env)?;

    let mc_trials = need("mc_trials")?;
    let mc = if mc_trials >= 1.0 {
        let window = need("mc_observations")?.floor() * stage.correlation_time();
        let est = first_passage_mc(
            &stage,
            threshold_fraction * u1,
            window,
            mc_trials as u64,
            seed,
        )?;
        Some((est.epsilon_hat, est.std_err))
    } else {
        None
    };

    let verdict = match audit.verdict_total {
        TotalVerdict::BelowFloor => "below-floor",
        TotalVerdict::AtOrAboveFloor => "at-or-above-floor",
        TotalVerdict::NotApplicable => "not-applicable",
    };

    Ok(vec![
        index.to_string(),
        sci(u1),
        sci(c),
        sci(r),
        sci(env.temperature()),
        sci(epsilon),
        sci(t_o),
        sci(tau),
        sci(q),
        sci(e_switch_kt),
        sci(friction_kt),
        sci(env.thermal_energy()),
        sci(stage.charge_energy()),
        sci(env.joules_to_kt(stage.charge_energy())),
        sci(audit.e_input_cycle),
        sci(audit.e_input_cycle_kt),
        sci(sigma),
        sci(audit.epsilon_per_observation),
        opt(audit.floor_short_kt),
        verdict.to_string(),
        sci(short.floor_joule),
        sci(short.floor_kt),
        opt(long.map(|f| f.floor_joule)),
        opt(long.map(|f| f.floor_kt)),
        sci(swing.u1),
        sci(swing.e1_kt),
        sci(swing.e1_kt / short.floor_kt),
        sci(be.efficiency),
        sci(be.break_even_energy),
        sci(be.break_even_energy_kt),
        opt(mc.map(|m| m.0)),
        opt(mc.map(|m| m.1)),
    ])
}

/// Default switch-control cost in kT: the short floor at ε = 1e-30.
pub fn short_floor_default() -> f64 {
    -(1e-30f64.ln())
}

/// Record written next to the CSV; feeding it back to `sweep` reproduces
/// the table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub rows: usize,
    pub columns: Vec<String>,
    pub spec: SweepSpec,
}

impl RunManifest {
    pub fn new(spec: &SweepSpec, seed: u64, rows: usize) -> Self {
        let mut spec = spec.clone();
        spec.seed = Some(seed);
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            rows,
            columns: COLUMNS.iter().map(|c| c.to_string()).collect(),
            spec,
        }
    }

    pub fn path_for(output_path: &str) -> String {
        format!("{output_path}.manifest.json")
    }
}

/// Accepts either a bare sweep config or a run manifest.
pub fn load_config(text: &str) -> Result<SweepSpec> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    if value.get("spec").is_some() && value.get("tool").is_some() {
        let manifest: RunManifest =
            serde_json::from_value(value).map_err(|e| Error::Config(format!("manifest: {e}")))?;
        manifest.spec.validate()?;
        return Ok(manifest.spec);
    }
    SweepSpec::from_json(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(json: &str) -> Result<SweepSpec> {
        SweepSpec::from_json(json)
    }

    const EPS: &str = r#"{
        "variable": "epsilon", "scale": "log", "from": 1e-30, "to": 1e-3, "points": 28,
        "fixed": {"C": 1e-15, "U1": 0.02408},
        "output_path": "out.csv"
    }"#;

    #[test]
    fn log_grid_hits_decades() {
        let s = spec(EPS).unwrap();
        let g = s.grid();
        assert_eq!(g.len(), 28);
        assert_eq!(g[0], 1e-30);
        assert_eq!(g[27], 1e-3);
        assert!((g[1] / 1e-29 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn linear_grid() {
        let s = spec(
            r#"{"variable":"T","scale":"linear","from":100,"to":400,"points":4,
            "fixed":{"C":1e-15,"U1":0.1},"output_path":"x.csv"}"#,
        )
        .unwrap();
        assert_eq!(s.grid(), vec![100.0, 200.0, 300.0, 400.0]);
    }

    #[test]
    fn floor_column_tracks_log_inverse_epsilon() {
        let s = spec(EPS).unwrap();
        let table = run_sweep(&s, 0, Some(2)).unwrap();
        let col = COLUMNS.iter().position(|c| *c == "floor_short_kt").unwrap();
        for (row, eps) in table.rows.iter().zip(s.grid()) {
            let kt: f64 = row[col].parse().unwrap();
            assert!((kt - (1.0 / eps).ln()).abs() < 1e-7 * kt, "{kt} vs {eps}");
        }
    }

    #[test]
    fn rejects_malformed_configs() {
        let cases = [
            (
                r#"{"variable":"epsilon","scale":"log","from":1e-3,"to":1e-30,"points":3,"fixed":{"C":1,"U1":1},"output_path":"o"}"#,
                "from",
            ),
            (
                r#"{"variable":"epsilon","scale":"log","from":1e-30,"to":1e-3,"points":1,"fixed":{"C":1,"U1":1},"output_path":"o"}"#,
                "points",
            ),
            (
                r#"{"variable":"U1","scale":"log","from":0,"to":1,"points":3,"fixed":{"C":1},"output_path":"o"}"#,
                "from",
            ),
            (
                r#"{"variable":"U1","scale":"linear","from":0,"to":1,"points":3,"fixed":{"C":1,"bogus":2},"output_path":"o"}"#,
                "fixed.bogus",
            ),
            (
                r#"{"variable":"U1","scale":"linear","from":0,"to":1,"points":3,"fixed":{},"output_path":"o"}"#,
                "fixed.C",
            ),
            (
                r#"{"variable":"U1","scale":"linear","from":0,"to":1,"points":3,"fixed":{"C":1,"U1":2},"output_path":"o"}"#,
                "fixed.U1",
            ),
            (
                r#"{"variable":"volts","scale":"linear","from":0,"to":1,"points":3,"output_path":"o"}"#,
                "line",
            ),
            (
                "{\n  \"variable\": \"U1\",\n  \"scale\": \"linear\",\n  \"from\": 0,,\n}",
                "line 4",
            ),
        ];
        for (json, needle) in cases {
            let err = spec(json).unwrap_err().to_string();
            assert!(err.contains(needle), "{needle:?} not in {err:?}");
        }
    }

    #[test]
    fn manifest_round_trips_to_same_spec() {
        let s = spec(EPS).unwrap();
        let m = RunManifest::new(&s, 17, 28);
        let text = serde_json::to_string_pretty(&m).unwrap();
        let back = load_config(&text).unwrap();
        assert_eq!(back.seed, Some(17));
        assert_eq!(back.grid(), s.grid());
    }

    #[test]
    fn table_is_independent_of_workers() {
        let s = spec(
            r#"{"variable":"U1","scale":"linear","from":0.005,"to":0.03,"points":6,
            "fixed":{"C":1e-15,"mc_trials":2000,"mc_observations":10},"output_path":"o"}"#,
        )
        .unwrap();
        let a = run_sweep(&s, 3, Some(1)).unwrap();
        let b = run_sweep(&s, 3, Some(5)).unwrap();
        assert_eq!(a, b);
        assert!(!a.rows[0][COLUMNS.len() - 2].is_empty());
    }
}
