//! Follower-gate audit: mechanical friction against input charging.
//!
//! The friction loss per logic transition is an external input (for a
//! cantilever gate it is what gets measured). The electrical side follows
//! from the input stage: each 0 ⇒ 1 ⇒ 0 cycle dissipates `C·U1²`, and the
//! swing sets the per-observation error probability.

use serde::{Deserialize, Serialize};

use crate::circuit::{Accounting, RcStage};
use crate::error::{Error, Result};
use crate::error_model::{
    check_threshold_fraction, floor_short, instantaneous_error_prob, ErrorSpec, MIDPOINT,
};
use crate::noise::OuProcess;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FollowerGate {
    stage: RcStage,
    friction_energy_per_transition: f64,
    threshold_fraction: f64,
}

impl FollowerGate {
    pub fn new(stage: RcStage, friction_energy_per_transition: f64) -> Result<Self> {
        Self::with_threshold(stage, friction_energy_per_transition, MIDPOINT)
    }

    pub fn with_threshold(
        stage: RcStage,
        friction_energy_per_transition: f64,
        threshold_fraction: f64,
    ) -> Result<Self> {
        let f = friction_energy_per_transition;
        if !(f >= 0.0) || !f.is_finite() {
            return Err(Error::domain(
                "friction_energy_per_transition",
                f,
                "must be >= 0 J",
            ));
        }
        check_threshold_fraction(threshold_fraction)?;
        Ok(Self {
            stage,
            friction_energy_per_transition: f,
            threshold_fraction,
        })
    }

    pub fn stage(&self) -> &RcStage {
        &self.stage
    }

    pub fn friction_energy_per_transition(&self) -> f64 {
        self.friction_energy_per_transition
    }

    pub fn threshold_fraction(&self) -> f64 {
        self.threshold_fraction
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrictionVerdict {
    #[serde(rename = "sub-kT")]
    SubKt,
    #[serde(rename = "above-kT")]
    AboveKt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TotalVerdict {
    BelowFloor,
    AtOrAboveFloor,
    /// No bit is held (`ε` not below 0.5), so no floor applies.
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClaimVerdict {
    Consistent,
    NeglectsInputCharging,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub temperature: f64,
    pub thermal_energy: f64,
    pub e_friction_cycle: f64,
    pub e_friction_cycle_kt: f64,
    pub e_input_cycle: f64,
    pub e_input_cycle_kt: f64,
    pub e_total_cycle: f64,
    pub e_total_cycle_kt: f64,
    pub epsilon_per_observation: f64,
    pub floor_short_kt: Option<f64>,
    /// Which share of the cycle total `verdict_total` compares to the floor.
    pub accounting: Accounting,
    pub e_compared_kt: f64,
    pub verdict_friction_only: FrictionVerdict,
    pub verdict_total: TotalVerdict,
}

/// Runs one full cycle with per-operation accounting.
pub fn run_cycle(gate: &FollowerGate) -> Result<AuditReport> {
    run_cycle_with(gate, Accounting::PerOperation)
}

pub fn run_cycle_with(gate: &FollowerGate, accounting: Accounting) -> Result<AuditReport> {
    let stage = &gate.stage;
    let env = stage.env();
    env.require_positive_temperature()?;
    let noise = OuProcess::from_stage(stage)?;

    let e_friction_cycle = 2.0 * gate.friction_energy_per_transition;
    let e_input_cycle = stage.full_cycle_dissipation().total_dissipated;
    let e_total_cycle = e_friction_cycle + e_input_cycle;

    let threshold = gate.threshold_fraction * stage.swing_voltage();
    let epsilon = instantaneous_error_prob(threshold, noise.stationary_sigma())?;
    let floor_short_kt = ErrorSpec::short(epsilon)
        .ok()
        .map(|spec| floor_short(&spec, env).map(|f| f.floor_kt))
        .transpose()?;

    let e_compared_kt = env.joules_to_kt(accounting.apply(e_total_cycle));
    let verdict_total = match floor_short_kt {
        None => TotalVerdict::NotApplicable,
        Some(floor) if e_compared_kt < floor => TotalVerdict::BelowFloor,
        Some(_) => TotalVerdict::AtOrAboveFloor,
    };
    let verdict_friction_only = if gate.friction_energy_per_transition < env.thermal_energy() {
        FrictionVerdict::SubKt
    } else {
        FrictionVerdict::AboveKt
    };

    Ok(AuditReport {
        temperature: env.temperature(),
        thermal_energy: env.thermal_energy(),
        e_friction_cycle,
        e_friction_cycle_kt: env.joules_to_kt(e_friction_cycle),
        e_input_cycle,
        e_input_cycle_kt: env.joules_to_kt(e_input_cycle),
        e_total_cycle,
        e_total_cycle_kt: env.joules_to_kt(e_total_cycle),
        epsilon_per_observation: epsilon,
        floor_short_kt,
        accounting,
        e_compared_kt,
        verdict_friction_only,
        verdict_total,
    })
}

/// Checks a claimed energy per logic operation against the gate's real
/// per-operation cost, half of the full-cycle total.
pub fn audit_claim(gate: &FollowerGate, claimed_energy_per_op: f64) -> Result<ClaimVerdict> {
    if !(claimed_energy_per_op >= 0.0) {
        return Err(Error::domain(
            "claimed_energy_per_op",
            claimed_energy_per_op,
            "must be >= 0 J",
        ));
    }
    let e_friction_cycle = 2.0 * gate.friction_energy_per_transition;
    let e_input_cycle = gate.stage.full_cycle_dissipation().total_dissipated;
    let per_op = Accounting::PerOperation.apply(e_friction_cycle + e_input_cycle);
    if claimed_energy_per_op < per_op && e_input_cycle > 0.0 {
        Ok(ClaimVerdict::NeglectsInputCharging)
    } else {
        Ok(ClaimVerdict::Consistent)
    }
}
