//! Energetics of the switched R–C input stage.
//!
//! Switch S1 connects the input capacitance `C` to the supply `U1` through
//! the closed-switch resistance `R`; switch S2 resets it to ground through
//! an equal resistance. Switches are ideal: zero transition time, `R` when
//! closed, open circuit otherwise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantities::PhysicalEnvironment;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RcStage {
    capacitance: f64,
    resistance: f64,
    swing_voltage: f64,
    env: PhysicalEnvironment,
}

impl RcStage {
    pub fn new(
        capacitance: f64,
        resistance: f64,
        swing_voltage: f64,
        env: PhysicalEnvironment,
    ) -> Result<Self> {
        if !(capacitance > 0.0) || !capacitance.is_finite() {
            return Err(Error::domain("capacitance", capacitance, "must be > 0 F"));
        }
        // R = 0 is singular for an ideal source, not lossless.
        if !(resistance > 0.0) || !resistance.is_finite() {
            return Err(Error::domain("resistance", resistance, "must be > 0 ohm"));
        }
        if !(swing_voltage >= 0.0) || !swing_voltage.is_finite() {
            return Err(Error::domain(
                "swing_voltage",
                swing_voltage,
                "must be >= 0 V",
            ));
        }
        Ok(Self {
            capacitance,
            resistance,
            swing_voltage,
            env,
        })
    }

    pub fn capacitance(&self) -> f64 {
        self.capacitance
    }

    pub fn resistance(&self) -> f64 {
        self.resistance
    }

    pub fn swing_voltage(&self) -> f64 {
        self.swing_voltage
    }

    pub fn env(&self) -> &PhysicalEnvironment {
        &self.env
    }

    pub fn with_swing(&self, swing_voltage: f64) -> Result<Self> {
        Self::new(self.capacitance, self.resistance, swing_voltage, self.env)
    }

    pub fn with_resistance(&self, resistance: f64) -> Result<Self> {
        Self::new(self.capacitance, resistance, self.swing_voltage, self.env)
    }

    /// `τ = R·C`.
    pub fn correlation_time(&self) -> f64 {
        self.resistance * self.capacitance
    }

    /// Energy stored on the capacitor after a 0 ⇒ 1 edge, `E1 = ½·C·U1²`.
    pub fn charge_energy(&self) -> f64 {
        0.5 * self.capacitance * self.swing_voltage * self.swing_voltage
    }

    /// Heat released in the switch resistance while charging from a step
    /// source. Equal to the stored energy for every `R > 0`.
    pub fn step_charge_dissipation(&self) -> f64 {
        self.charge_energy()
    }

    /// Ledger of one 0 ⇒ 1 ⇒ 0 cycle: charge through S1, reset through S2.
    pub fn full_cycle_dissipation(&self) -> CycleLedger {
        let e1 = self.charge_energy();
        CycleLedger {
            stored_after_charge: e1,
            dissipated_on_charge: self.step_charge_dissipation(),
            // the reset dumps the whole stored energy
            dissipated_on_discharge: e1,
            total_dissipated: e1 + e1,
        }
    }

    /// Capacitor voltage and resistor power `t` seconds after S1 closes.
    pub fn transient_power(&self, t: f64) -> Result<(f64, f64)> {
        if !(t >= 0.0) {
            return Err(Error::domain("t", t, "must be >= 0 s"));
        }
        let u1 = self.swing_voltage;
        let v = -u1 * (-t / self.correlation_time()).exp_m1();
        let across_r = u1 - v;
        Ok((v, across_r * across_r / self.resistance))
    }
}

/// Dissipation bookkeeping for a full logic cycle, joules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleLedger {
    pub stored_after_charge: f64,
    pub dissipated_on_charge: f64,
    pub dissipated_on_discharge: f64,
    pub total_dissipated: f64,
}

/// How a full-cycle total is compared against a per-operation figure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Accounting {
    /// Half the cycle total: a 0 ⇒ 1 ⇒ 0 cycle is two logic transitions.
    #[default]
    PerOperation,
    PerCycle,
}

impl Accounting {
    pub fn apply(self, cycle_total: f64) -> f64 {
        match self {
            Accounting::PerOperation => cycle_total / 2.0,
            Accounting::PerCycle => cycle_total,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Accounting::PerOperation => "per-operation",
            Accounting::PerCycle => "per-cycle",
        }
    }
}
