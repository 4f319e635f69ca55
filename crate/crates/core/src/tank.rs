//! Resonant LC recycling of charging energy between two capacitors.
//!
//! C1 starts at `V0`, C2 empty. S1 closes and C1 rings into the inductor
//! for a quarter of the damped period; then S2 closes and S1 opens at the
//! same instant, and the inductor current rings into C2 for another
//! quarter period. A single series resistance accounts for all loop loss.
//! Switches are ideal here; their control cost enters only through
//! [`break_even`].

use std::f64::consts::FRAC_PI_2;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::sci;
use crate::quantities::PhysicalEnvironment;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TankCircuit {
    c1: f64,
    c2: f64,
    inductance: f64,
    series_resistance: f64,
    initial_voltage: f64,
}

/// One ringing phase: an inductor in series with `R` and one capacitor.
#[derive(Debug, Clone, Copy)]
struct Phase {
    alpha: f64,
    omega_d: f64,
    /// `ω_d²·L·C = 1 − 1/(4q²)`.
    kappa: f64,
}

impl Phase {
    fn new(inductance: f64, capacitance: f64, resistance: f64) -> Result<Self> {
        let alpha = resistance / (2.0 * inductance);
        let kappa = 1.0 - alpha * alpha * inductance * capacitance;
        if !(kappa > 0.0) {
            let q = (inductance / capacitance).sqrt() / resistance;
            return Err(Error::domain(
                "quality_factor",
                q,
                "tank must be underdamped, q = sqrt(L/C)/R > 0.5",
            ));
        }
        let omega_d = (kappa / (inductance * capacitance)).sqrt();
        Ok(Self {
            alpha,
            omega_d,
            kappa,
        })
    }

    fn quarter_period(&self) -> f64 {
        FRAC_PI_2 / self.omega_d
    }
}

impl TankCircuit {
    pub fn new(
        c1: f64,
        c2: f64,
        inductance: f64,
        series_resistance: f64,
        initial_voltage: f64,
    ) -> Result<Self> {
        for (name, v) in [("c1", c1), ("c2", c2), ("inductance", inductance)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(name, v, "must be > 0"));
            }
        }
        if !(series_resistance >= 0.0) || !series_resistance.is_finite() {
            return Err(Error::domain(
                "series_resistance",
                series_resistance,
                "must be >= 0 ohm",
            ));
        }
        if !initial_voltage.is_finite() {
            return Err(Error::domain(
                "initial_voltage",
                initial_voltage,
                "must be finite",
            ));
        }
        let tank = Self {
            c1,
            c2,
            inductance,
            series_resistance,
            initial_voltage,
        };
        tank.phases()?;
        Ok(tank)
    }

    /// Symmetric tank (`C1 = C2 = c`) with `R` chosen for quality factor `q`.
    pub fn with_quality(c: f64, inductance: f64, q: f64, initial_voltage: f64) -> Result<Self> {
        if !(q > 0.5) {
            return Err(Error::domain("quality_factor", q, "must be > 0.5"));
        }
        let r = if q.is_infinite() {
            0.0
        } else {
            (inductance / c).sqrt() / q
        };
        Self::new(c, c, inductance, r, initial_voltage)
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn inductance(&self) -> f64 {
        self.inductance
    }

    pub fn series_resistance(&self) -> f64 {
        self.series_resistance
    }

    pub fn initial_voltage(&self) -> f64 {
        self.initial_voltage
    }

    /// `sqrt(L/C1)/R`; infinite for a lossless tank.
    pub fn quality_factor(&self) -> f64 {
        (self.inductance / self.c1).sqrt() / self.series_resistance
    }

    pub fn initial_energy(&self) -> f64 {
        0.5 * self.c1 * self.initial_voltage * self.initial_voltage
    }

    fn phases(&self) -> Result<(Phase, Phase)> {
        Ok((
            Phase::new(self.inductance, self.c1, self.series_resistance)?,
            Phase::new(self.inductance, self.c2, self.series_resistance)?,
        ))
    }

    /// Switching instants: `t1 = (π/2)/ω_d1` after S1 closes, then
    /// `t2 = (π/2)/ω_d2` after the handover, with `ω_dk = ω_0k·√(1 − 1/(4q_k²))`.
    pub fn transfer_schedule(&self) -> Result<(f64, f64)> {
        let (p1, p2) = self.phases()?;
        Ok((p1.quarter_period(), p2.quarter_period()))
    }

    /// Closed-form transfer through both phases.
    ///
    /// Phase 1 leaves `I1 = V0·e^{−αt1}/(ω_d1·L)` in the inductor; phase 2
    /// ends with `V2 = I1·e^{−αt2}/(ω_d2·C2)`. The efficiency reduces to
    /// `e^{−2α(t1+t2)}/(κ1·κ2)`, exact 1 when `R = 0`.
    pub fn transfer_efficiency(&self) -> Result<TransferReport> {
        let (p1, p2) = self.phases()?;
        let (t1, t2) = (p1.quarter_period(), p2.quarter_period());
        let decay = (-2.0 * p1.alpha * (t1 + t2)).exp();
        let efficiency = decay / (p1.kappa * p2.kappa);
        let energy_initial = self.initial_energy();
        Ok(TransferReport {
            t_switch_1: t1,
            t_switch_2: t2,
            energy_initial,
            energy_delivered: efficiency * energy_initial,
            efficiency,
        })
    }

    /// Fixed-step RK4 integration of the switched circuit. Steps are shrunk
    /// so each phase ends exactly on its switching instant.
    pub fn simulate_transfer(&self, dt: f64) -> Result<TransferReport> {
        let waveform = self.simulate_waveform(dt)?;
        let (t1, t2) = self.transfer_schedule()?;
        let last = waveform.last().expect("waveform is never empty");
        let energy_initial = self.initial_energy();
        let energy_delivered = 0.5 * self.c2 * last.v_c2 * last.v_c2;
        Ok(TransferReport {
            t_switch_1: t1,
            t_switch_2: t2,
            energy_initial,
            energy_delivered,
            efficiency: energy_delivered / energy_initial,
        })
    }

    /// Largest step [`TankCircuit::simulate_transfer`] accepts.
    pub fn max_step(&self) -> f64 {
        (self.inductance * self.c1.min(self.c2)).sqrt() / 100.0
    }

    /// Every integrator state from `t = 0` to the end of phase 2.
    pub fn simulate_waveform(&self, dt: f64) -> Result<Vec<WaveformSample>> {
        if !(dt > 0.0) || dt > self.max_step() {
            return Err(Error::domain(
                "dt",
                dt,
                "must be positive and <= sqrt(L*min(C1,C2))/100",
            ));
        }
        let (t1, t2) = self.transfer_schedule()?;
        let l = self.inductance;
        let r = self.series_resistance;
        let (c1, c2) = (self.c1, self.c2);

        // state: [q1, i, q2, e_loss]
        let phase1 = move |s: &[f64; 4]| [-s[1], (s[0] / c1 - r * s[1]) / l, 0.0, r * s[1] * s[1]];
        let phase2 = move |s: &[f64; 4]| [0.0, (-s[2] / c2 - r * s[1]) / l, s[1], r * s[1] * s[1]];

        let mut state = [c1 * self.initial_voltage, 0.0, 0.0, 0.0];
        let mut out = vec![self.sample(0.0, &state)];
        let mut t0 = 0.0;
        for (duration, rhs) in [
            (t1, &phase1 as &dyn Fn(&[f64; 4]) -> [f64; 4]),
            (t2, &phase2 as &dyn Fn(&[f64; 4]) -> [f64; 4]),
        ] {
            let steps = (duration / dt).ceil().max(1.0) as usize;
            let h = duration / steps as f64;
            for k in 1..=steps {
                state = rk4(rhs, &state, h);
                out.push(self.sample(t0 + k as f64 * h, &state));
            }
            t0 += duration;
        }
        Ok(out)
    }

    fn sample(&self, t: f64, s: &[f64; 4]) -> WaveformSample {
        WaveformSample {
            t,
            v_c1: s[0] / self.c1,
            i_l: s[1],
            v_c2: s[2] / self.c2,
            e_loss: s[3],
        }
    }
}

fn rk4(f: &dyn Fn(&[f64; 4]) -> [f64; 4], y: &[f64; 4], h: f64) -> [f64; 4] {
    let shift = |k: &[f64; 4], a: f64| std::array::from_fn::<f64, 4, _>(|j| y[j] + a * k[j]);
    let k1 = f(y);
    let k2 = f(&shift(&k1, 0.5 * h));
    let k3 = f(&shift(&k2, 0.5 * h));
    let k4 = f(&shift(&k3, h));
    std::array::from_fn(|j| y[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    pub t_switch_1: f64,
    pub t_switch_2: f64,
    pub energy_initial: f64,
    pub energy_delivered: f64,
    pub efficiency: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveformSample {
    pub t: f64,
    pub v_c1: f64,
    pub i_l: f64,
    pub v_c2: f64,
    pub e_loss: f64,
}

impl WaveformSample {
    /// Energy in C1, L and C2 plus everything burnt in R so far.
    pub fn ledger(&self, tank: &TankCircuit) -> f64 {
        0.5 * tank.c1 * self.v_c1 * self.v_c1
            + 0.5 * tank.inductance * self.i_l * self.i_l
            + 0.5 * tank.c2 * self.v_c2 * self.v_c2
            + self.e_loss
    }
}

/// Writes `t,v_c1,i_l,v_c2,e_loss` rows.
pub fn write_waveform_csv<W: Write>(samples: &[WaveformSample], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "v_c1", "i_l", "v_c2", "e_loss"])?;
    for s in samples {
        w.write_record([
            sci(s.t),
            sci(s.v_c1),
            sci(s.i_l),
            sci(s.v_c2),
            sci(s.e_loss),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BreakEven {
    pub efficiency: f64,
    pub energy_initial: f64,
    pub switch_overhead: f64,
    pub net_saving: f64,
    pub net_saving_kt: f64,
    pub break_even_energy: f64,
    pub break_even_energy_kt: f64,
}

/// Net gain of recycling once `n_switch_events` switch operations costing
/// `e_switch_control` each are paid for, and the transfer energy at which
/// the gain reaches zero.
pub fn break_even(
    tank: &TankCircuit,
    e_switch_control: f64,
    n_switch_events: u32,
    env: &PhysicalEnvironment,
) -> Result<BreakEven> {
    if n_switch_events < 2 {
        return Err(Error::domain(
            "n_switch_events",
            n_switch_events as f64,
            "a transfer needs at least 2 switch events",
        ));
    }
    if !(e_switch_control >= 0.0) {
        return Err(Error::domain(
            "e_switch_control",
            e_switch_control,
            "must be >= 0 J",
        ));
    }
    let report = tank.transfer_efficiency()?;
    let switch_overhead = n_switch_events as f64 * e_switch_control;
    let net_saving = report.efficiency * report.energy_initial - switch_overhead;
    let break_even_energy = switch_overhead / report.efficiency;
    Ok(BreakEven {
        efficiency: report.efficiency,
        energy_initial: report.energy_initial,
        switch_overhead,
        net_saving,
        net_saving_kt: env.joules_to_kt(net_saving),
        break_even_energy,
        break_even_energy_kt: env.joules_to_kt(break_even_energy),
    })
}
