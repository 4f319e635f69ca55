//! Physical constants and joule ↔ kT conversion.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact SI value of the Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380649e-23;

/// Default ambient temperature, K.
pub const ROOM_TEMPERATURE: f64 = 300.0;

/// Thermal bath the circuit sits in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalEnvironment {
    temperature: f64,
    boltzmann_constant: f64,
}

impl PhysicalEnvironment {
    /// Environment at `temperature` kelvin. Zero is accepted; negative or
    /// non-finite temperatures are not.
    pub fn new(temperature: f64) -> Result<Self> {
        if !(temperature >= 0.0) || !temperature.is_finite() {
            return Err(Error::domain("temperature", temperature, "must be >= 0 K"));
        }
        Ok(Self {
            temperature,
            boltzmann_constant: BOLTZMANN,
        })
    }

    pub fn room() -> Self {
        Self::new(ROOM_TEMPERATURE).expect("room temperature is valid")
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn boltzmann_constant(&self) -> f64 {
        self.boltzmann_constant
    }

    /// `k_B·T` in joules.
    pub fn thermal_energy(&self) -> f64 {
        self.boltzmann_constant * self.temperature
    }

    pub fn kt_to_joules(&self, kt: f64) -> f64 {
        kt * self.thermal_energy()
    }

    /// Joules expressed as multiples of `k_B·T`. Infinite or NaN at `T = 0`.
    pub fn joules_to_kt(&self, joules: f64) -> f64 {
        joules / self.thermal_energy()
    }

    pub(crate) fn require_positive_temperature(&self) -> Result<()> {
        if self.temperature > 0.0 {
            Ok(())
        } else {
            Err(Error::domain(
                "temperature",
                self.temperature,
                "must be > 0 K",
            ))
        }
    }
}

impl Default for PhysicalEnvironment {
    fn default() -> Self {
        Self::room()
    }
}

/// An energy carried in both units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Energy {
    pub joule: f64,
    pub kt: f64,
}

impl Energy {
    pub fn from_joules(joule: f64, env: &PhysicalEnvironment) -> Self {
        Self {
            joule,
            kt: env.joules_to_kt(joule),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_temperature_has_no_thermal_energy() {
        assert_eq!(PhysicalEnvironment::new(0.0).unwrap().thermal_energy(), 0.0);
    }

    #[test]
    fn room_temperature_thermal_energy() {
        let kt = PhysicalEnvironment::new(300.0).unwrap().thermal_energy();
        assert!((kt - 4.141947e-21).abs() <= 1e-15 * 4.141947e-21);
    }

    #[test]
    fn reciprocal_temperature_gives_one_joule() {
        let env = PhysicalEnvironment::new(1.0 / BOLTZMANN).unwrap();
        assert!((env.thermal_energy() - 1.0).abs() <= f64::EPSILON);
    }

    #[test]
    fn negative_temperature_rejected() {
        assert!(matches!(
            PhysicalEnvironment::new(-1.0),
            Err(Error::Domain {
                name: "temperature",
                ..
            })
        ));
        assert!(PhysicalEnvironment::new(f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn conversion_round_trips(t in 1e-3f64..1e4, x in -1e6f64..1e6) {
            let env = PhysicalEnvironment::new(t).unwrap();
            let back = env.joules_to_kt(env.kt_to_joules(x));
            prop_assert!((back - x).abs() <= 2.0 * f64::EPSILON * x.abs());
        }

        #[test]
        fn thermal_energy_positive(t in 1e-6f64..1e6) {
            prop_assert!(PhysicalEnvironment::new(t).unwrap().thermal_energy() > 0.0);
        }
    }
}
