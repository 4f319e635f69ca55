//! Energy dissipation floors for voltage-controlled logic under Johnson noise.
//!
//! The crate models a logic stage as an ideal switch charging an input
//! capacitance through a resistance. Every 0 ⇒ 1 ⇒ 0 cycle dissipates the
//! full `C·U1²`, while the swing `U1` needed to keep thermally activated
//! errors below a target probability sets a floor of order `kT·ln(1/ε)`.
//!
//! Modules, bottom up:
//!
//! - [`quantities`]: Boltzmann constant, temperature, joule ↔ kT conversion.
//! - [`circuit`]: charging energetics of the R–C stage.
//! - [`special`]: Gaussian tail and its inverse, accurate deep into the tail.
//! - [`noise`]: Ornstein–Uhlenbeck model of the capacitor voltage noise.
//! - [`error_model`]: bit-error probabilities and dissipation floors.
//! - [`gate`]: follower-gate cycle audit (friction vs input charging).
//! - [`tank`]: resonant LC charge recycling and its switch-cost break-even.
//! - [`sweep`]: JSON-configured parameter sweeps emitting CSV.
//! - [`cli`]: the `ktfloor` command line.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit;
pub mod cli;
pub mod error;
pub mod error_model;
pub mod format;
pub mod gate;
pub mod noise;
pub mod quantities;
pub mod special;
pub mod sweep;
pub mod tank;

pub use circuit::{CycleLedger, RcStage};
pub use error::{Error, Result};
pub use error_model::{ErrorSpec, FloorResult, Regime};
pub use gate::{AuditReport, ClaimVerdict, FollowerGate};
pub use noise::{NoisePath, OuProcess};
pub use quantities::PhysicalEnvironment;
pub use tank::{TankCircuit, TransferReport};
