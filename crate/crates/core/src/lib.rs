//! Dual-rail quantum teleportation between a flat-space sender and a receiver
//! held static just outside a Schwarzschild horizon.
//!
//! The receiver's field modes see the Minkowski vacuum as a two-mode squeezed
//! state across the horizon, with `tanh r = exp(−2πMΩ)`. Brute-force
//! simulation in a truncated Fock space reproduces the closed-form fidelity
//! `F = 1/cosh⁶r`.
//!
//! - [`fock`]: sparse truncated Fock-space states, density operators, ladder
//!   operators, projection and partial trace.
//! - [`channel`]: squeezing parameters and the horizon embedding of states.
//! - [`teleport`]: Bell resource, Bell measurement, corrections, fidelity.
//! - [`analysis`]: (radius, Ω) sweeps and cutoff convergence studies.

pub mod analysis;
pub mod channel;
pub mod fock;
pub mod teleport;

pub use channel::{squeeze_param, SqueezeParams};
pub use fock::{DensityOperator, FockVector, ModeLayout};
pub use teleport::{run_protocol, DualRailQubit, ProtocolConfig, TeleportReport};
