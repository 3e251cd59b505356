//! Tunneling times for a one-dimensional rectangular barrier.
//!
//! The crate computes stationary scattering states, the stationary-state
//! time definitions (group delay, phase time, two dwell times), wave-packet
//! arrival and mean-crossing times obtained by spectral synthesis, and the
//! wavenumber decomposition of the evanescent field inside the barrier.
//! All quantities are dimensionless; see [`units`] for the conversion to SI.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod model;
pub mod numerics;
pub mod spectral;
pub mod stationary;
pub mod times;
pub mod units;
pub mod wavepacket;

pub use error::{Error, Result};
pub use model::{packet_amplitude, BarrierSpec, Energy, PacketSpec};
pub use stationary::{phase_shift, solve, ScatteringSolution};
pub use units::{Dimensionless, Physical, QuantityKind, UnitScale};
