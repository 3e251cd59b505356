//! Conversion between recoil units and SI.
//!
//! Only used for presentation; nothing in the library computes in SI.

use crate::error::{Error, Result};

/// Reduced Planck constant (J·s), CODATA 2018 exact value.
pub const HBAR: f64 = 1.054_571_817e-34;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantityKind {
    Length,
    Time,
    Energy,
}

impl QuantityKind {
    fn name(self) -> &'static str {
        match self {
            QuantityKind::Length => "length",
            QuantityKind::Time => "time",
            QuantityKind::Energy => "energy",
        }
    }
}

/// A value in recoil units, tagged with what it measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dimensionless {
    pub kind: QuantityKind,
    pub value: f64,
}

/// A value in SI units (m, s or J), tagged with what it measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Physical {
    pub kind: QuantityKind,
    pub value: f64,
}

/// Reference length and particle mass fixing the recoil scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitScale {
    l_ref: f64,
    mass: f64,
}

impl UnitScale {
    pub fn new(l_ref: f64, mass: f64) -> Result<Self> {
        if !(l_ref.is_finite() && l_ref > 0.0) {
            return Err(Error::invalid("l_ref", format!("must be finite and > 0, got {l_ref}")));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::invalid("mass", format!("must be finite and > 0, got {mass}")));
        }
        let scale = Self { l_ref, mass };
        let (w, e) = (scale.recoil_frequency(), scale.recoil_energy());
        if !(w.is_finite() && w > 0.0 && e.is_finite() && e > 0.0) {
            return Err(Error::invalid("l_ref", "recoil scale under- or overflows"));
        }
        Ok(scale)
    }

    /// Builds a scale with a prescribed recoil frequency (rad/s) and reference length.
    pub fn from_recoil_frequency(l_ref: f64, omega_r: f64) -> Result<Self> {
        if !(omega_r.is_finite() && omega_r > 0.0) {
            return Err(Error::invalid(
                "omega_r",
                format!("must be finite and > 0, got {omega_r}"),
            ));
        }
        Self::new(l_ref, HBAR / (2.0 * omega_r * l_ref * l_ref))
    }

    pub fn reference_length(&self) -> f64 {
        self.l_ref
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// `ω_r = ħ / (2 m L²)` in rad/s.
    pub fn recoil_frequency(&self) -> f64 {
        HBAR / (2.0 * self.mass * self.l_ref * self.l_ref)
    }

    /// `ε_r = ħ ω_r` in joules.
    pub fn recoil_energy(&self) -> f64 {
        HBAR * self.recoil_frequency()
    }

    fn factor(&self, kind: QuantityKind) -> f64 {
        match kind {
            QuantityKind::Length => self.l_ref,
            QuantityKind::Time => 1.0 / self.recoil_frequency(),
            QuantityKind::Energy => self.recoil_energy(),
        }
    }

    pub fn to_physical(&self, q: Dimensionless) -> Physical {
        Physical {
            kind: q.kind,
            value: q.value * self.factor(q.kind),
        }
    }

    /// Converts back, checking the quantity is of the expected kind.
    pub fn to_dimensionless(&self, q: Physical, expected: QuantityKind) -> Result<Dimensionless> {
        if q.kind != expected {
            return Err(Error::QuantityMismatch {
                expected: expected.name(),
                found: q.kind.name(),
            });
        }
        Ok(Dimensionless {
            kind: q.kind,
            value: q.value / self.factor(q.kind),
        })
    }
}
