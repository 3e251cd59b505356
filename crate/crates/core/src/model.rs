//! Shared parameter types.
//!
//! Everything here is dimensionless: lengths in units of a reference length
//! `L`, energies in recoil units `ε_r = ħω_r`, times in `1/ω_r`. With this
//! scaling the free Schrödinger equation reads `i∂ψ/∂t = −∂²ψ/∂x² + u(x)ψ`, a
//! plane wave `e^{ikx}` has energy `k²`, and its group velocity is `2k`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Rectangular barrier of height `u0` occupying `0 <= x <= l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierSpec {
    u0: f64,
    l: f64,
}

impl BarrierSpec {
    pub fn new(u0: f64, l: f64) -> Result<Self> {
        if !(u0.is_finite() && u0 >= 0.0) {
            return Err(Error::invalid(
                "u0",
                format!("barrier height must be finite and >= 0, got {u0}"),
            ));
        }
        if !(l.is_finite() && l >= 0.0) {
            return Err(Error::invalid(
                "l",
                format!("barrier width must be finite and >= 0, got {l}"),
            ));
        }
        Ok(Self { u0, l })
    }

    pub fn height(&self) -> f64 {
        self.u0
    }

    pub fn width(&self) -> f64 {
        self.l
    }

    /// Same height, different width.
    pub fn with_width(&self, l: f64) -> Result<Self> {
        Self::new(self.u0, l)
    }

    /// Validates `0 < eps < u0` and returns the matching [`Energy`].
    pub fn sub_barrier(&self, eps: f64) -> Result<Energy> {
        if !(eps > 0.0 && eps < self.u0) {
            return Err(Error::NotSubBarrier { eps, u0: self.u0 });
        }
        Ok(Energy(eps))
    }
}

/// A positive dimensionless energy `ε`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Energy(f64);

impl Energy {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::invalid(
                "eps",
                format!("energy must be finite and > 0, got {eps}"),
            ));
        }
        Ok(Self(eps))
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    /// Propagating wavenumber `k = √ε`.
    pub fn k(&self) -> f64 {
        self.0.sqrt()
    }

    /// Evanescent decay constant `χ = √(u0 − ε)`; requires `ε < u0`.
    pub fn chi(&self, barrier: &BarrierSpec) -> Result<f64> {
        if self.0 >= barrier.height() {
            return Err(Error::NotSubBarrier {
                eps: self.0,
                u0: barrier.height(),
            });
        }
        Ok((barrier.height() - self.0).sqrt())
    }
}

/// Normalization of `A[1 − cos(2x/b)]` on `(−πb, 0)`.
///
/// `∫(1 − cos u)² du` over one period is `3π`, so the squared envelope
/// integrates to `3πb/2` and `A = √(2/(3πb))`.
pub fn packet_amplitude(b: f64) -> Result<f64> {
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::invalid(
            "b",
            format!("half-width must be finite and > 0, got {b}"),
        ));
    }
    Ok((2.0 / (3.0 * PI * b)).sqrt())
}

/// Initial wave packet `ψ(x,0) = A[1 − cos(2x/b)] e^{ipx}` for `−πb < x < 0`,
/// zero elsewhere. It sits directly against the barrier's left edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketSpec {
    p: f64,
    b: f64,
    amplitude: f64,
}

impl PacketSpec {
    pub fn new(p: f64, b: f64) -> Result<Self> {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::invalid(
                "p",
                format!("mean momentum must be finite and > 0, got {p}"),
            ));
        }
        let amplitude = packet_amplitude(b)?;
        Ok(Self { p, b, amplitude })
    }

    /// Like [`PacketSpec::new`] but also requires `p² < u0`.
    pub fn sub_barrier(p: f64, b: f64, barrier: &BarrierSpec) -> Result<Self> {
        let packet = Self::new(p, b)?;
        if p * p >= barrier.height() {
            return Err(Error::invalid(
                "p",
                format!("p² = {} must be below u0 = {}", p * p, barrier.height()),
            ));
        }
        Ok(packet)
    }

    pub fn momentum(&self) -> f64 {
        self.p
    }

    pub fn half_width(&self) -> f64 {
        self.b
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    /// Support `(−πb, 0)`.
    pub fn support(&self) -> (f64, f64) {
        (-PI * self.b, 0.0)
    }

    /// Position of the initial density maximum, `−πb/2`.
    pub fn initial_position(&self) -> f64 {
        -0.5 * PI * self.b
    }

    /// `ψ(x, 0)`.
    pub fn initial_value(&self, x: f64) -> num_complex::Complex64 {
        let (lo, hi) = self.support();
        if x <= lo || x >= hi {
            return num_complex::Complex64::new(0.0, 0.0);
        }
        let envelope = self.amplitude * (1.0 - (2.0 * x / self.b).cos());
        num_complex::Complex64::from_polar(envelope, self.p * x)
    }
}
