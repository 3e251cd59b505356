//! Wavenumber decomposition of the evanescent field inside the barrier.
//!
//! The interior field `ψ = N(C e^{χx} + D e^{−χx})` restricted to `[0, l]` has
//! the window transform
//!
//! ```text
//! φ(q) = ∫₀^l ψ(x) e^{−iqx} dx = N [C e^{χl} e^{−iql} E(χ − iq) + D E(χ + iq)]
//! ```
//!
//! with `E(z) = (1 − e^{−zl})/z`. Splitting `|φ(±q)|² = S(q) ± O(q)` into
//! even and odd parts gives `W± = ∫₀^K (S ± O) dq`. The odd part is
//! `O = −2N² Im(C D̄) Im(Ã B̄)`, proportional to the current the field
//! carries, so a real field has `W+ = W−` exactly.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::BarrierSpec;
use crate::numerics::special::window_integral;
use crate::numerics::{integrate, GkGrid, QuadratureSettings};
use crate::stationary::{probability_current, solve, ScatteringSolution};

/// Fraction of `∫|φ|²` the `[−K, K]` window must hold before it is flagged.
pub const CAPTURE_TARGET: f64 = 0.99;
/// Allowed deviation of the window Parseval ratio from 1.
pub const PARSEVAL_TOLERANCE: f64 = 0.005;

/// `N(C e^{χx} + D e^{−χx})` on `[0, l]`, with `C` stored as `C e^{χl}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteriorField {
    chi: f64,
    l: f64,
    c_far: Complex64,
    d: Complex64,
    norm: f64,
}

impl InteriorField {
    pub fn new(chi: f64, l: f64, c_far: Complex64, d: Complex64, norm: f64) -> Result<Self> {
        if !(chi.is_finite() && chi > 0.0) {
            return Err(Error::invalid(
                "chi",
                format!("decay constant must be finite and > 0, got {chi}"),
            ));
        }
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::invalid("l", format!("window must be finite and > 0, got {l}")));
        }
        Ok(Self { chi, l, c_far, d, norm })
    }

    /// Barrier-region part of a scattering state.
    pub fn from_solution(sol: &ScatteringSolution) -> Result<Self> {
        Self::new(sol.chi(), sol.barrier().width(), sol.c_at_exit(), sol.d(), sol.norm())
    }

    /// `cosh χx`, a real field with no current.
    pub fn real_cosh(chi: f64, l: f64) -> Result<Self> {
        Self::new(
            chi,
            l,
            Complex64::new(0.5 * (chi * l).exp(), 0.0),
            Complex64::new(0.5, 0.0),
            1.0,
        )
    }

    pub fn width(&self) -> f64 {
        self.l
    }

    pub fn value(&self, x: f64) -> Complex64 {
        self.norm * (self.c_far * (self.chi * (x - self.l)).exp() + self.d * (-self.chi * x).exp())
    }

    fn slope(&self, x: f64) -> Complex64 {
        self.norm * self.chi * (self.c_far * (self.chi * (x - self.l)).exp() - self.d * (-self.chi * x).exp())
    }

    /// `2 Im(ψ* ψ′)`, the same at every `x`.
    pub fn current(&self) -> f64 {
        probability_current(self.value(0.0), self.slope(0.0))
    }

    fn parts(&self, q: f64) -> (Complex64, Complex64) {
        let a = Complex64::from_polar(1.0, -q * self.l) * window_integral(Complex64::new(self.chi, -q), self.l);
        let b = window_integral(Complex64::new(self.chi, q), self.l);
        (a, b)
    }

    /// `φ(q)`.
    pub fn transform(&self, q: f64) -> Complex64 {
        let (a, b) = self.parts(q);
        self.norm * (self.c_far * a + self.d * b)
    }

    /// Even and odd parts of `|φ(q)|²` in `q`.
    pub fn even_odd(&self, q: f64) -> (f64, f64) {
        let (a, b) = self.parts(q);
        let n2 = self.norm * self.norm;
        let cd = self.c_far * self.d.conj();
        let ab = a * b.conj();
        let even = n2 * (self.c_far.norm_sqr() * a.norm_sqr() + self.d.norm_sqr() * b.norm_sqr() + 2.0 * cd.re * ab.re);
        let odd = -2.0 * n2 * cd.im * ab.im;
        (even, odd)
    }

    /// `∫₀^l |ψ|² dx` in closed form.
    pub fn probability(&self) -> f64 {
        let (chi, l) = (self.chi, self.l);
        let y = chi * l;
        let n2 = self.norm * self.norm;
        // ∫e^{2χ(x−l)} = E(2χ), ∫e^{−2χx} = E(2χ), cross term 2 Re(C_far D̄) e^{−χl} l
        let e2 = window_integral(Complex64::new(2.0 * chi, 0.0), l).re;
        n2 * ((self.c_far.norm_sqr() + self.d.norm_sqr()) * e2 + 2.0 * (self.c_far * self.d.conj()).re * (-y).exp() * l)
    }

    /// `∫_{−∞}^{∞} sign(q) |φ(q)|² dq = (j/χ) · 2∫₀^l (l − s) sinh(χs)/s ds`.
    pub fn full_line_excess(&self) -> Result<f64> {
        let (chi, l) = (self.chi, self.l);
        let y = chi * l;
        // e^{−χl} sinh(χs)/s, regular at s = 0
        let kernel = |s: f64| {
            let z = chi * s;
            let shape = if z < 1e-6 {
                chi * (1.0 + z * z / 6.0) * (-y).exp()
            } else if z < 1.0 {
                z.sinh() * (-y).exp() / s
            } else {
                0.5 * ((z - y).exp() - (-z - y).exp()) / s
            };
            2.0 * (l - s) * shape
        };
        let scaled_j = integrate(kernel, 0.0, l, &QuadratureSettings::new(1e-300, 1e-12, 40)?)?.value;
        let n2 = self.norm * self.norm;
        Ok(4.0 * n2 * (self.c_far * self.d.conj()).im * scaled_j)
    }
}

/// Warning attached to a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumFlag {
    /// The window `[−K, K]` holds less than [`CAPTURE_TARGET`] of the mass.
    KMaxTooSmall,
    /// `(W+ + W−)/(2π)` misses `∫|ψ|²` by more than [`PARSEVAL_TOLERANCE`].
    Parseval,
}

impl SpectrumFlag {
    pub fn label(&self) -> &'static str {
        match self {
            SpectrumFlag::KMaxTooSmall => "k_max_low",
            SpectrumFlag::Parseval => "parseval",
        }
    }
}

/// Right- and left-moving spectral weight of one interior field.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalSpectrum {
    pub l: f64,
    /// Uniform samples on `[−k_max, k_max]`.
    pub k: Vec<f64>,
    pub density: Vec<f64>,
    pub w_plus: f64,
    pub w_minus: f64,
    /// `W− / W+`.
    pub ratio: f64,
    /// `W+ − W−` over the window, from the odd part alone.
    pub excess: f64,
    /// `W+ − W−` over the whole line.
    pub excess_full_line: f64,
    /// `(W+ + W−) / (2π ∫|ψ|²)`.
    pub parseval: f64,
    /// Estimated share of `∫|φ|²` inside the window.
    pub captured: f64,
    pub flags: Vec<SpectrumFlag>,
}

/// Largest panel used for the `q` integrals: a quarter period of the window
/// oscillation, a quarter of the decay scale near `q = 0`, and 0.5.
fn panel_width(chi: f64, l: f64) -> f64 {
    (0.5 * PI / l).min(0.25 * chi.max(1.0 / l)).min(0.5)
}

/// Spectrum of an interior field sampled with `n_k` points on `[−k_max, k_max]`.
pub fn field_spectrum(field: &InteriorField, k_max: f64, n_k: usize) -> Result<DirectionalSpectrum> {
    if !(k_max.is_finite() && k_max > 0.0) {
        return Err(Error::invalid("k_max", format!("must be finite and > 0, got {k_max}")));
    }
    if n_k < 2 {
        return Err(Error::invalid("n_k", "need at least two samples"));
    }
    let panels = (k_max / panel_width(field.chi, field.l)).ceil() as usize;
    let grid = GkGrid::uniform(0.0, k_max, panels)?;
    let (even, odd): (Vec<f64>, Vec<f64>) = grid.nodes().iter().map(|&q| field.even_odd(q)).unzip();
    let e = grid.sum(&even).0;
    let o = grid.sum(&odd).0;
    let (w_plus, w_minus) = (e + o, e - o);

    let k: Vec<f64> = (0..n_k)
        .map(|i| -k_max + 2.0 * k_max * i as f64 / (n_k - 1) as f64)
        .collect();
    let density = k.iter().map(|&q| field.transform(q).norm_sqr()).collect();

    let p = field.probability();
    let total = 2.0 * PI * p;
    let tail = 2.0 * (field.value(0.0).norm_sqr() + field.value(field.l).norm_sqr()) / k_max;
    let captured = 1.0 - tail / total;
    let parseval = (w_plus + w_minus) / total;
    let mut flags = Vec::new();
    if captured < CAPTURE_TARGET {
        flags.push(SpectrumFlag::KMaxTooSmall);
    }
    if (parseval - 1.0).abs() > PARSEVAL_TOLERANCE {
        flags.push(SpectrumFlag::Parseval);
    }
    Ok(DirectionalSpectrum {
        l: field.l,
        k,
        density,
        w_plus,
        w_minus,
        ratio: w_minus / w_plus,
        excess: 2.0 * o,
        excess_full_line: field.full_line_excess()?,
        parseval,
        captured,
        flags,
    })
}

/// Spectrum of the barrier-region part of a scattering state; needs `l > 0`.
pub fn barrier_k_spectrum(sol: &ScatteringSolution, k_max: f64, n_k: usize) -> Result<DirectionalSpectrum> {
    field_spectrum(&InteriorField::from_solution(sol)?, k_max, n_k)
}

/// Spectra for ascending widths at fixed `(u0, ε)`, in input order.
pub fn reflected_share_sweep(
    u0: f64,
    eps: f64,
    widths: &[f64],
    k_max: f64,
    n_k: usize,
) -> Result<Vec<DirectionalSpectrum>> {
    if widths.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("l", "widths must be strictly ascending"));
    }
    widths
        .par_iter()
        .map(|&l| barrier_k_spectrum(&solve(&BarrierSpec::new(u0, l)?, eps)?, k_max, n_k))
        .collect()
}
