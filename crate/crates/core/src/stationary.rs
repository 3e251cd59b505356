//! Stationary scattering states of the rectangular barrier.
//!
//! A state of energy `ε = k²` incident from the left reads
//!
//! ```text
//! ψ(x) = N (e^{ikx} + R e^{−ikx})       x < 0
//!        N (C e^{χx} + D e^{−χx})       0 ≤ x ≤ l
//!        N T e^{ikx}                    x > l
//! ```
//!
//! with `χ = √(u0 − ε)` and `T = e^{−ikl} / [cosh χl − i (k² − χ²)/(2kχ) sinh χl]`.
//! `N = (4πk)^{−1/2}` normalizes the states to `δ(ε − ε′)` over the line.
//!
//! Everything is evaluated through `1/den_s = T e^{ikl} e^{χl}`, which stays
//! O(1) however opaque the barrier is, and through the interior form
//! `ψ(x) = ψ(l) cosh χ(l−x) − ψ′(l) sinh χ(l−x)/χ`, which has no `1/χ`
//! cancellation at the barrier top.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::Result;
use crate::model::{BarrierSpec, Energy};
use crate::numerics::special::{decay_ratio, scaled_sinh_defect, tanh_ratio};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// One stationary scattering state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringSolution {
    barrier: BarrierSpec,
    energy: Energy,
    k: f64,
    chi: f64,
    r: Complex64,
    t: Complex64,
    c: Complex64,
    d: Complex64,
    norm: f64,
    /// `T e^{ikl} e^{χl}`.
    scaled_exit: Complex64,
}

/// Energy-δ normalization `(4π√ε)^{−1/2}`.
pub fn delta_normalization(k: f64) -> f64 {
    1.0 / (4.0 * PI * k).sqrt()
}

/// Probability current `2 Im(ψ* ψ′)`.
pub fn probability_current(psi: Complex64, dpsi: Complex64) -> f64 {
    2.0 * (psi.conj() * dpsi).im
}

/// Solves for the state of energy `eps`; requires `0 < eps < u0`.
pub fn solve(barrier: &BarrierSpec, eps: f64) -> Result<ScatteringSolution> {
    let energy = barrier.sub_barrier(eps)?;
    let k = energy.k();
    let chi = energy.chi(barrier)?;
    let l = barrier.width();
    let y = chi * l;
    let em = decay_ratio(y);
    // e^{−χl}·[cosh χl − i (k²−χ²)/(2kχ) sinh χl]
    let den = Complex64::new(1.0 - y * em, -(k * k - chi * chi) * l * em / (2.0 * k));
    let scaled_exit = den.inv();
    let decay = (-y).exp();
    let t = Complex64::from_polar(decay, -k * l) * scaled_exit;
    let r = -I * ((k * k + chi * chi) * l * em / (2.0 * k)) * scaled_exit;
    let c = scaled_exit * (decay * decay) * (Complex64::new(1.0, k / chi) * 0.5);
    let d = scaled_exit * (Complex64::new(1.0, -k / chi) * 0.5);
    Ok(ScatteringSolution {
        barrier: *barrier,
        energy,
        k,
        chi,
        r,
        t,
        c,
        d,
        norm: delta_normalization(k),
        scaled_exit,
    })
}

/// Phase shift `α = arg T` on the branch continuous in `l` and `ε` with
/// `α(l = 0) = 0`: `α = −kl + arctan[(k² − χ²)/(2kχ) · tanh χl]`.
pub fn phase_shift(barrier: &BarrierSpec, eps: f64) -> Result<f64> {
    let energy = barrier.sub_barrier(eps)?;
    let (k, chi, l) = (energy.k(), energy.chi(barrier)?, barrier.width());
    Ok(-k * l + phase_excess(k, chi, l).atan())
}

/// `g = (k² − χ²)/(2kχ) · tanh χl`, written so that `χ → 0` is regular.
pub(crate) fn phase_excess(k: f64, chi: f64, l: f64) -> f64 {
    (k * k - chi * chi) / (2.0 * k) * l * tanh_ratio(chi * l)
}

impl ScatteringSolution {
    pub fn barrier(&self) -> &BarrierSpec {
        &self.barrier
    }

    pub fn energy(&self) -> Energy {
        self.energy
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn reflection(&self) -> Complex64 {
        self.r
    }

    pub fn transmission(&self) -> Complex64 {
        self.t
    }

    /// Coefficient of `e^{χx}` inside the barrier (without `N`).
    pub fn c(&self) -> Complex64 {
        self.c
    }

    /// Coefficient of `e^{−χx}` inside the barrier (without `N`).
    pub fn d(&self) -> Complex64 {
        self.d
    }

    /// `C e^{χl}`; finite even when `C` itself underflows.
    pub fn c_at_exit(&self) -> Complex64 {
        self.scaled_exit * (-self.chi * self.barrier.width()).exp() * (Complex64::new(1.0, self.k / self.chi) * 0.5)
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// `|T|²`.
    pub fn transmission_probability(&self) -> f64 {
        self.t.norm_sqr()
    }

    /// Continuous phase shift, see [`phase_shift`].
    pub fn phase_shift(&self) -> f64 {
        -self.k * self.barrier.width() + phase_excess(self.k, self.chi, self.barrier.width()).atan()
    }

    /// `ψ(x)` and `dψ/dx` together.
    pub fn value_and_slope(&self, x: f64) -> (Complex64, Complex64) {
        let (k, chi, l, n) = (self.k, self.chi, self.barrier.width(), self.norm);
        if x < 0.0 {
            let fwd = Complex64::from_polar(1.0, k * x);
            let back = fwd.conj() * self.r;
            (n * (fwd + back), n * I * k * (fwd - back))
        } else if x <= l {
            let u = l - x;
            let near = (-chi * x).exp();
            let far = (-chi * (l + u)).exp();
            let sinh_part = near * u * decay_ratio(chi * u);
            let cosh_part = 0.5 * (near + far);
            let value = Complex64::new(cosh_part, -k * sinh_part);
            let slope = Complex64::new(-chi * chi * sinh_part, k * cosh_part);
            (n * self.scaled_exit * value, n * self.scaled_exit * slope)
        } else {
            let out = self.t * Complex64::from_polar(1.0, k * x);
            (n * out, n * I * k * out)
        }
    }

    /// `ψ_ε(x)`.
    pub fn wavefunction_at(&self, x: f64) -> Complex64 {
        self.value_and_slope(x).0
    }

    /// Local probability current `j(x)`; constant in `x` for the full state.
    pub fn current(&self, x: f64) -> f64 {
        let (psi, dpsi) = self.value_and_slope(x);
        probability_current(psi, dpsi)
    }

    /// Current carried by the incident part alone, `2k N²`.
    pub fn incident_current(&self) -> f64 {
        2.0 * self.k * self.norm * self.norm
    }

    /// Transmitted current `2k N² |T|²`.
    pub fn transmitted_current(&self) -> f64 {
        self.incident_current() * self.transmission_probability()
    }

    /// `∫₀^l |ψ_ε|² dx` in closed form.
    ///
    /// With `u = l − x` the interior density is
    /// `N²|T|²[cosh² χu + k² sinh² χu / χ²]`, whose integral is elementary.
    pub fn barrier_probability(&self) -> f64 {
        let l = self.barrier.width();
        if l == 0.0 {
            return 0.0;
        }
        let n2 = self.norm * self.norm;
        n2 * self.scaled_exit.norm_sqr() * self.barrier_integral_scaled()
    }

    /// `e^{−2χl} ∫₀^l [cosh² χu + k² sinh² χu / χ²] du`.
    fn barrier_integral_scaled(&self) -> f64 {
        let l = self.barrier.width();
        let y = self.chi * l;
        0.5 * l * ((-2.0 * y).exp() + decay_ratio(2.0 * y)) + self.k * self.k * l * l * l * scaled_sinh_defect(y)
    }

    /// `∫₀^l |ψ_ε|² dx / (N²|T|²)`, finite for any width that does not
    /// overflow the true value.
    pub(crate) fn barrier_probability_per_transmitted(&self) -> f64 {
        let l = self.barrier.width();
        if l == 0.0 {
            return 0.0;
        }
        let y = self.chi * l;
        let sinh_ratio = if y == 0.0 { 1.0 } else { (2.0 * y).sinh() / (2.0 * y) };
        let defect = if y == 0.0 {
            1.0 / 3.0
        } else {
            crate::numerics::special::sinh_minus_identity(2.0 * y) / (4.0 * y * y * y)
        };
        0.5 * l * (1.0 + sinh_ratio) + self.k * self.k * l * l * l * defect
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate, QuadratureSettings};

    fn sol(u0: f64, eps: f64, l: f64) -> ScatteringSolution {
        solve(&BarrierSpec::new(u0, l).unwrap(), eps).unwrap()
    }

    #[test]
    fn zero_width_is_transparent() {
        let s = sol(12.0, 5.0, 0.0);
        assert!((s.transmission() - 1.0).norm() < 1e-15);
        assert!(s.reflection().norm() < 1e-15);
        assert_eq!(s.barrier_probability(), 0.0);
        assert_eq!(s.phase_shift(), 0.0);
    }

    #[test]
    fn equal_k_and_chi() {
        let s = sol(2.0, 1.0, 1.0);
        assert!((s.transmission().norm() - 1.0 / 1f64.cosh()).abs() < 1e-14);
        assert!((s.transmission().arg() + 1.0).abs() < 1e-14);
        assert!((s.phase_shift() + 1.0).abs() < 1e-15);
    }

    /// Propagates `(ψ, ψ′)` from the exit face back to the entry face with the
    /// 2×2 interior transfer matrix and matches to `e^{ikx} + R e^{−ikx}`.
    /// Returns `(T, R, ψ/N at x)` for `x` inside the barrier.
    fn transfer_oracle(u0: f64, eps: f64, l: f64, x: f64) -> (Complex64, Complex64, Complex64) {
        let k = eps.sqrt();
        let chi = (u0 - eps).sqrt();
        let step = |psi: Complex64, dpsi: Complex64, d: f64| {
            let (c, s) = ((chi * d).cosh(), (chi * d).sinh());
            (psi * c - dpsi * s / chi, -psi * chi * s + dpsi * c)
        };
        let out = Complex64::from_polar(1.0, k * l);
        let (p0, d0) = step(out, I * k * out, l);
        let scale = 2.0 / (p0 + d0 / (I * k));
        let r = (p0 - d0 / (I * k)) / 2.0 * scale;
        let (px, _) = step(out, I * k * out, l - x);
        (scale, r, px * scale)
    }

    #[test]
    fn matches_transfer_matrix() {
        for (u0, eps, l) in [
            (12.0, 11.8, 1.0),
            (12.0, 11.8, 4.0),
            (12.0, 3.0, 2.5),
            (31.4, 12.96, 3.0),
        ] {
            let s = sol(u0, eps, l);
            let (t, r, mid) = transfer_oracle(u0, eps, l, 0.5 * l);
            assert!((s.transmission() - t).norm() < 1e-12 * t.norm().max(1e-3));
            assert!((s.reflection() - r).norm() < 1e-12);
            let psi = s.wavefunction_at(0.5 * l) / s.norm();
            assert!((psi - mid).norm() < 1e-10 * mid.norm());
        }
        let s = sol(12.0, 11.8, 1.0);
        assert!((s.transmission().norm() - 0.4845).abs() < 1e-4);
        assert!((s.phase_shift() + 2.4273).abs() < 1e-4);
        let (t, _, _) = transfer_oracle(12.0, 11.8, 1.0, 0.0);
        assert!((s.transmitted_current() / s.incident_current() - t.norm_sqr()).abs() < 1e-12);
        assert!((t.norm_sqr() - 0.2348).abs() < 1e-4);
    }

    #[test]
    fn flux_phase_and_matching_on_grid() {
        for l in [0.1, 1.0, 10.0] {
            for i in 0..100 {
                let u0 = 12.0;
                let eps = u0 * (0.05 + (0.999 - 0.05) * (i as f64 + 0.5) / 100.0);
                let s = sol(u0, eps, l);
                let flux = s.reflection().norm_sqr() + s.transmission_probability();
                assert!((flux - 1.0).abs() < 1e-12, "eps={eps} l={l}");
                let diff = s.phase_shift() - s.transmission().arg();
                let turns = diff / std::f64::consts::TAU;
                assert!((turns - turns.round()).abs() * std::f64::consts::TAU < 1e-10);
            }
        }
    }

    #[test]
    fn transmission_decays_like_exponential() {
        let (u0, eps): (f64, f64) = (12.0, 3.0);
        let chi = (u0 - eps).sqrt();
        let mut prev = sol(u0, eps, 0.0).transmission().norm();
        for i in 1..60 {
            let l = 0.25 * i as f64;
            let t = sol(u0, eps, l).transmission().norm();
            assert!(t < prev);
            if chi * l >= 8.0 {
                assert!((t / prev / (-chi * 0.25).exp() - 1.0).abs() < 0.01);
            }
            prev = t;
        }
    }

    #[test]
    fn phase_shift_limits() {
        let b = BarrierSpec::new(12.0, 3.7).unwrap();
        let k = 6f64.sqrt();
        assert_eq!(phase_shift(&b, 6.0).unwrap(), -k * 3.7);
        let s = sol(12.0, 11.8, 60.0);
        let limit = (11.6 / (2.0 * (11.8f64 * 0.2).sqrt())).atan();
        assert!((s.phase_shift() + s.k() * 60.0 - limit).abs() < 1e-12);
        assert!((limit - 1.311_874_784_788_675_4).abs() < 1e-12);
    }

    #[test]
    fn wavefunction_is_continuous() {
        for (u0, eps, l) in [(12.0, 11.8, 4.0), (12.0, 0.7, 2.0), (31.4, 31.3, 12.0)] {
            let s = sol(u0, eps, l);
            for x0 in [0.0, l] {
                let (a, da) = s.value_and_slope(x0 - 1e-12);
                let (b, db) = s.value_and_slope(x0 + 1e-12);
                assert!(
                    (a - b).norm() <= 1e-10 * a.norm().max(1e-300) + 1e-11 * s.norm(),
                    "{u0} {eps} {l} x={x0}"
                );
                assert!((da - db).norm() <= 1e-10 * da.norm().max(db.norm()) + 1e-9 * s.norm());
            }
            let exit = s.wavefunction_at(l);
            let expected = s.norm() * s.transmission() * Complex64::from_polar(1.0, s.k() * l);
            assert!((exit - expected).norm() <= 1e-13 * expected.norm());
        }
    }

    #[test]
    fn current_is_uniform() {
        let s = sol(12.0, 11.8, 1.0);
        let j = s.current(-5.0);
        for x in [-1.0, 0.0, 0.3, 0.9, 1.0, 6.0] {
            assert!((s.current(x) - j).abs() < 1e-12 * j.abs().max(1e-3));
        }
        assert!((j - s.transmitted_current()).abs() < 1e-12);
        assert_eq!(
            probability_current(Complex64::new(1.0, 0.0), Complex64::new(0.0, 3.0)),
            6.0
        );
    }

    #[test]
    fn barrier_probability_matches_quadrature() {
        let s = sol(12.0, 11.8, 3.0);
        let q = integrate(
            |x: f64| s.wavefunction_at(x).norm_sqr(),
            0.0,
            3.0,
            &QuadratureSettings::default(),
        )
        .unwrap();
        assert!((s.barrier_probability() - q.value).abs() < 1e-10 * q.value);
    }

    #[test]
    fn barrier_probability_saturates() {
        let p20 = sol(12.0, 11.8, 20.0).barrier_probability();
        let p30 = sol(12.0, 11.8, 30.0).barrier_probability();
        assert!(((p20 - p30) / p30).abs() < 1e-6);
    }

    #[test]
    fn opaque_barrier_stays_finite() {
        let s = sol(31.4, 1.0, 400.0);
        assert!(s.transmission().norm() < 1e-300);
        assert!(s.reflection().norm().is_finite());
        assert!((s.reflection().norm_sqr() - 1.0).abs() < 1e-12);
        assert!(s.barrier_probability().is_finite() && s.barrier_probability() > 0.0);
        assert!(s.wavefunction_at(200.0).norm().is_finite());
    }

    #[test]
    fn rejects_above_barrier() {
        let b = BarrierSpec::new(12.0, 1.0).unwrap();
        assert!(solve(&b, 12.0).is_err());
        assert!(solve(&b, 0.0).is_err());
        assert!(phase_shift(&b, 13.0).is_err());
    }
}
