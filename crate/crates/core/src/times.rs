//! Stationary-state time definitions and their free-flight baselines.
//!
//! With `g(ε) = (k² − χ²)/(2kχ) · tanh χl` the transmission phase is
//! `α = −kl + arctan g`, so
//!
//! * group delay `τ_g = l/(2k) + dα/dε = g′/(1 + g²)`
//! * phase time `t_ph = α/ε + l/k = arctan(g)/ε`
//!
//! and both saturate as `l → ∞`, `τ_g` towards `1/(kχ)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::BarrierSpec;
use crate::numerics::special::{tanh_defect, tanh_ratio};
use crate::numerics::{bisect, default_step, differentiate, Derivative};
use crate::stationary::{phase_excess, phase_shift, solve};

/// Absolute agreement demanded between the analytic and numerical `dα/dε`,
/// scaled by `max(1, |τ_g|)`.
pub const GROUP_DELAY_AGREEMENT: f64 = 1e-8;

/// Smallest stencil the numerical cross-check will use.
const MIN_STEP: f64 = 1e-7;

/// Analytic group delay together with its finite-difference cross-check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupDelay {
    pub value: f64,
    /// `l/(2k) + dα/dε` by Richardson-extrapolated differences, if the stencil fit.
    pub numeric: Option<Derivative>,
    /// Set when the cross-check was skipped or disagreed beyond [`GROUP_DELAY_AGREEMENT`].
    pub flagged: bool,
}

/// Every time definition for one `(ε, l)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimesReport {
    pub eps: f64,
    pub l: f64,
    pub tau_g: f64,
    pub tau_0: f64,
    pub t_ph: f64,
    pub t_free: f64,
    pub tau_d_in: f64,
    pub tau_d_out: f64,
    pub hartman_limit: f64,
    /// Group-delay cross-check did not confirm the analytic value.
    pub flagged: bool,
}

/// Phase time and its free counterpart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseTime {
    pub t_ph: f64,
    pub t_free: f64,
}

/// `dg/dε`.
fn phase_excess_slope(u0: f64, eps: f64, l: f64) -> f64 {
    let k = eps.sqrt();
    let chi = (u0 - eps).sqrt();
    let y = chi * l;
    let s = l * tanh_ratio(y);
    let q = l * l * l * tanh_defect(y);
    (2.0 * eps + u0) / (4.0 * eps * k) * s + (2.0 * eps - u0) / (2.0 * k) * q
}

/// Closed-form group delay without the numerical cross-check.
pub fn group_delay_analytic(barrier: &BarrierSpec, eps: f64) -> Result<f64> {
    let energy = barrier.sub_barrier(eps)?;
    let (u0, l) = (barrier.height(), barrier.width());
    if l == 0.0 {
        return Ok(0.0);
    }
    let g = phase_excess(energy.k(), energy.chi(barrier)?, l);
    Ok(phase_excess_slope(u0, eps, l) / (1.0 + g * g))
}

/// Group delay, confirmed by differentiating the phase numerically.
pub fn group_delay(barrier: &BarrierSpec, eps: f64) -> Result<GroupDelay> {
    let value = group_delay_analytic(barrier, eps)?;
    let u0 = barrier.height();
    let h0 = default_step(eps).min(0.01 * eps.min(u0 - eps));
    if h0 < MIN_STEP {
        return Ok(GroupDelay {
            value,
            numeric: None,
            flagged: true,
        });
    }
    let alpha = |e: f64| phase_shift(barrier, e).unwrap_or(f64::NAN);
    let numeric = match differentiate(alpha, eps, h0, (0.0, u0)) {
        Ok(d) => Derivative {
            value: d.value + free_group_time(eps, barrier.width())?,
            error: d.error,
        },
        Err(Error::DomainViolation { .. }) => {
            return Ok(GroupDelay {
                value,
                numeric: None,
                flagged: true,
            })
        }
        Err(e) => return Err(e),
    };
    let flagged = !((numeric.value - value).abs() <= GROUP_DELAY_AGREEMENT * value.abs().max(1.0));
    Ok(GroupDelay {
        value,
        numeric: Some(numeric),
        flagged,
    })
}

/// Free flight over the barrier width at group velocity `2√ε`.
pub fn free_group_time(eps: f64, l: f64) -> Result<f64> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::invalid(
            "eps",
            format!("energy must be finite and > 0, got {eps}"),
        ));
    }
    Ok(l / (2.0 * eps.sqrt()))
}

/// `t_ph = α/ε + l/√ε`, evaluated as `arctan(g)/ε`.
pub fn phase_time(barrier: &BarrierSpec, eps: f64) -> Result<PhaseTime> {
    let energy = barrier.sub_barrier(eps)?;
    let (k, l) = (energy.k(), barrier.width());
    let g = phase_excess(k, energy.chi(barrier)?, l);
    Ok(PhaseTime {
        t_ph: g.atan() / eps,
        t_free: l / k,
    })
}

/// Barrier-region probability over the incident current.
pub fn dwell_time_incident(barrier: &BarrierSpec, eps: f64) -> Result<f64> {
    let sol = solve(barrier, eps)?;
    Ok(sol.barrier_probability() / sol.incident_current())
}

/// Barrier-region probability over the transmitted current.
///
/// Computed as `∫|ψ/T|² dx / (2k)` so it stays finite while `|T|²`
/// underflows.
pub fn dwell_time_transmitted(barrier: &BarrierSpec, eps: f64) -> Result<f64> {
    let sol = solve(barrier, eps)?;
    Ok(sol.barrier_probability_per_transmitted() / (2.0 * sol.k()))
}

/// Opaque-barrier limit of the group delay, `1/√(ε(u0 − ε))`.
pub fn hartman_limit(u0: f64, eps: f64) -> Result<f64> {
    if !(u0.is_finite() && eps > 0.0 && eps < u0) {
        return Err(Error::NotSubBarrier { eps, u0 });
    }
    Ok(1.0 / (eps * (u0 - eps)).sqrt())
}

impl TimesReport {
    pub fn compute(barrier: &BarrierSpec, eps: f64) -> Result<Self> {
        let gd = group_delay(barrier, eps)?;
        let l = barrier.width();
        let phase = phase_time(barrier, eps)?;
        Ok(Self {
            eps,
            l,
            tau_g: gd.value,
            tau_0: free_group_time(eps, l)?,
            t_ph: phase.t_ph,
            t_free: phase.t_free,
            tau_d_in: dwell_time_incident(barrier, eps)?,
            tau_d_out: dwell_time_transmitted(barrier, eps)?,
            hartman_limit: hartman_limit(barrier.height(), eps)?,
            flagged: gd.flagged,
        })
    }
}

/// Reports over a list of widths, in input order.
pub fn width_sweep(u0: f64, eps: f64, widths: &[f64]) -> Result<Vec<TimesReport>> {
    widths
        .par_iter()
        .map(|&l| TimesReport::compute(&BarrierSpec::new(u0, l)?, eps))
        .collect()
}

/// Reports over a list of energies, in input order.
pub fn energy_sweep(barrier: &BarrierSpec, energies: &[f64]) -> Result<Vec<TimesReport>> {
    energies.par_iter().map(|&e| TimesReport::compute(barrier, e)).collect()
}

/// `τ_g − τ_0`, whose zero is where the barrier stops slowing the packet.
pub fn excess_delay(barrier: &BarrierSpec, eps: f64) -> Result<f64> {
    Ok(group_delay_analytic(barrier, eps)? - free_group_time(eps, barrier.width())?)
}

/// First root of `τ_g(ε) = τ_0(ε)` in `[eps_lo, eps_hi]`, located by scanning
/// `samples` points for a sign change and bisecting. `None` if no change.
pub fn delay_crossing(barrier: &BarrierSpec, eps_lo: f64, eps_hi: f64, samples: usize) -> Result<Option<f64>> {
    if !(eps_lo < eps_hi) {
        return Err(Error::invalid("eps", format!("empty range [{eps_lo}, {eps_hi}]")));
    }
    if samples < 2 {
        return Err(Error::invalid("steps", "need at least two samples"));
    }
    barrier.sub_barrier(eps_lo)?;
    barrier.sub_barrier(eps_hi)?;
    let grid: Vec<f64> = (0..samples)
        .map(|i| eps_lo + (eps_hi - eps_lo) * i as f64 / (samples - 1) as f64)
        .collect();
    let values = grid
        .iter()
        .map(|&e| excess_delay(barrier, e))
        .collect::<Result<Vec<f64>>>()?;
    for i in 1..samples {
        if values[i - 1] == 0.0 {
            return Ok(Some(grid[i - 1]));
        }
        if values[i - 1].signum() != values[i].signum() {
            let f = |e: f64| excess_delay(barrier, e).unwrap_or(f64::NAN);
            return bisect(f, grid[i - 1], grid[i], 1e-13 * eps_hi).map(Some);
        }
    }
    Ok(if values[samples - 1] == 0.0 { Some(eps_hi) } else { None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate, QuadratureSettings};
    use proptest::prelude::*;

    fn bar(u0: f64, l: f64) -> BarrierSpec {
        BarrierSpec::new(u0, l).unwrap()
    }

    #[test]
    fn zero_width() {
        let r = TimesReport::compute(&bar(12.0, 0.0), 11.8).unwrap();
        assert_eq!(
            (r.tau_g, r.tau_0, r.t_ph, r.t_free, r.tau_d_in, r.tau_d_out),
            (0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        );
        assert!(r.hartman_limit > 0.0);
    }

    #[test]
    fn free_time_values() {
        assert_eq!(free_group_time(4.0, 8.0).unwrap(), 2.0);
        assert!((free_group_time(11.8, 10.0).unwrap() - 1.4556).abs() < 1e-4);
        assert!(free_group_time(0.0, 1.0).is_err());
    }

    #[test]
    fn hartman_values() {
        assert_eq!(hartman_limit(2.0, 1.0).unwrap(), 1.0);
        assert!((hartman_limit(12.0, 11.8).unwrap() - 0.65095).abs() < 1e-5);
        assert!((hartman_limit(12.0, 3.0).unwrap() - hartman_limit(12.0, 9.0).unwrap()).abs() < 1e-16);
        assert!(hartman_limit(12.0, 12.0).is_err());
        let deep = group_delay_analytic(&bar(12.0, 25.0), 11.8).unwrap();
        assert!((deep - hartman_limit(12.0, 11.8).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn small_width_expansion() {
        let (u0, eps, l): (f64, f64, f64) = (12.0, 11.8, 0.005);
        let expected = l * (2.0 * eps + u0) / (4.0 * eps * eps.sqrt());
        let tau = group_delay_analytic(&bar(u0, l), eps).unwrap();
        assert!(((tau - expected) / expected).abs() < 0.01);
        for i in 1..=10 {
            let l = 0.01 * i as f64;
            assert!(group_delay_analytic(&bar(u0, l), eps).unwrap() > free_group_time(eps, l).unwrap());
        }
    }

    #[test]
    fn phase_time_values() {
        for l in [0.5, 5.0, 50.0] {
            assert_eq!(phase_time(&bar(12.0, l), 6.0).unwrap().t_ph, 0.0);
        }
        let t = phase_time(&bar(12.0, 30.0), 11.8).unwrap();
        assert!((t.t_ph - 0.11119).abs() < 1e-4);
        assert!((t.t_free - 30.0 / 11.8f64.sqrt()).abs() < 1e-12);
        // α/ε + l/k agrees with arctan(g)/ε
        let b = bar(12.0, 2.3);
        let direct = phase_shift(&b, 7.0).unwrap() / 7.0 + 2.3 / 7f64.sqrt();
        assert!((phase_time(&b, 7.0).unwrap().t_ph - direct).abs() < 1e-13);
    }

    fn dwell_oracle(u0: f64, eps: f64, l: f64) -> (f64, f64) {
        let s = solve(&bar(u0, l), eps).unwrap();
        let q = integrate(
            |x: f64| s.wavefunction_at(x).norm_sqr(),
            0.0,
            l,
            &QuadratureSettings::default(),
        )
        .unwrap()
        .value;
        (q / s.incident_current(), q / s.transmitted_current())
    }

    #[test]
    fn dwell_times_match_quadrature() {
        for l in [1.0, 3.0] {
            let (din, dout) = dwell_oracle(12.0, 11.8, l);
            let b = bar(12.0, l);
            assert!((dwell_time_incident(&b, 11.8).unwrap() - din).abs() < 1e-9 * din.max(1.0));
            assert!((dwell_time_transmitted(&b, 11.8).unwrap() - dout).abs() < 1e-9 * dout.max(1.0));
        }
    }

    #[test]
    fn dwell_ratio_is_inverse_transmission() {
        let b = bar(12.0, 4.0);
        let s = solve(&b, 9.0).unwrap();
        let ratio = dwell_time_transmitted(&b, 9.0).unwrap() / dwell_time_incident(&b, 9.0).unwrap();
        assert!((ratio * s.transmission_probability() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dwell_dichotomy() {
        let din = |l| dwell_time_incident(&bar(12.0, l), 11.8).unwrap();
        let dout = |l| dwell_time_transmitted(&bar(12.0, l), 11.8).unwrap();
        assert!(((din(20.0) - din(30.0)) / din(30.0)).abs() < 1e-6);
        let growth = (2.0 * 0.2f64.sqrt()).exp();
        for l in [15.0, 20.0, 25.0] {
            assert!((dout(l + 1.0) / dout(l) / growth - 1.0).abs() < 0.01);
        }
        let mut prev_in = 0.0;
        let mut prev_out = 0.0;
        for i in 0..=50 {
            let l = 0.5 * i as f64;
            assert!(din(l) >= prev_in);
            if l >= 5.0 {
                assert!(dout(l) > prev_out);
            }
            prev_in = din(l);
            prev_out = dout(l);
        }
    }

    #[test]
    fn crossing_root() {
        let roots: Vec<f64> = [5.0, 6.32, 10.0, 20.0]
            .iter()
            .map(|&l| delay_crossing(&bar(8.0, l), 4.0, 7.999, 400).unwrap().unwrap())
            .collect();
        assert!(roots[1] > 7.7 && roots[1] < 8.0);
        assert!(roots.windows(2).all(|w| w[1] > w[0]));
        let b = bar(8.0, 6.32);
        assert!(excess_delay(&b, roots[1]).unwrap().abs() < 1e-9);
        assert_eq!(delay_crossing(&b, 1.0, 5.0, 50).unwrap(), None);
    }

    #[test]
    fn near_top_is_finite() {
        let b = bar(12.0, 6.0);
        let r = TimesReport::compute(&b, 12.0 * (1.0 - 1e-9)).unwrap();
        assert!(r.tau_g.is_finite() && r.t_ph.is_finite() && r.tau_d_out.is_finite());
        assert!(r.flagged);
    }

    #[test]
    fn sweeps_keep_order() {
        let widths = [0.0, 3.0, 1.0, 10.0];
        let rows = width_sweep(12.0, 11.8, &widths).unwrap();
        assert!(rows.iter().zip(widths).all(|(r, l)| r.l == l));
    }

    #[test]
    fn analytic_matches_numeric_on_grid() {
        for l in [0.1, 1.0, 10.0] {
            for i in 0..100 {
                let eps = 12.0 * (0.05 + (0.999 - 0.05) * (i as f64 + 0.5) / 100.0);
                let gd = group_delay(&bar(12.0, l), eps).unwrap();
                assert!(!gd.flagged, "eps={eps} l={l} {gd:?}");
            }
        }
    }

    proptest! {
        #[test]
        fn saturation_at_large_width(eps_frac in 0.05f64..0.98, u0 in 1.0f64..40.0) {
            let eps = eps_frac * u0;
            let chi = (u0 - eps).sqrt();
            let big = 12.0 / chi;
            let b1 = bar(u0, big);
            let b2 = bar(u0, 2.0 * big);
            let g1 = group_delay_analytic(&b1, eps).unwrap();
            let g2 = group_delay_analytic(&b2, eps).unwrap();
            prop_assert!((g1 - g2).abs() < 1e-6);
            let p1 = phase_time(&b1, eps).unwrap().t_ph;
            let p2 = phase_time(&b2, eps).unwrap().t_ph;
            prop_assert!((p1 - p2).abs() < 1e-6);
        }

        #[test]
        fn report_entries_finite(eps_frac in 1e-3f64..0.999, l in 0.0f64..60.0) {
            let r = TimesReport::compute(&bar(12.0, l), 12.0 * eps_frac).unwrap();
            for v in [r.tau_g, r.tau_0, r.t_ph, r.t_free, r.tau_d_in, r.tau_d_out, r.hartman_limit] {
                prop_assert!(v.is_finite());
            }
            prop_assert!((r.tau_0 - l / (2.0 * r.eps.sqrt())).abs() <= 1e-15 * r.tau_0.max(1.0));
        }

        #[test]
        fn hartman_symmetry(u0 in 0.1f64..100.0, frac in 0.01f64..0.99) {
            let e = u0 * frac;
            let a = hartman_limit(u0, e).unwrap();
            let b = hartman_limit(u0, u0 - e).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a);
        }
    }
}
