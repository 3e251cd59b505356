//! Wave-packet synthesis from stationary states and the packet timing
//! observables.
//!
//! The packet `ψ(x,0) = A[1 − cos(2x/b)] e^{ipx}` on `(−πb, 0)` is expanded in
//! left-incident scattering states, `f(ε) = ∫ψ_ε*(x) ψ(x,0) dx`, and
//! reassembled as
//!
//! ```text
//! ψ(x,t) = ∫₀^{u0} f(ε) ψ_ε(x) e^{−iεt} dε = ∫₀^{√u0} f ψ_ε e^{−ik²t} 2k dk
//! ```
//!
//! The `k` form is used throughout: the integrand is smooth at both ends and
//! its oscillation rate `2kt` fixes the panel size.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{BarrierSpec, PacketSpec};
use crate::numerics::{local_maxima, refine_max, simpson_uniform, GkGrid, Peak};
use crate::stationary::solve;

/// `∫_{−πb}^0 (1 − cos(2x/b)) e^{iqx} dx`.
///
/// Equal to `−8b sin(πu/2) e^{−iπu/2} / (u(u² − 4))` with `u = bq`; the
/// zero of the denominator nearest `u` is divided out analytically, so
/// `q = 0` and `q = ±2/b` need no special casing.
pub fn window_overlap(q: f64, b: f64) -> Complex64 {
    let u = b * q;
    let m = (u / 2.0).round().clamp(-1.0, 1.0);
    let d = u - 2.0 * m;
    let z = 0.5 * PI * d;
    let sinc = if z.abs() < 1e-4 { 1.0 - z * z / 6.0 } else { z.sin() / z };
    let other = if m == 0.0 {
        (u - 2.0) * (u + 2.0)
    } else if m > 0.0 {
        u * (u + 2.0)
    } else {
        u * (u - 2.0)
    };
    let sign = if m == 0.0 { 1.0 } else { -1.0 };
    Complex64::from_polar(-8.0 * b * sign * 0.5 * PI * sinc / other, -0.5 * PI * u)
}

/// Stationary states the packet is expanded in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Basis {
    /// Left-incident states of the barrier, truncated at its height.
    Barrier(BarrierSpec),
    /// Plane waves `e^{ikx}` (T = 1, R = 0) for `0 < ε ≤ cutoff`.
    Free { cutoff: f64 },
}

impl Basis {
    pub fn cutoff(&self) -> f64 {
        match self {
            Basis::Barrier(b) => b.height(),
            Basis::Free { cutoff } => *cutoff,
        }
    }

    fn validate(&self) -> Result<()> {
        let c = self.cutoff();
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::invalid(
                "u0",
                format!("spectral cutoff must be finite and > 0, got {c}"),
            ));
        }
        Ok(())
    }

    /// `ψ_ε(x)/N` and the reflection amplitude at `k`.
    fn state(&self, k: f64, x: f64) -> Result<(Complex64, Complex64)> {
        match self {
            Basis::Barrier(b) => {
                let s = solve(b, k * k)?;
                Ok((s.wavefunction_at(x) / s.norm(), s.reflection()))
            }
            Basis::Free { .. } => Ok((Complex64::from_polar(1.0, k * x), Complex64::new(0.0, 0.0))),
        }
    }

    fn width(&self) -> f64 {
        match self {
            Basis::Barrier(b) => b.width(),
            Basis::Free { .. } => 0.0,
        }
    }
}

/// `f(ε)` for one energy; `ε` must lie in `(0, cutoff]`.
pub fn spectral_value(packet: &PacketSpec, basis: &Basis, eps: f64) -> Result<Complex64> {
    basis.validate()?;
    if !(eps > 0.0 && eps <= basis.cutoff()) {
        return Err(Error::invalid(
            "eps",
            format!(
                "energy {eps} lies outside the truncated spectrum (0, {}]",
                basis.cutoff()
            ),
        ));
    }
    let k = eps.sqrt();
    let r = if eps < basis.cutoff() {
        basis.state(k, 0.0)?.1
    } else {
        top_reflection(basis)
    };
    Ok(overlap(packet, k, r))
}

fn overlap(packet: &PacketSpec, k: f64, r: Complex64) -> Complex64 {
    let (p, b) = (packet.momentum(), packet.half_width());
    let n = 1.0 / (4.0 * PI * k).sqrt();
    n * packet.amplitude() * (window_overlap(p - k, b) + r.conj() * window_overlap(p + k, b))
}

/// Reflection amplitude at `ε = u0`, where `χ = 0`: `R = −i u0 l/(2k) / (1 − i u0 l/(2k))`.
fn top_reflection(basis: &Basis) -> Complex64 {
    match basis {
        Basis::Barrier(b) => {
            let a = b.height() * b.width() / (2.0 * b.height().sqrt());
            Complex64::new(0.0, -a) / Complex64::new(1.0, -a)
        }
        Basis::Free { .. } => Complex64::new(0.0, 0.0),
    }
}

/// Sizing of the `k` grid behind a [`SpectralAmplitude`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Largest `|t|` the synthesis will be asked for.
    pub t_max: f64,
    /// Largest `|x|` the synthesis will be asked for.
    pub x_extent: f64,
    /// Panels per half oscillation; 2 halves every panel.
    pub refine: f64,
    pub min_panels: usize,
}

impl GridSpec {
    pub fn new(t_max: f64, x_extent: f64) -> Self {
        Self {
            t_max,
            x_extent,
            refine: 1.0,
            min_panels: 32,
        }
    }

    pub fn refined(mut self, factor: f64) -> Self {
        self.refine *= factor;
        self
    }
}

/// Uniform `k` panels merged with panels uniform in `χ` below the barrier
/// top. Transmission through a wide barrier lives in `χ ≲ 1/l`, a band far
/// narrower in `k` than one oscillation.
fn spectral_breaks(basis: &Basis, kmax: f64, panels: usize, refine: f64) -> Vec<f64> {
    let mut breaks: Vec<f64> = (0..=panels).map(|i| kmax * i as f64 / panels as f64).collect();
    let l = basis.width();
    if l > 0.0 {
        let u0 = kmax * kmax;
        let chi_top = (TOP_BAND / l).min(kmax);
        let n = (refine * CHI_PANELS_PER_DECAY * chi_top * l).ceil().max(1.0) as usize;
        breaks.extend((1..n).map(|j| {
            let chi = chi_top * j as f64 / n as f64;
            (u0 - chi * chi).max(0.0).sqrt()
        }));
        breaks.push((u0 - chi_top * chi_top).max(0.0).sqrt());
    }
    breaks.sort_by(f64::total_cmp);
    let min_gap = 1e-9 * kmax;
    let mut merged: Vec<f64> = Vec::with_capacity(breaks.len());
    for b in breaks {
        match merged.last() {
            Some(&last) if b - last < min_gap => {
                if b == kmax {
                    *merged.last_mut().unwrap() = kmax;
                }
            }
            _ => merged.push(b),
        }
    }
    merged
}

/// `χl` beyond which the transmitted share is negligible.
const TOP_BAND: f64 = 40.0;
/// Panels per unit of `χl` in the top band.
const CHI_PANELS_PER_DECAY: f64 = 2.0;

/// Sampled `f(ε)` with quadrature weights, ready for synthesis.
#[derive(Debug, Clone)]
pub struct SpectralAmplitude {
    packet: PacketSpec,
    basis: Basis,
    grid: GkGrid,
    spec: GridSpec,
    k: Vec<f64>,
    values: Vec<Complex64>,
    captured_weight: f64,
}

impl SpectralAmplitude {
    pub fn build(packet: &PacketSpec, basis: Basis, spec: GridSpec) -> Result<Self> {
        basis.validate()?;
        if !(spec.t_max.is_finite() && spec.t_max >= 0.0 && spec.x_extent.is_finite() && spec.x_extent >= 0.0) {
            return Err(Error::invalid("t_max", "grid extents must be finite and >= 0"));
        }
        if !(spec.refine.is_finite() && spec.refine > 0.0) || spec.min_panels == 0 {
            return Err(Error::invalid(
                "refine",
                "grid refinement must be > 0 with at least one panel",
            ));
        }
        let kmax = basis.cutoff().sqrt();
        let reach = spec.x_extent + basis.width() + PI * packet.half_width() + 2.0 * kmax * spec.t_max;
        let panels = ((spec.refine * kmax * reach / PI).ceil() as usize).max(spec.min_panels);
        let grid = GkGrid::from_breaks(&spectral_breaks(&basis, kmax, panels, spec.refine))?;
        let k = grid.nodes().to_vec();
        let values = k
            .iter()
            .map(|&k| Ok(overlap(packet, k, basis.state(k, 0.0)?.1)))
            .collect::<Result<Vec<_>>>()?;
        let mut amp = Self {
            packet: *packet,
            basis,
            grid,
            spec,
            k,
            values,
            captured_weight: 0.0,
        };
        let density: Vec<f64> = amp
            .values
            .iter()
            .zip(&amp.k)
            .map(|(f, k)| f.norm_sqr() * 2.0 * k)
            .collect();
        amp.captured_weight = amp.grid.sum(&density).0;
        Ok(amp)
    }

    pub fn packet(&self) -> &PacketSpec {
        &self.packet
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn grid_spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn panels(&self) -> usize {
        self.grid.panels()
    }

    /// Energies `ε_i = k_i²` of the nodes.
    pub fn energies(&self) -> Vec<f64> {
        self.k.iter().map(|k| k * k).collect()
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.k
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Quadrature weights in `ε` (the `k` weights times `2k`).
    pub fn weights(&self) -> Vec<f64> {
        self.grid
            .kronrod_weights()
            .iter()
            .zip(&self.k)
            .map(|(w, k)| 2.0 * k * w)
            .collect()
    }

    /// `∫₀^{cutoff} |f|² dε`, the share of the packet norm the basis holds.
    pub fn captured_weight(&self) -> f64 {
        self.captured_weight
    }

    /// Same amplitude multiplied by `e^{iθ}`.
    pub fn rotated(&self, theta: f64) -> Self {
        let phase = Complex64::from_polar(1.0, theta);
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= phase);
        out
    }

    /// Same grid, every value set to zero.
    pub fn zeroed(&self) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        out.captured_weight = 0.0;
        out
    }

    fn integrand(&self, x: f64) -> Result<Vec<Complex64>> {
        self.k
            .iter()
            .zip(&self.values)
            .map(|(&k, f)| Ok(f * self.basis.state(k, x)?.0 / (4.0 * PI * k).sqrt() * (2.0 * k)))
            .collect()
    }
}

/// Uniform time grid `start + i·step`, `i < len`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    start: f64,
    step: f64,
    len: usize,
}

impl TimeGrid {
    pub fn new(start: f64, step: f64, len: usize) -> Result<Self> {
        if !(start.is_finite() && step.is_finite() && step > 0.0) || len == 0 {
            return Err(Error::invalid(
                "dt",
                "time grid needs a finite start, a positive step and one node",
            ));
        }
        Ok(Self { start, step, len })
    }

    /// Grid covering `[start, end]` with step at most `step`.
    pub fn covering(start: f64, end: f64, step: f64) -> Result<Self> {
        if !(end > start) {
            return Err(Error::invalid("t_max", format!("empty time window [{start}, {end}]")));
        }
        let n = ((end - start) / step).ceil().max(2.0) as usize;
        Self::new(start, (end - start) / n as f64, n + 1)
    }

    pub fn at(&self, i: usize) -> f64 {
        self.start + self.step * i as f64
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn end(&self) -> f64 {
        self.at(self.len - 1)
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.at(i)).collect()
    }
}

/// `|ψ(x,t)|²` at a fixed point.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub x: f64,
    pub times: Vec<f64>,
    pub density: Vec<f64>,
}

impl TimeSeries {
    pub fn new(x: f64, times: Vec<f64>, density: Vec<f64>) -> Result<Self> {
        if times.len() != density.len() {
            return Err(Error::invalid("density", "times and density differ in length"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("times", "times must be strictly increasing"));
        }
        if density.iter().any(|d| !(*d >= 0.0)) {
            return Err(Error::invalid("density", "density must be nonnegative"));
        }
        Ok(Self { x, times, density })
    }
}

/// Error control of the synthesis quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthesisSettings {
    /// Bound on the Kronrod–Gauss discrepancy relative to `∫|integrand| dk`.
    pub rel_tol: f64,
}

impl Default for SynthesisSettings {
    fn default() -> Self {
        Self { rel_tol: 1e-8 }
    }
}

const RESEED: usize = 128;

/// `ψ(x,t)` on a time grid.
pub fn synthesize_amplitude(
    f: &SpectralAmplitude,
    x: f64,
    times: &TimeGrid,
    settings: &SynthesisSettings,
) -> Result<Vec<Complex64>> {
    let reach = times.start.abs().max(times.end().abs());
    if reach > f.spec.t_max * (1.0 + 1e-12) {
        return Err(Error::GridTooCoarse {
            what: "time",
            built: f.spec.t_max,
            requested: reach,
        });
    }
    if x.abs() > f.spec.x_extent * (1.0 + 1e-12) + f.basis.width() {
        return Err(Error::GridTooCoarse {
            what: "position",
            built: f.spec.x_extent,
            requested: x.abs(),
        });
    }
    let h = f.integrand(x)?;
    let wk = f.grid.kronrod_weights();
    let wg = f.grid.gauss_weights();
    let hk: Vec<Complex64> = h.iter().zip(wk).map(|(h, w)| h * w).collect();
    let hd: Vec<Complex64> = h.iter().zip(wk.iter().zip(wg)).map(|(h, (a, b))| h * (a - b)).collect();
    let scale: f64 = h.iter().zip(wk).map(|(h, w)| h.norm() * w).sum();
    let tolerance = settings.rel_tol * scale;
    let k2: Vec<f64> = f.k.iter().map(|k| k * k).collect();
    let per_panel = f.grid.nodes().len() / f.grid.panels();

    let blocks: Vec<usize> = (0..times.len).step_by(RESEED).collect();
    let results: Vec<Result<Vec<Complex64>>> = blocks
        .par_iter()
        .map(|&first| {
            let last = (first + RESEED).min(times.len);
            let t0 = times.at(first);
            let mut phasor: Vec<Complex64> = k2.iter().map(|e| Complex64::from_polar(1.0, -(e * t0) % TAU)).collect();
            let stepper: Vec<Complex64> = k2
                .iter()
                .map(|e| Complex64::from_polar(1.0, -(e * times.step) % TAU))
                .collect();
            let mut out = Vec::with_capacity(last - first);
            for i in first..last {
                let mut total = Complex64::new(0.0, 0.0);
                let mut estimate = 0.0;
                for p in 0..f.grid.panels() {
                    let mut diff = Complex64::new(0.0, 0.0);
                    for j in p * per_panel..(p + 1) * per_panel {
                        total += hk[j] * phasor[j];
                        diff += hd[j] * phasor[j];
                    }
                    estimate += diff.norm();
                }
                if estimate > tolerance && estimate > 0.0 {
                    return Err(Error::SynthesisNotConverged {
                        t: times.at(i),
                        estimate,
                        tolerance,
                    });
                }
                out.push(total);
                phasor.iter_mut().zip(&stepper).for_each(|(z, s)| *z *= s);
            }
            Ok(out)
        })
        .collect();
    let mut out = Vec::with_capacity(times.len);
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

/// `|ψ(x,t)|²` on a time grid.
pub fn synthesize(f: &SpectralAmplitude, x: f64, times: &TimeGrid, settings: &SynthesisSettings) -> Result<TimeSeries> {
    let psi = synthesize_amplitude(f, x, times, settings)?;
    Ok(TimeSeries {
        x,
        times: times.times(),
        density: psi.iter().map(|z| z.norm_sqr()).collect(),
    })
}

/// `ψ(x, t)` for many `x` at one time.
pub fn synthesize_profile(f: &SpectralAmplitude, xs: &[f64], t: f64) -> Result<Vec<Complex64>> {
    let grid = TimeGrid::new(t, 1.0, 1)?;
    let settings = SynthesisSettings { rel_tol: f64::INFINITY };
    xs.par_iter()
        .map(|&x| synthesize_amplitude(f, x, &grid, &settings).map(|v| v[0]))
        .collect()
}

/// Knobs of the timing observables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingSettings {
    /// Coarse time step of the window scan.
    pub dt: f64,
    /// The fine grid around the peak uses `dt / fine_factor`.
    pub fine_factor: usize,
    /// First window length tried; doubled until the criteria hold.
    pub window: f64,
    /// Longest window tried for the arrival of the maximum.
    pub arrival_cap: f64,
    /// Longest window tried for the mean time.
    pub mean_cap: f64,
    /// Density at the late end of the window, relative to the peak.
    pub end_ratio: f64,
    /// Share of either mean-time integral allowed in the last tenth of the window.
    pub tail_share: f64,
    /// Secondary maxima below this fraction of the peak are dropped.
    pub secondary_floor: f64,
    /// Refinement factor of the spectral grid.
    pub refine: f64,
    pub synthesis: SynthesisSettings,
}

impl Default for TimingSettings {
    fn default() -> Self {
        Self {
            dt: 0.01,
            fine_factor: 20,
            window: 4.0,
            arrival_cap: 512.0,
            mean_cap: 128.0,
            end_ratio: 0.01,
            tail_share: 0.005,
            secondary_floor: 0.01,
            refine: 1.0,
            synthesis: SynthesisSettings::default(),
        }
    }
}

impl TimingSettings {
    /// Every step halved: coarser-to-finer check of the observables.
    pub fn halved(mut self) -> Self {
        self.dt *= 0.5;
        self.refine *= 2.0;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.window > 0.0 && self.arrival_cap >= self.window && self.mean_cap >= self.window) {
            return Err(Error::invalid(
                "dt",
                "time step and windows must be positive and caps at least the first window",
            ));
        }
        if self.fine_factor < 2 {
            return Err(Error::invalid("fine_factor", "must be at least 2"));
        }
        Ok(())
    }
}

/// Time of the density maximum at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakArrival {
    pub t: f64,
    pub peak_density: f64,
    /// Window end that satisfied the criteria.
    pub window_end: f64,
    /// `ρ(0)/ρ_max`; the basis is not complete, so this is not small.
    pub start_ratio: f64,
    /// `ρ(T)/ρ_max`.
    pub end_ratio: f64,
    /// Other local maxima above the floor, in time order.
    pub secondary: Vec<Peak>,
    pub captured_weight: f64,
}

/// Global maximum of `|ψ(x,t)|²` for `t ≥ 0`.
///
/// The window `[0, T]` doubles until the maximum is interior and the density
/// at `T` is below `end_ratio` of it; the coarse argmax is then refined on a
/// fine grid and by parabolic interpolation.
pub fn arrival_time_of_max(
    packet: &PacketSpec,
    basis: Basis,
    x: f64,
    settings: &TimingSettings,
) -> Result<PeakArrival> {
    settings.validate()?;
    let mut end = settings.window;
    loop {
        let amp = SpectralAmplitude::build(packet, basis, GridSpec::new(end, x.abs()).refined(settings.refine))?;
        let grid = TimeGrid::covering(0.0, end, settings.dt)?;
        let series = synthesize(&amp, x, &grid, &settings.synthesis)?;
        let (index, &max) =
            series.density.iter().enumerate().fold(
                (0, &series.density[0]),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
        let last = series.density.len() - 1;
        let end_ratio = series.density[last] / max;
        if index == 0 {
            return Err(Error::EdgeMaximum { index, len: last + 1 });
        }
        if index == last || end_ratio >= settings.end_ratio {
            if end * 2.0 > settings.arrival_cap {
                return Err(Error::WindowTooShort {
                    t_end: end,
                    ratio: end_ratio,
                });
            }
            end *= 2.0;
            continue;
        }
        let lo = grid.at(index.saturating_sub(2));
        let hi = grid.at((index + 2).min(last));
        let fine = TimeGrid::covering(lo, hi, grid.step() / settings.fine_factor as f64)?;
        let fine_series = synthesize(&amp, x, &fine, &settings.synthesis)?;
        let peak = refine_max(&fine_series.times, &fine_series.density)?;
        let secondary = local_maxima(&series.times, &series.density)?
            .into_iter()
            .filter(|p| p.index != index && p.value >= settings.secondary_floor * max)
            .collect();
        return Ok(PeakArrival {
            t: peak.t,
            peak_density: peak.value,
            window_end: end,
            start_ratio: series.density[0] / max,
            end_ratio,
            secondary,
            captured_weight: amp.captured_weight(),
        });
    }
}

/// Arrival of the free packet's maximum at `x = 0` with the spectrum cut at `cutoff`.
pub fn free_arrival_time(packet: &PacketSpec, cutoff: f64, settings: &TimingSettings) -> Result<PeakArrival> {
    arrival_time_of_max(packet, Basis::Free { cutoff }, 0.0, settings)
}

/// `∫ t ρ dt / ∫ ρ dt` with the shares of the last tenth of the window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanTime {
    pub t_mean: f64,
    pub window_end: f64,
    /// Share of `∫ρ` in the last tenth of the window.
    pub tail_share: f64,
    /// Share of `∫tρ` in the last tenth of the window.
    pub moment_share: f64,
}

/// Mean time of a uniformly sampled series.
///
/// Fails with [`Error::TailCriterion`] when the last tenth of the window
/// holds `max_share` or more of either integral.
pub fn mean_time_of_series(series: &TimeSeries, max_share: f64) -> Result<MeanTime> {
    let n = series.times.len();
    if n < 3 {
        return Err(Error::invalid("times", "need at least three samples"));
    }
    let step = (series.times[n - 1] - series.times[0]) / (n - 1) as f64;
    if series
        .times
        .windows(2)
        .any(|w| ((w[1] - w[0]) - step).abs() > 1e-9 * step.max(series.times[n - 1].abs()))
    {
        return Err(Error::invalid("times", "mean time needs a uniform grid"));
    }
    let moment: Vec<f64> = series.times.iter().zip(&series.density).map(|(t, d)| t * d).collect();
    let m0 = simpson_uniform(&series.density, step);
    let m1 = simpson_uniform(&moment, step);
    if !(m0 > 0.0) {
        return Err(Error::invalid("density", "density integrates to zero"));
    }
    let tail_from = ((n - 1) as f64 * 0.9).floor() as usize;
    let t0 = simpson_uniform(&series.density[tail_from..], step);
    let t1 = simpson_uniform(&moment[tail_from..], step);
    let tail_share = t0 / m0;
    let moment_share = t1 / m1;
    if !(tail_share < max_share && moment_share.abs() < max_share) {
        return Err(Error::TailCriterion {
            t_cut: series.times[n - 1],
            tail_share,
            moment_share,
        });
    }
    Ok(MeanTime {
        t_mean: m1 / m0,
        window_end: series.times[n - 1],
        tail_share,
        moment_share,
    })
}

/// Mean passage time of `x`, growing the window `[0, T]` until the tail
/// criterion holds.
pub fn mean_crossing_time(packet: &PacketSpec, basis: Basis, x: f64, settings: &TimingSettings) -> Result<MeanTime> {
    settings.validate()?;
    let mut end = settings.window;
    loop {
        let amp = SpectralAmplitude::build(packet, basis, GridSpec::new(end, x.abs()).refined(settings.refine))?;
        let grid = TimeGrid::covering(0.0, end, settings.dt)?;
        let series = synthesize(&amp, x, &grid, &settings.synthesis)?;
        match mean_time_of_series(&series, settings.tail_share) {
            Err(e @ Error::TailCriterion { .. }) => {
                if end * 2.0 > settings.mean_cap {
                    return Err(e);
                }
                end *= 2.0;
            }
            other => return other,
        }
    }
}

/// Packet observables at the exit face of one barrier.
#[derive(Debug, Clone, PartialEq)]
pub struct PacketRow {
    pub l: f64,
    pub arrival: Result<PeakArrival>,
    pub t_in: f64,
    pub mean: Result<MeanTime>,
}

impl PacketRow {
    pub fn t_arr(&self) -> Option<f64> {
        self.arrival.as_ref().ok().map(|a| a.t)
    }

    pub fn t_mean(&self) -> Option<f64> {
        self.mean.as_ref().ok().map(|m| m.t_mean)
    }
}

/// Arrival and mean times at `x = l` for each width, in input order.
///
/// `t_in` is the free arrival at `x = 0` with the same spectral cutoff.
/// Row-level failures are kept in the row; only a failing `t_in` aborts.
pub fn packet_sweep(
    u0: f64,
    packet: &PacketSpec,
    widths: &[f64],
    settings: &TimingSettings,
    with_mean: bool,
) -> Result<Vec<PacketRow>> {
    let barrier0 = BarrierSpec::new(u0, 0.0)?;
    PacketSpec::sub_barrier(packet.momentum(), packet.half_width(), &barrier0)?;
    let widths = widths
        .iter()
        .map(|&l| barrier0.with_width(l))
        .collect::<Result<Vec<_>>>()?;
    let t_in = free_arrival_time(packet, u0, settings)?.t;
    Ok(widths
        .par_iter()
        .map(|b| {
            let basis = Basis::Barrier(*b);
            let arrival = arrival_time_of_max(packet, basis, b.width(), settings);
            let mean = if with_mean {
                mean_crossing_time(packet, basis, b.width(), settings)
            } else {
                Err(Error::invalid("mean", "not requested"))
            };
            PacketRow {
                l: b.width(),
                arrival,
                t_in,
                mean,
            }
        })
        .collect())
}
