//! Gauss–Kronrod quadrature.
//!
//! [`integrate`] is a globally adaptive 7/15-point Gauss–Kronrod scheme: the
//! interval with the largest error estimate is bisected until the summed
//! estimate meets `max(abs_tol, rel_tol·|I|)`. [`GkGrid`] applies the same rule
//! on a fixed partition so that many integrals sharing one integrand
//! prefactor (e.g. the same spectrum at many times) can reuse the node values.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Kronrod abscissae on [-1, 1], non-negative half, descending.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for the 7-point rule, living at XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Values that can be integrated: real or complex.
pub trait QuadValue:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of bisections applied to any starting interval.
    pub max_depth: u32,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_depth: 40,
        }
    }
}

impl QuadratureSettings {
    pub fn new(abs_tol: f64, rel_tol: f64, max_depth: u32) -> Result<Self> {
        if !(abs_tol > 0.0 && rel_tol > 0.0) {
            return Err(Error::invalid("tolerance", "abs_tol and rel_tol must be > 0"));
        }
        if max_depth < 1 {
            return Err(Error::invalid("max_depth", "must be >= 1"));
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_depth,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<T> {
    pub value: T,
    /// Summed error estimate over all final subintervals.
    pub error: f64,
    pub evaluations: usize,
}

/// Hard bound on live subintervals.
const MAX_SEGMENTS: usize = 100_000;

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
    floor: f64,
    depth: u32,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// One 15-point Kronrod evaluation with the QUADPACK error heuristic.
fn gk15<T: QuadValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> (T, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut resabs = fc.magnitude() * WGK[7];
    let mut values = [(T::default(), T::default()); 7];
    for (j, slot) in values.iter_mut().enumerate() {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod = kronrod + (f1 + f2) * WGK[j];
        resabs += WGK[j] * (f1.magnitude() + f2.magnitude());
        if j % 2 == 1 {
            gauss = gauss + (f1 + f2) * WG[j / 2];
        }
        *slot = (f1, f2);
    }
    let mean = kronrod * 0.5;
    let mut resasc = WGK[7] * (fc - mean).magnitude();
    for (j, (f1, f2)) in values.iter().enumerate() {
        resasc += WGK[j] * ((*f1 - mean).magnitude() + (*f2 - mean).magnitude());
    }
    let scale = half.abs();
    let result = kronrod * half;
    resabs *= scale;
    resasc *= scale;
    let mut err = ((kronrod - gauss) * half).magnitude();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(floor);
    }
    (result, err, floor)
}

/// Adaptive integral of `f` over `[a, b]`.
pub fn integrate<T, F>(f: F, a: f64, b: f64, settings: &QuadratureSettings) -> Result<Quadrature<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    integrate_with_breaks(f, &[a, b], settings)
}

/// Adaptive integral over `[breaks[0], breaks[last]]`, starting from the
/// partition given by `breaks` (strictly increasing, at least two points).
pub fn integrate_with_breaks<T, F>(f: F, breaks: &[f64], settings: &QuadratureSettings) -> Result<Quadrature<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    if breaks.len() < 2 {
        return Err(Error::invalid("breaks", "need at least two points"));
    }
    if breaks.iter().any(|x| !x.is_finite()) || breaks.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(
            "breaks",
            "interval bounds must be finite and strictly increasing",
        ));
    }
    let mut heap = BinaryHeap::with_capacity(breaks.len() * 4);
    let mut evaluations = 0usize;
    let mut total_value = T::default();
    let mut total_error = 0.0;
    let mut total_floor = 0.0;
    for w in breaks.windows(2) {
        let (value, error, floor) = gk15(&f, w[0], w[1]);
        evaluations += 15;
        total_value = total_value + value;
        total_error += error;
        total_floor += floor;
        heap.push(Segment {
            a: w[0],
            b: w[1],
            value,
            error,
            floor,
            depth: 0,
        });
    }

    loop {
        let tolerance = settings.abs_tol.max(settings.rel_tol * total_value.magnitude());
        // every segment at its rounding floor: nothing left to refine
        if total_error <= tolerance || total_error <= total_floor * (1.0 + 1e-9) {
            break;
        }
        let worst = heap.pop().expect("heap is never empty");
        if worst.depth >= settings.max_depth
            || heap.len() >= MAX_SEGMENTS
            || (worst.b - worst.a) <= 4.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs())
        {
            return Err(Error::QuadratureNotConverged {
                a: worst.a,
                b: worst.b,
                estimate: total_error,
                tolerance,
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        let (lv, le, lf) = gk15(&f, worst.a, mid);
        let (rv, re, rf) = gk15(&f, mid, worst.b);
        evaluations += 30;
        total_value = total_value - worst.value + lv + rv;
        total_error += le + re - worst.error;
        total_floor += lf + rf - worst.floor;
        for (a, b, value, error, floor) in [(worst.a, mid, lv, le, lf), (mid, worst.b, rv, re, rf)] {
            heap.push(Segment {
                a,
                b,
                value,
                error,
                floor,
                depth: worst.depth + 1,
            });
        }
    }

    // Re-sum in abscissa order so the result does not depend on refinement history.
    let mut segments = heap.into_vec();
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = segments.iter().fold(T::default(), |acc, s| acc + s.value);
    let error = segments.iter().map(|s| s.error).sum();
    Ok(Quadrature {
        value,
        error,
        evaluations,
    })
}

/// Fixed Gauss–Kronrod nodes on a partition.
///
/// Each panel carries the 15 Kronrod nodes; the embedded 7-point Gauss rule
/// gives a per-panel error estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct GkGrid {
    breaks: Vec<f64>,
    nodes: Vec<f64>,
    kronrod: Vec<f64>,
    gauss: Vec<f64>,
}

/// Nodes per panel.
pub const GK_NODES: usize = 15;

impl GkGrid {
    pub fn from_breaks(breaks: &[f64]) -> Result<Self> {
        if breaks.len() < 2 || breaks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("breaks", "need at least two strictly increasing points"));
        }
        let panels = breaks.len() - 1;
        let mut nodes = Vec::with_capacity(panels * GK_NODES);
        let mut kronrod = Vec::with_capacity(panels * GK_NODES);
        let mut gauss = Vec::with_capacity(panels * GK_NODES);
        for w in breaks.windows(2) {
            let center = 0.5 * (w[0] + w[1]);
            let half = 0.5 * (w[1] - w[0]);
            for j in 0..7 {
                let g = if j % 2 == 1 { WG[j / 2] } else { 0.0 };
                nodes.push(center - half * XGK[j]);
                kronrod.push(half * WGK[j]);
                gauss.push(half * g);
            }
            nodes.push(center);
            kronrod.push(half * WGK[7]);
            gauss.push(half * WG[3]);
            for j in (0..7).rev() {
                let g = if j % 2 == 1 { WG[j / 2] } else { 0.0 };
                nodes.push(center + half * XGK[j]);
                kronrod.push(half * WGK[j]);
                gauss.push(half * g);
            }
        }
        Ok(Self {
            breaks: breaks.to_vec(),
            nodes,
            kronrod,
            gauss,
        })
    }

    /// Uniform partition of `[a, b]` into `panels` pieces.
    pub fn uniform(a: f64, b: f64, panels: usize) -> Result<Self> {
        if panels == 0 || !(b > a) {
            return Err(Error::invalid("panels", "need b > a and at least one panel"));
        }
        let breaks: Vec<f64> = (0..=panels)
            .map(|i| {
                if i == panels {
                    b
                } else {
                    a + (b - a) * i as f64 / panels as f64
                }
            })
            .collect();
        Self::from_breaks(&breaks)
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn panels(&self) -> usize {
        self.breaks.len() - 1
    }

    /// Abscissae, panel by panel, ascending.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn kronrod_weights(&self) -> &[f64] {
        &self.kronrod
    }

    /// Gauss weights aligned with `nodes`; zero on Kronrod-only nodes.
    pub fn gauss_weights(&self) -> &[f64] {
        &self.gauss
    }

    /// Kronrod sum of `values` (aligned with `nodes`) and the summed per-panel
    /// `|K − G|` error estimate.
    pub fn sum<T: QuadValue>(&self, values: &[T]) -> (T, f64) {
        debug_assert_eq!(values.len(), self.nodes.len());
        let mut total = T::default();
        let mut err = 0.0;
        for ((v, wk), wg) in values
            .chunks_exact(GK_NODES)
            .zip(self.kronrod.chunks_exact(GK_NODES))
            .zip(self.gauss.chunks_exact(GK_NODES))
        {
            let mut k = T::default();
            let mut g = T::default();
            for j in 0..GK_NODES {
                k = k + v[j] * wk[j];
                g = g + v[j] * wg[j];
            }
            total = total + k;
            err += (k - g).magnitude();
        }
        (total, err)
    }

    /// Per-panel `|K − G|` estimates.
    pub fn panel_errors<T: QuadValue>(&self, values: &[T]) -> Vec<f64> {
        values
            .chunks_exact(GK_NODES)
            .zip(self.kronrod.chunks_exact(GK_NODES))
            .zip(self.gauss.chunks_exact(GK_NODES))
            .map(|((v, wk), wg)| {
                let mut d = T::default();
                for j in 0..GK_NODES {
                    d = d + v[j] * (wk[j] - wg[j]);
                }
                d.magnitude()
            })
            .collect()
    }
}
