//! Numerical kernels shared by the physics modules.

pub mod diff;
pub mod peak;
pub mod phase;
pub mod quadrature;
pub mod special;

pub use diff::{default_step, differentiate, Derivative};
pub use peak::{local_maxima, refine_max, Peak};
pub use phase::continuous_phase;
pub use quadrature::{integrate, integrate_with_breaks, GkGrid, QuadValue, Quadrature, QuadratureSettings};

use crate::error::{Error, Result};

/// Root of `f` in `[a, b]` by bisection; `f(a)` and `f(b)` must differ in sign.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let (mut fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::invalid(
            "bracket",
            format!("f({a}) and f({b}) have the same sign"),
        ));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a) <= tol || m == a || m == b {
            return Ok(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Composite Simpson integral of uniformly spaced samples; an even number of
/// intervals uses pure Simpson, an odd one closes with a 3/8 panel.
pub fn simpson_uniform(values: &[f64], step: f64) -> f64 {
    let n = values.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * step * (values[0] + values[1]),
        3 => step / 3.0 * (values[0] + 4.0 * values[1] + values[2]),
        _ => {
            let intervals = n - 1;
            let simpson_end = if intervals.is_multiple_of(2) { n - 1 } else { n - 4 };
            let mut s = values[0] + values[simpson_end];
            for (i, v) in values.iter().enumerate().take(simpson_end).skip(1) {
                s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
            }
            let mut total = step / 3.0 * s;
            if simpson_end != n - 1 {
                let v = &values[simpson_end..];
                total += 3.0 * step / 8.0 * (v[0] + 3.0 * v[1] + 3.0 * v[2] + v[3]);
            }
            total
        }
    }
}
