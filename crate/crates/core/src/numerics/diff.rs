use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub value: f64,
    /// Difference between the last two extrapolation levels.
    pub error: f64,
}

/// Default initial step `1e-3·max(1, |x|)`.
pub fn default_step(x: f64) -> f64 {
    1e-3 * x.abs().max(1.0)
}

/// First derivative of `f` at `x` by central differences at `h0`, `h0/2`,
/// `h0/4`, combined with two rounds of Richardson extrapolation (`O(h⁶)`).
///
/// `domain` is the open interval on which `f` is valid; the widest stencil
/// `[x − h0, x + h0]` must lie strictly inside it.
pub fn differentiate<F>(f: F, x: f64, h0: f64, domain: (f64, f64)) -> Result<Derivative>
where
    F: Fn(f64) -> f64,
{
    if !(h0 > 0.0 && h0.is_finite()) {
        return Err(Error::invalid("h0", format!("step must be finite and > 0, got {h0}")));
    }
    let (lo, hi) = (x - h0, x + h0);
    if lo <= domain.0 || hi >= domain.1 {
        return Err(Error::DomainViolation {
            lo,
            hi,
            domain_lo: domain.0,
            domain_hi: domain.1,
        });
    }
    let central = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    let d0 = central(h0);
    let d1 = central(0.5 * h0);
    let d2 = central(0.25 * h0);
    let r10 = (4.0 * d1 - d0) / 3.0;
    let r11 = (4.0 * d2 - d1) / 3.0;
    let r2 = (16.0 * r11 - r10) / 15.0;
    Ok(Derivative {
        value: r2,
        error: (r2 - r11).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const OPEN: (f64, f64) = (f64::NEG_INFINITY, f64::INFINITY);

    #[test]
    fn polynomial_and_root() {
        let d = differentiate(|e| e * e, 3.0, default_step(3.0), OPEN).unwrap();
        assert!((d.value - 6.0).abs() < 1e-10);
        let d = differentiate(f64::sqrt, 4.0, default_step(4.0), (0.0, f64::INFINITY)).unwrap();
        assert!((d.value - 0.25).abs() < 1e-10);
    }

    #[test]
    fn analytic_derivatives_over_range() {
        let mut e = 0.5;
        while e <= 50.0 {
            let h = default_step(e);
            let dom = (0.0, f64::INFINITY);
            let cases: [(&dyn Fn(f64) -> f64, f64); 3] = [
                (&|x: f64| x.sqrt(), 0.5 / e.sqrt()),
                (&|x: f64| x * x, 2.0 * e),
                (&|x: f64| 1.0 / x, -1.0 / (e * e)),
            ];
            for (f, exact) in cases {
                let d = differentiate(f, e, h, dom).unwrap();
                assert!(
                    ((d.value - exact) / exact).abs() < 1e-9,
                    "e = {e}: {} vs {exact}",
                    d.value
                );
            }
            e *= 1.37;
        }
    }

    #[test]
    fn stencil_must_stay_inside() {
        let r = differentiate(|x: f64| (12.0 - x).sqrt(), 11.999, 0.01, (0.0, 12.0));
        assert!(matches!(r, Err(Error::DomainViolation { .. })));
        let r = differentiate(f64::sqrt, 0.001, 0.01, (0.0, f64::INFINITY));
        assert!(matches!(r, Err(Error::DomainViolation { .. })));
    }
}
