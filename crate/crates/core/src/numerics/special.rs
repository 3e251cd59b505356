//! Elementary functions evaluated without cancellation near zero.

use num_complex::Complex64;

/// `(1 − e^{−2y}) / (2y)`, equal to 1 at `y = 0`.
pub fn decay_ratio(y: f64) -> f64 {
    if y == 0.0 {
        1.0
    } else {
        -(-2.0 * y).exp_m1() / (2.0 * y)
    }
}

/// `sinh(z) − z`.
pub fn sinh_minus_identity(z: f64) -> f64 {
    if z.abs() >= 1.0 {
        return z.sinh() - z;
    }
    // z³/3! + z⁵/5! + …, converges to full precision within a dozen terms
    let z2 = z * z;
    let mut term = z * z2 / 6.0;
    let mut sum = term;
    let mut n = 3.0;
    while term.abs() > f64::EPSILON * sum.abs() * 0.1 {
        term *= z2 / ((n + 1.0) * (n + 2.0));
        sum += term;
        n += 2.0;
    }
    sum
}

/// `tanh(y) / y`, equal to 1 at `y = 0`.
pub fn tanh_ratio(y: f64) -> f64 {
    if y.abs() < 1e-8 {
        1.0 - y * y / 3.0
    } else {
        y.tanh() / y
    }
}

/// `(tanh y − y sech² y) / (2y³)`, equal to 1/3 at `y = 0`.
pub fn tanh_defect(y: f64) -> f64 {
    if y.abs() < 1.0 {
        let sech = 1.0 / y.cosh();
        sech * sech * sinh_minus_identity(2.0 * y) / (4.0 * y * y * y)
    } else if y.abs() < 350.0 {
        let sech = 1.0 / y.cosh();
        (y.tanh() - y * sech * sech) / (2.0 * y * y * y)
    } else {
        y.tanh() / (2.0 * y * y * y)
    }
}

/// `e^{−2y}(sinh 2y − 2y) / (4y³)`, equal to 1/3 at `y = 0`.
pub fn scaled_sinh_defect(y: f64) -> f64 {
    if y == 0.0 {
        return 1.0 / 3.0;
    }
    let y3 = 4.0 * y * y * y;
    if y < 0.5 {
        (-2.0 * y).exp() * sinh_minus_identity(2.0 * y) / y3
    } else {
        (-(-4.0 * y).exp_m1() / 2.0 - 2.0 * y * (-2.0 * y).exp()) / y3
    }
}

/// `(1 − e^{−z l}) / z` for complex `z`, equal to `l` at `z = 0`.
pub fn window_integral(z: Complex64, l: f64) -> Complex64 {
    let zl = z * l;
    if zl.norm() < 1e-3 {
        // l·(1 − zl/2 + (zl)²/6 − (zl)³/24 + (zl)⁴/120)
        let s = Complex64::new(1.0, 0.0) - zl / 2.0 + zl * zl / 6.0 - zl * zl * zl / 24.0 + zl * zl * zl * zl / 120.0;
        s * l
    } else {
        (Complex64::new(1.0, 0.0) - (-zl).exp()) / z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_matches_direct_at_switch() {
        let z: f64 = 0.999_999;
        let direct = z.sinh() - z;
        assert!((sinh_minus_identity(z) - direct).abs() < 1e-15);
        assert!((sinh_minus_identity(1e-4) - (1e-12 / 6.0 + 1e-20 / 120.0)).abs() < 1e-27);
        assert!((sinh_minus_identity(-0.3) + sinh_minus_identity(0.3)).abs() < 1e-18);
    }

    #[test]
    fn defects_are_continuous() {
        for f in [tanh_defect as fn(f64) -> f64, scaled_sinh_defect] {
            assert!((f(1e-9) - 1.0 / 3.0).abs() < 1e-8);
        }
        let below = tanh_defect(1.0 - 1e-12);
        let above = tanh_defect(1.0 + 1e-12);
        assert!((below - above).abs() < 1e-12);
        let below = scaled_sinh_defect(0.5 - 1e-12);
        let above = scaled_sinh_defect(0.5 + 1e-12);
        assert!((below - above).abs() < 1e-12);
        assert_eq!(decay_ratio(0.0), 1.0);
        assert!((decay_ratio(1e-10) - 1.0).abs() < 1e-9);
        assert!((tanh_ratio(2.0) - 2f64.tanh() / 2.0).abs() < 1e-16);
    }

    #[test]
    fn window_integral_branches_agree() {
        let l = 2.0;
        for z in [Complex64::new(4.99e-4, 1e-5), Complex64::new(0.3, -2.0)] {
            let direct = (Complex64::new(1.0, 0.0) - (-z * l).exp()) / z;
            assert!((window_integral(z, l) - direct).norm() < 1e-12);
        }
        assert_eq!(window_integral(Complex64::new(0.0, 0.0), 1.5), Complex64::new(1.5, 0.0));
    }
}
