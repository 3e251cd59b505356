use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Unwraps the phase of a sampled complex sweep.
///
/// The output starts at the principal argument of the first sample and each
/// later value is the principal argument plus the multiple of `2π` that
/// keeps consecutive outputs within `π` of each other. Steps whose wrapped
/// size reaches `π` are ambiguous and are reported as [`Error::PhaseJump`].
pub fn continuous_phase(samples: &[Complex64]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(samples.len());
    let mut prev_principal = 0.0;
    let mut offset = 0.0;
    for (i, z) in samples.iter().enumerate() {
        if z.norm() == 0.0 || !z.norm().is_finite() {
            return Err(Error::ZeroSample { index: i });
        }
        let principal = z.arg();
        if i > 0 {
            let raw = principal - prev_principal;
            let wrapped = raw - TAU * (raw / TAU).round();
            if wrapped.abs() >= PI * (1.0 - 1e-12) {
                return Err(Error::PhaseJump {
                    index: i - 1,
                    jump: wrapped,
                });
            }
            offset += wrapped - raw;
        }
        out.push(principal + offset);
        prev_principal = principal;
    }
    Ok(out)
}
