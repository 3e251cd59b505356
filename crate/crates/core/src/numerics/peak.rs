use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub t: f64,
    pub value: f64,
    /// Index of the discrete maximum the refinement started from.
    pub index: usize,
}

fn check_grid(times: &[f64], values: &[f64]) -> Result<()> {
    if times.len() != values.len() {
        return Err(Error::invalid("values", "times and values differ in length"));
    }
    if times.len() < 3 {
        return Err(Error::invalid("times", "need at least three nodes"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("times", "nodes must be strictly increasing"));
    }
    Ok(())
}

/// Vertex of the parabola through three points.
fn parabola_vertex(t: [f64; 3], v: [f64; 3]) -> (f64, f64) {
    let (h1, h2) = (t[1] - t[0], t[2] - t[1]);
    let s1 = (v[1] - v[0]) / h1;
    let s2 = (v[2] - v[1]) / h2;
    let curvature = (s2 - s1) / (t[2] - t[0]);
    if curvature >= 0.0 {
        return (t[1], v[1]);
    }
    // p(t) = v1 + s (t - t1) + c (t - t1)^2 with s the centred slope at t1
    let slope = s1 + curvature * h1;
    let dt = (-slope / (2.0 * curvature)).clamp(-h1, h2);
    (t[1] + dt, v[1] + slope * dt + curvature * dt * dt)
}

/// Sub-grid maximum by parabolic interpolation through the discrete argmax
/// and its two neighbours. A maximum on the first or last node is an error.
pub fn refine_max(times: &[f64], values: &[f64]) -> Result<Peak> {
    check_grid(times, values)?;
    let index = values
        .iter()
        .enumerate()
        .fold(0, |best, (i, v)| if *v > values[best] { i } else { best });
    if index == 0 || index == values.len() - 1 {
        return Err(Error::EdgeMaximum {
            index,
            len: values.len(),
        });
    }
    let (t, value) = parabola_vertex(
        [times[index - 1], times[index], times[index + 1]],
        [values[index - 1], values[index], values[index + 1]],
    );
    Ok(Peak { t, value, index })
}

/// Interior strict local maxima, each refined like [`refine_max`], in time order.
pub fn local_maxima(times: &[f64], values: &[f64]) -> Result<Vec<Peak>> {
    check_grid(times, values)?;
    Ok((1..values.len() - 1)
        .filter(|&i| values[i] > values[i - 1] && values[i] >= values[i + 1])
        .map(|i| {
            let (t, value) = parabola_vertex(
                [times[i - 1], times[i], times[i + 1]],
                [values[i - 1], values[i], values[i + 1]],
            );
            Peak { t, value, index: i }
        })
        .collect())
}
