//! Small shared numerics: deterministic random trig polynomials and
//! piecewise-cubic interpolation in time.

use crate::grid::{Field, Grid};

/// Catmull-Rom style cubic interpolation of uniformly sampled data.
///
/// `samples[i]` is the value at `t0 + i*dt`. Near the ends the stencil is
/// shifted rather than truncated, keeping O(dt^4) accuracy throughout.
pub fn cubic_interp(samples: &[f64], t0: f64, dt: f64, t: f64) -> f64 {
    let n = samples.len();
    assert!(n >= 2, "need at least two samples");
    if n < 4 {
        // Fall back to linear on very short records.
        let s = ((t - t0) / dt).clamp(0.0, (n - 1) as f64);
        let i = (s.floor() as usize).min(n - 2);
        let w = s - i as f64;
        return samples[i] * (1.0 - w) + samples[i + 1] * w;
    }
    let s = (t - t0) / dt;
    // Base index of the 4-point stencil [i, i+3], centred when possible.
    let i = (s.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
    let u = s - i as f64; // local coordinate in [0, 3] over the stencil
    let mut value = 0.0;
    for (j, &sample) in samples[i..i + 4].iter().enumerate() {
        let mut weight = 1.0;
        for k in 0..4 {
            if k != j {
                weight *= (u - k as f64) / (j as f64 - k as f64);
            }
        }
        value += weight * sample;
    }
    value
}

/// Cubic interpolation of a time series of fields (per-node stencils).
pub fn cubic_interp_field(samples: &[Field], t0: f64, dt: f64, t: f64) -> Field {
    let n = samples.len();
    assert!(n >= 4, "need at least four stored states");
    let grid = samples[0].grid();
    let s = (t - t0) / dt;
    let i = (s.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
    let u = s - i as f64;
    let mut weights = [0.0; 4];
    for (j, w) in weights.iter_mut().enumerate() {
        let mut weight = 1.0;
        for k in 0..4 {
            if k != j {
                weight *= (u - k as f64) / (j as f64 - k as f64);
            }
        }
        *w = weight;
    }
    let values: Vec<f64> = (0..grid.n())
        .map(|node| {
            weights
                .iter()
                .enumerate()
                .map(|(j, w)| w * samples[i + j].values()[node])
                .sum()
        })
        .collect();
    Field::from_values(grid, values).expect("interpolated field is finite")
}

/// C-infinity step: 0 for `u <= 0`, 1 for `u >= 1`, strictly increasing
/// between (the standard `exp(-1/u)` partition ramp).
pub fn smooth_step(u: f64) -> f64 {
    let bump = |v: f64| if v > 0.0 { (-1.0 / v).exp() } else { 0.0 };
    let p = bump(u);
    let q = bump(1.0 - u);
    if p + q == 0.0 {
        return if u > 0.5 { 1.0 } else { 0.0 };
    }
    p / (p + q)
}

/// Smooth compactly supported bump `height·exp(1 - 1/(1-s²))` with
/// `s = (x-center)/halfwidth`; identically zero outside the support.
pub fn bump_field(grid: Grid, center: f64, halfwidth: f64, height: f64) -> Field {
    Field::from_fn(grid, |x| {
        let s = (x - center) / halfwidth;
        if s.abs() >= 1.0 {
            0.0
        } else {
            height * (1.0 - 1.0 / (1.0 - s * s)).exp()
        }
    })
}

/// Deterministic test-data helpers, also used by the `verify` suites.
pub mod testing {
    use super::*;
    use rand::Rng;

    /// Random real trigonometric polynomial with modes `1..=max_mode` and
    /// coefficients uniform in `[-amp, amp]` (zero mean).
    pub fn rand_trig(grid: Grid, max_mode: usize, amp: f64, rng: &mut impl Rng) -> Field {
        let coeffs: Vec<(f64, f64)> = (0..max_mode)
            .map(|_| (rng.gen_range(-amp..amp), rng.gen_range(-amp..amp)))
            .collect();
        let scale = 1.0 / (max_mode as f64).sqrt();
        Field::from_fn(grid, |x| {
            coeffs
                .iter()
                .enumerate()
                .map(|(i, (a, b))| {
                    let m = (i + 1) as f64;
                    scale * (a * (m * x).sin() + b * (m * x).cos())
                })
                .sum()
        })
    }

    /// Random trig polynomial with a zero-mean guarantee and small sup norm,
    /// suitable as a diffeomorphism displacement.
    pub fn rand_small_displacement(
        grid: Grid,
        max_mode: usize,
        amp: f64,
        rng: &mut impl Rng,
    ) -> Field {
        let f = rand_trig(grid, max_mode, amp, rng);
        // Keep |disp'| well below 1 so compositions stay in the group.
        let slope = f.deriv(1).sup_norm();
        if slope > 0.5 {
            &f * (0.5 / slope)
        } else {
            f
        }
    }
}
