//! The vanishing-geodesic-distance laboratory for the `H^0` metric:
//! mollified compression-wave paths `φ(t,x) = x + f(t-λx)`, the
//! start/stop waves with variable length `f_ε(t-λx, g(x))`, path energy,
//! the `3ε/(1-ε)` energy bound, and ε-sweep demonstrations driving the
//! path length of a fixed target diffeomorphism toward zero.
//!
//! The real line is realized as a long periodic box; compactly supported
//! data never reaches the seam during the simulated window. The basic
//! (non-compactly-supported) wave is closed up periodically with a static
//! seam riser, which carries no energy because it does not move.

use crate::diffeo::Diffeo;
use crate::grid::{Field, Grid};
use crate::util::smooth_step;
use crate::{Error, Result};

/// Parameters of a mollified compression wave on a periodic box.
#[derive(Debug, Clone, Copy)]
pub struct WaveSpec {
    /// Mollification width ε ∈ (0, 0.3].
    pub eps: f64,
    /// Wave slope λ; defaults to 1 - ε (must satisfy λ·max f' < 1).
    pub lam: f64,
    /// Half-length of the real-line truncation box.
    pub box_half: f64,
    /// Spatial sample count of the box grid (even).
    pub resolution: usize,
}

impl WaveSpec {
    pub fn new(eps: f64, box_half: f64, resolution: usize) -> Result<Self> {
        if !(eps > 0.0 && eps <= 0.3) {
            return Err(Error::InvalidParameter(format!(
                "mollification width must lie in (0, 0.3], got {eps}"
            )));
        }
        Ok(WaveSpec {
            eps,
            lam: 1.0 - eps,
            box_half,
            resolution,
        })
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.resolution, 2.0 * self.box_half)
    }
}

/// Mollified ramp `f = max(0, min(1, ·)) ⋆ G_ε` realized through the
/// kernel antiderivatives: `f'(z) = K0(z) - K0(z-1) ∈ [0, 1]` exactly,
/// where `K0` is the kernel CDF and `K1` its first-moment integral.
#[derive(Debug, Clone)]
pub struct RampProfile {
    eps: f64,
    dz: f64,
    k0: Vec<f64>,
    k1: Vec<f64>,
}

/// Builds the ramp profile; `resolution` counts table samples across ε
/// and must be at least 16.
pub fn mollified_ramp(eps: f64, resolution: usize) -> Result<RampProfile> {
    if resolution < 16 {
        return Err(Error::TooCoarse(format!(
            "need at least 16 samples across the kernel width, got {resolution}"
        )));
    }
    // Bump kernel exp(-1/(1-(z/ε)²)) on (-ε, ε), normalized numerically.
    // The table is kept dense regardless of the requested resolution so
    // that the cubic lookup stays at the 1e-12 level.
    let n = (2 * resolution).max(4096); // table over [-ε, ε]
    let dz = 2.0 * eps / n as f64;
    let kernel = |z: f64| {
        let s = z / eps;
        if s.abs() >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - s * s)).exp()
        }
    };
    // Cumulative trapezoid for K0 and K1 on the table.
    let mut k0 = vec![0.0; n + 1];
    let mut k1 = vec![0.0; n + 1];
    for i in 1..=n {
        let z0 = -eps + (i - 1) as f64 * dz;
        let z1 = -eps + i as f64 * dz;
        k0[i] = k0[i - 1] + 0.5 * dz * (kernel(z0) + kernel(z1));
        k1[i] = k1[i - 1] + 0.5 * dz * (z0 * kernel(z0) + z1 * kernel(z1));
    }
    let mass = k0[n];
    for v in &mut k0 {
        *v /= mass;
    }
    for v in &mut k1 {
        *v /= mass;
    }
    // Symmetry makes the total first moment vanish; pin it exactly so the
    // saturated ramp equals the clamp outside the kernel support.
    let drift = k1[n];
    for (i, v) in k1.iter_mut().enumerate() {
        *v -= drift * i as f64 / n as f64;
    }
    Ok(RampProfile { eps, dz, k0, k1 })
}

impl RampProfile {
    pub fn eps(&self) -> f64 {
        self.eps
    }

    fn lookup(&self, table: &[f64], z: f64) -> f64 {
        let n = table.len() - 1;
        if z <= -self.eps {
            return table[0];
        }
        if z >= self.eps {
            return table[n];
        }
        // Four-point Lagrange on the uniform table.
        let s = (z + self.eps) / self.dz;
        let i = (s.floor() as isize - 1).clamp(0, n as isize - 3) as usize;
        let u = s - i as f64;
        let mut value = 0.0;
        for (j, &tv) in table[i..i + 4].iter().enumerate() {
            let mut w = 1.0;
            for k in 0..4 {
                if k != j {
                    w *= (u - k as f64) / (j as f64 - k as f64);
                }
            }
            value += w * tv;
        }
        value
    }

    /// Kernel CDF `K0(z) = ∫_{-ε}^z G_ε`.
    pub fn cdf(&self, z: f64) -> f64 {
        self.lookup(&self.k0, z)
    }

    fn moment(&self, z: f64) -> f64 {
        self.lookup(&self.k1, z)
    }

    /// `clamp(·, 0, a) ⋆ G_ε` evaluated at `z` (zero for `a <= 0`).
    pub fn clamped(&self, z: f64, a: f64) -> f64 {
        if a <= 0.0 {
            return 0.0;
        }
        a * self.cdf(z - a) + z * (self.cdf(z) - self.cdf(z - a)) - self.moment(z)
            + self.moment(z - a)
    }

    /// `∂z` of [`RampProfile::clamped`]: `K0(z) - K0(z-a) ∈ [0, 1]`.
    pub fn clamped_dz(&self, z: f64, a: f64) -> f64 {
        if a <= 0.0 {
            return 0.0;
        }
        self.cdf(z) - self.cdf(z - a)
    }

    /// The unit mollified ramp `f(z)`.
    pub fn f(&self, z: f64) -> f64 {
        self.clamped(z, 1.0)
    }

    /// Its derivative `f'(z)`.
    pub fn df(&self, z: f64) -> f64 {
        self.clamped_dz(z, 1.0)
    }
}

/// The basic moving compression wave `φ(t,x) = x + f(t-λx)` on the box,
/// closed up periodically with a static seam riser on the last eighth of
/// the box (zero energy: it does not depend on `t`).
pub struct CompressionWave {
    spec: WaveSpec,
    ramp: RampProfile,
    grid: Grid,
    seam: Vec<f64>,
}

impl CompressionWave {
    pub fn new(spec: WaveSpec) -> Result<Self> {
        let grid = spec.grid()?;
        let ramp = mollified_ramp(spec.eps, samples_across_eps(&spec))?;
        let length = grid.length();
        let seam_start = 0.875 * length;
        let seam_width = 0.115 * length;
        let seam: Vec<f64> = (0..grid.n())
            .map(|j| smooth_step((grid.node(j) - seam_start) / seam_width))
            .collect();
        Ok(CompressionWave {
            spec,
            ramp,
            grid,
            seam,
        })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn ramp(&self) -> &RampProfile {
        &self.ramp
    }

    /// Interval of `t` for which the moving front stays strictly inside
    /// the interior (off the seam riser), given the window `[t0, t1]` is
    /// admissible for this box.
    pub fn admissible(&self, t: f64) -> bool {
        let eps = self.spec.eps;
        let lam = self.spec.lam;
        // Wave support in x is [(t-1-eps)/λ, (t+eps)/λ].
        let lo = (t - 1.0 - eps) / lam;
        let hi = (t + eps) / lam;
        lo > 0.02 * self.grid.length() && hi < 0.85 * self.grid.length()
    }

    /// The map `φ(t,·)` as a periodic diffeomorphism.
    pub fn map(&self, t: f64) -> Result<Diffeo> {
        if !self.admissible(t) {
            return Err(Error::InvalidParameter(format!(
                "wave front leaves the box interior at t = {t}"
            )));
        }
        let lam = self.spec.lam;
        let values: Vec<f64> = (0..self.grid.n())
            .map(|j| self.ramp.f(t - lam * self.grid.node(j)) + self.seam[j])
            .collect();
        Diffeo::new(Field::from_values(self.grid, values)?)
    }

    /// Energy bound `(t1-t0)·3ε/(1-ε)` of the wave over a window.
    pub fn energy_bound(&self, t0: f64, t1: f64) -> f64 {
        (t1 - t0) * 3.0 * self.spec.eps / (1.0 - self.spec.eps)
    }
}

fn samples_across_eps(spec: &WaveSpec) -> usize {
    // Table resolution: at least 64 samples across ε, more when the box
    // grid is finer than that.
    let per_eps = spec.eps / (2.0 * spec.box_half / spec.resolution as f64);
    (per_eps.ceil() as usize).max(64)
}

/// Start/stop compression wave reaching the target `x ↦ x + g(x)`:
/// `φ(t,x) = x + f_ε(t-λx-shift(x), g(x))` with the two-parameter profile
/// `f_ε(z,a) = max(0,min(a,z)) ⋆ G_ε(z)G_ε(a)` and the delay
/// `shift = (1-λ)(b-g)` on the decreasing branch of `g`.
///
/// The "vacuum" wave `f_ε(t-λx-shift, 0)` is subtracted pointwise, which
/// keeps the path compactly supported inside `supp(g)` (and hence exactly
/// periodic on the box); this changes the map by `O(ε)` inside the
/// support and nothing outside.
pub struct StartStopWave {
    lam: f64,
    eps: f64,
    ramp: RampProfile,
    grid: Grid,
    target: Field,
    shift: Vec<f64>,
    /// Simpson weights (w_i, v_i) of the kernel in the length variable.
    a_quad: Vec<(f64, f64)>,
    support: Vec<usize>,
    x_lo: f64,
    x_hi: f64,
    b_max: f64,
}

impl StartStopWave {
    pub fn new(spec: WaveSpec, target: &Field) -> Result<Self> {
        let grid = spec.grid()?;
        if target.grid() != grid {
            return Err(Error::GridMismatch(target.grid().n(), grid.n()));
        }
        if target.min_value() < -1e-12 {
            return Err(Error::InvalidParameter(
                "target displacement must be non-negative for the compression construction".into(),
            ));
        }
        let slope_min = target.deriv(1).min_value();
        if slope_min <= -1.0 {
            return Err(Error::InvalidParameter(format!(
                "target slope min {slope_min:.3} violates g' > -1"
            )));
        }
        let eps = spec.eps;
        let ramp = mollified_ramp(eps, samples_across_eps(&spec))?;

        // Simpson rule for the kernel in the length variable a.
        let m = 32usize; // intervals; the integrand is smooth
        let kernel = |v: f64| {
            let s = v / eps;
            if s.abs() >= 1.0 {
                0.0
            } else {
                (-1.0 / (1.0 - s * s)).exp()
            }
        };
        let dv = 2.0 * eps / m as f64;
        let mut a_quad: Vec<(f64, f64)> = (0..=m)
            .map(|i| {
                let v = -eps + i as f64 * dv;
                let w = if i == 0 || i == m {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                (w * kernel(v) * dv / 3.0, v)
            })
            .collect();
        let mass: f64 = a_quad.iter().map(|(w, _)| w).sum();
        for (w, _) in &mut a_quad {
            *w /= mass;
        }

        // Support of the target plus the kernel-width margin.
        let mut support = Vec::new();
        let mut x_lo = f64::INFINITY;
        let mut x_hi = f64::NEG_INFINITY;
        for j in 0..grid.n() {
            if target.values()[j] > 0.0 {
                x_lo = x_lo.min(grid.node(j));
                x_hi = x_hi.max(grid.node(j));
            }
        }
        if !x_lo.is_finite() {
            // Trivial target: empty support.
            (x_lo, x_hi) = (grid.length() / 2.0, grid.length() / 2.0);
        }
        for j in 0..grid.n() {
            let x = grid.node(j);
            if x >= x_lo - 1.0 && x <= x_hi + 1.0 {
                support.push(j);
            }
        }

        // Delay on the decreasing branch keeps the shortened wave behind
        // the particles ahead of it.
        let b_max = target.max_value();
        let peak = (0..grid.n())
            .max_by(|&i, &j| {
                target.values()[i]
                    .partial_cmp(&target.values()[j])
                    .unwrap()
            })
            .unwrap();
        let x_peak = grid.node(peak);
        let shift: Vec<f64> = (0..grid.n())
            .map(|j| {
                if grid.node(j) <= x_peak {
                    0.0
                } else {
                    (1.0 - spec.lam) * (b_max - target.values()[j])
                }
            })
            .collect();

        Ok(StartStopWave {
            lam: spec.lam,
            eps,
            ramp,
            grid,
            target: target.clone(),
            shift,
            a_quad,
            support,
            x_lo,
            x_hi,
            b_max,
        })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Two-parameter mollified profile `f_ε(z, a)`.
    pub fn profile(&self, z: f64, a: f64) -> f64 {
        self.a_quad
            .iter()
            .map(|&(w, v)| w * self.ramp.clamped(z, a - v))
            .sum()
    }

    /// Time window `[t0, t1]` over which the wave enters as the identity
    /// and leaves having produced the target.
    pub fn window(&self) -> (f64, f64) {
        let pad = 0.2;
        let t0 = self.lam * self.x_lo - self.eps - pad;
        let t1 = self.lam * self.x_hi + (1.0 - self.lam) * self.b_max + self.b_max
            + self.eps
            + pad;
        (t0, t1)
    }

    /// The map `φ(t,·)`; identity outside `supp(g)` for every `t`.
    pub fn map(&self, t: f64) -> Result<Diffeo> {
        let mut values = vec![0.0; self.grid.n()];
        for &j in &self.support {
            let z = t - self.lam * self.grid.node(j) - self.shift[j];
            let a = self.target.values()[j];
            values[j] = self.profile(z, a) - self.profile(z, 0.0);
        }
        Diffeo::new(Field::from_values(self.grid, values)?)
    }
}

/// A sampled path of diffeomorphisms at uniformly spaced times.
pub struct PathSample {
    pub times: Vec<f64>,
    pub maps: Vec<Diffeo>,
}

impl PathSample {
    /// Samples `map(t)` at `n_t + 1` uniform times over `[t0, t1]`.
    pub fn from_fn(
        t0: f64,
        t1: f64,
        n_t: usize,
        map: impl Fn(f64) -> Result<Diffeo>,
    ) -> Result<Self> {
        if n_t < 2 {
            return Err(Error::TooCoarse("need at least two time intervals".into()));
        }
        let dt = (t1 - t0) / n_t as f64;
        let times: Vec<f64> = (0..=n_t).map(|i| t0 + i as f64 * dt).collect();
        let maps = times.iter().map(|&t| map(t)).collect::<Result<Vec<_>>>()?;
        Ok(PathSample { times, maps })
    }

    pub fn duration(&self) -> f64 {
        self.times[self.times.len() - 1] - self.times[0]
    }

    pub fn terminal(&self) -> &Diffeo {
        self.maps.last().expect("path is never empty")
    }
}

/// `H^0` path energy `∫∫ φ_t(t,y)² φ_y(t,y) dy dt` by trapezoidal time
/// quadrature with centered differences for `φ_t` (one-sided second-order
/// at the ends).
pub fn path_energy(path: &PathSample) -> Result<f64> {
    let n = path.times.len();
    if n < 3 {
        return Err(Error::TooCoarse("need at least three time samples".into()));
    }
    let dt = path.times[1] - path.times[0];
    let mut density = Vec::with_capacity(n);
    for i in 0..n {
        let phi_t = if i == 0 {
            time_slope(&path.maps[0], &path.maps[1], &path.maps[2], dt, false)
        } else if i == n - 1 {
            time_slope(&path.maps[n - 1], &path.maps[n - 2], &path.maps[n - 3], dt, true)
        } else {
            &(path.maps[i + 1].disp() - path.maps[i - 1].disp()) * (1.0 / (2.0 * dt))
        };
        let slope = path.maps[i].slope();
        if slope.min_value() <= 0.0 {
            return Err(Error::OrientationLost {
                min_slope: slope.min_value(),
            });
        }
        density.push((&(&phi_t * &phi_t) * &slope).quad());
    }
    let mut energy = 0.0;
    for i in 1..n {
        energy += 0.5 * dt * (density[i - 1] + density[i]);
    }
    Ok(energy)
}

fn time_slope(f0: &Diffeo, f1: &Diffeo, f2: &Diffeo, dt: f64, backward: bool) -> Field {
    // Second-order one-sided difference (-3f0 + 4f1 - f2)/(2dt).
    let sign = if backward { -1.0 } else { 1.0 };
    &(&(&(f0.disp() * -3.0) + &(f1.disp() * 4.0)) - &(f2.disp() * 1.0)) * (sign / (2.0 * dt))
}

/// Length upper bound `L ≤ sqrt(E·(t1-t0))` from Cauchy-Schwarz.
pub fn length_bound(energy: f64, duration: f64) -> f64 {
    (energy * duration).sqrt()
}

/// Path length `∫ sqrt(∫ φ_t² φ_y dy) dt`.
pub fn path_length(path: &PathSample) -> Result<f64> {
    let n = path.times.len();
    let dt = path.times[1] - path.times[0];
    let mut speeds = Vec::with_capacity(n);
    for i in 0..n {
        let phi_t = if i == 0 {
            time_slope(&path.maps[0], &path.maps[1], &path.maps[2], dt, false)
        } else if i == n - 1 {
            time_slope(&path.maps[n - 1], &path.maps[n - 2], &path.maps[n - 3], dt, true)
        } else {
            &(path.maps[i + 1].disp() - path.maps[i - 1].disp()) * (1.0 / (2.0 * dt))
        };
        let slope = path.maps[i].slope();
        speeds.push((&(&phi_t * &phi_t) * &slope).quad().max(0.0).sqrt());
    }
    let mut len = 0.0;
    for i in 1..n {
        len += 0.5 * dt * (speeds[i - 1] + speeds[i]);
    }
    Ok(len)
}

/// One row of the ε-sweep demonstration.
#[derive(Debug, Clone)]
pub struct DemoRow {
    pub eps: f64,
    pub energy: f64,
    pub length_bound: f64,
}

/// Time samples per unit: 64 baseline, refined when the kernel width is
/// below the baseline resolution.
pub fn time_samples(duration: f64, eps: f64) -> usize {
    (duration * (64.0f64).max(10.0 / eps)).ceil() as usize
}

/// Builds the start/stop path for each ε and reports its energy and
/// length bound; bounds must decrease toward zero as ε shrinks.
pub fn vanishing_demo(spec_template: &WaveSpec, target: &Field, eps_list: &[f64]) -> Result<Vec<DemoRow>> {
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let spec = WaveSpec::new(eps, spec_template.box_half, spec_template.resolution)?;
        let wave = StartStopWave::new(spec, target)?;
        let (t0, t1) = wave.window();
        let n_t = time_samples(t1 - t0, eps);
        let path = PathSample::from_fn(t0, t1, n_t, |t| wave.map(t))?;
        let energy = path_energy(&path)?;
        rows.push(DemoRow {
            eps,
            energy,
            length_bound: length_bound(energy, t1 - t0),
        });
    }
    Ok(rows)
}

/// Energy of the naive straight-line path `φ(t,x) = x + t·g(x)`, the
/// contrast case that stays bounded away from zero.
pub fn linear_path_energy(target: &Field, n_t: usize) -> Result<f64> {
    let path = PathSample::from_fn(0.0, 1.0, n_t, |t| {
        Diffeo::new(target * t)
    })?;
    path_energy(&path)
}
