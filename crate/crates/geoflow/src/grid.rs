//! Periodic pseudospectral kernel: grids, fields, differentiation,
//! quadrature, trigonometric interpolation and Fourier multipliers.
//!
//! The circle of circumference `length` is sampled at `n` uniform nodes
//! `x_j = j·length/n`. All derivatives are spectral; quadrature is the
//! trapezoidal rule, which is exact to machine precision for band-limited
//! periodic integrands.

use std::f64::consts::TAU;
use std::sync::Mutex;

use num_complex::Complex64;
use once_cell::sync::Lazy;
use rustfft::FftPlanner;

use crate::{Error, Result};

static PLANNER: Lazy<Mutex<FftPlanner<f64>>> = Lazy::new(|| Mutex::new(FftPlanner::new()));

fn fft(values: &mut [Complex64], forward: bool) {
    let plan = {
        let mut planner = PLANNER.lock().unwrap();
        if forward {
            planner.plan_fft_forward(values.len())
        } else {
            planner.plan_fft_inverse(values.len())
        }
    };
    plan.process(values);
}

/// Uniform periodic grid on a circle of the given circumference.
///
/// `n` must be even and at least 8 so that the real transform has a
/// well-defined Nyquist mode and quadratic products remain resolvable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    length: f64,
}

impl Grid {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "sample count must be even and >= 8, got {n}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("bad circumference {length}")));
        }
        Ok(Grid { n, length })
    }

    /// Grid on the standard circle `[0, 2π)`.
    pub fn standard(n: usize) -> Result<Self> {
        Grid::new(n, TAU)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        self.length * j as f64 / self.n as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    /// Physical wavenumber of the signed integer mode `m`.
    pub fn wavenumber(&self, m: i64) -> f64 {
        TAU * m as f64 / self.length
    }

    /// Signed mode index of spectral bin `k`, in `(-n/2, n/2]`.
    fn signed_mode(&self, k: usize) -> i64 {
        if k <= self.n / 2 {
            k as i64
        } else {
            k as i64 - self.n as i64
        }
    }
}

/// Real-valued function sampled on a [`Grid`].
///
/// Fields combine arithmetically only when they live on the same grid;
/// mixing grids is a programming error and panics.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::InvalidGrid(format!(
                "value count {} does not match grid size {}",
                values.len(),
                grid.n()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("Field::from_values"));
        }
        Ok(Field { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        let values: Vec<f64> = (0..grid.n()).map(|j| f(grid.node(j))).collect();
        assert!(
            values.iter().all(|v| v.is_finite()),
            "Field::from_fn produced a non-finite sample"
        );
        Field { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        Field {
            grid,
            values: vec![0.0; grid.n()],
        }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Field {
            grid,
            values: vec![c; grid.n()],
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }

    fn assert_same_grid(&self, other: &Field) {
        assert!(
            self.grid == other.grid,
            "fields live on different grids ({:?} vs {:?})",
            self.grid,
            other.grid
        );
    }

    /// Normalized Fourier coefficients `c_k`, `k = 0..n-1`, so that
    /// `f(x_j) = Σ_k c_k exp(2πi jk/n)`.
    pub fn spectrum(&self) -> Vec<Complex64> {
        let n = self.grid.n();
        let mut buf: Vec<Complex64> = self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft(&mut buf, true);
        let scale = 1.0 / n as f64;
        for c in &mut buf {
            *c *= scale;
        }
        buf
    }

    /// Real field from normalized coefficients (imaginary residue dropped).
    pub fn from_spectrum(grid: Grid, spectrum: &[Complex64]) -> Self {
        assert_eq!(spectrum.len(), grid.n());
        let mut buf = spectrum.to_vec();
        fft(&mut buf, false);
        Field {
            grid,
            values: buf.iter().map(|c| c.re).collect(),
        }
    }

    /// Applies `f(m, c_m)` to every coefficient, `m` the signed mode index.
    pub fn map_spectrum(&self, mut f: impl FnMut(i64, Complex64) -> Complex64) -> Field {
        let mut spec = self.spectrum();
        let grid = self.grid;
        for (k, c) in spec.iter_mut().enumerate() {
            *c = f(grid.signed_mode(k), *c);
        }
        Field::from_spectrum(grid, &spec)
    }

    /// Spectral derivative of the given order.
    ///
    /// Coefficients are scaled by `(i·m·2π/length)^order`; the Nyquist mode
    /// is zeroed for odd orders (the real-spectral convention).
    pub fn deriv(&self, order: u32) -> Field {
        assert!(order >= 1, "derivative order must be >= 1");
        assert!(self.is_finite(), "deriv on a non-finite field");
        let nyquist = (self.grid.n() / 2) as i64;
        self.map_spectrum(|m, c| {
            if !order.is_multiple_of(2) && m == nyquist {
                return Complex64::new(0.0, 0.0);
            }
            let ik = Complex64::new(0.0, self.grid.wavenumber(m));
            ik.powu(order) * c
        })
    }

    /// Trapezoidal quadrature over the circle: `(length/n)·Σ values`.
    pub fn quad(&self) -> f64 {
        self.grid.dx() * self.values.iter().sum::<f64>()
    }

    /// Zeroes all modes with `|m| > fraction·n/2`.
    pub fn dealias(&self, fraction: f64) -> Field {
        assert!(fraction > 0.0 && fraction <= 1.0);
        let cutoff = fraction * self.grid.n() as f64 / 2.0;
        self.map_spectrum(|m, c| {
            if (m.abs() as f64) > cutoff {
                Complex64::new(0.0, 0.0)
            } else {
                c
            }
        })
    }

    /// Trigonometric (Fourier-series) evaluation at one arbitrary point.
    ///
    /// Exact (up to roundoff) on fields whose top occupied mode is at most
    /// `n/2 - 1`; the Nyquist mode is interpreted as a pure cosine.
    pub fn interp_one(&self, x: f64) -> f64 {
        Interpolant::new(self).eval(x)
    }

    /// Trigonometric evaluation at many points (points reduced mod length).
    pub fn interp(&self, points: &[f64]) -> Vec<f64> {
        let interp = Interpolant::new(self);
        points.iter().map(|&x| interp.eval(x)).collect()
    }

    /// Multiplies the spectrum pointwise by a real, even symbol.
    pub fn apply_multiplier(&self, mult: &MultiplierSpec) -> Field {
        assert!(
            self.grid == mult.grid,
            "multiplier was built for a different grid"
        );
        self.map_spectrum(|m, c| mult.symbol[m.unsigned_abs() as usize] * c)
    }
}

macro_rules! field_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl std::ops::$trait<&Field> for &Field {
            type Output = Field;
            fn $method(self, rhs: &Field) -> Field {
                self.assert_same_grid(rhs);
                Field {
                    grid: self.grid,
                    values: self
                        .values
                        .iter()
                        .zip(&rhs.values)
                        .map(|(a, b)| a $op b)
                        .collect(),
                }
            }
        }
    };
}

field_binop!(Add, add, +);
field_binop!(Sub, sub, -);
field_binop!(Mul, mul, *);

impl std::ops::Mul<f64> for &Field {
    type Output = Field;
    fn mul(self, rhs: f64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|a| a * rhs).collect(),
        }
    }
}

impl std::ops::Neg for &Field {
    type Output = Field;
    fn neg(self) -> Field {
        self * -1.0
    }
}

/// Reusable trigonometric interpolant of one field (the spectrum is
/// transformed once, evaluation is O(n) per point).
pub struct Interpolant {
    grid: Grid,
    spectrum: Vec<Complex64>,
}

impl Interpolant {
    pub fn new(f: &Field) -> Self {
        Interpolant {
            grid: f.grid(),
            spectrum: f.spectrum(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.grid.n();
        let theta = TAU * (x / self.grid.length);
        let w = Complex64::from_polar(1.0, theta);
        let mut e = w; // e^{i m θ}, starting at m = 1
        let mut sum = self.spectrum[0].re;
        for c in &self.spectrum[1..n / 2] {
            sum += 2.0 * (c.re * e.re - c.im * e.im);
            e *= w;
        }
        // e now holds e^{i (n/2) θ}; Nyquist contributes as a cosine.
        sum += self.spectrum[n / 2].re * e.re;
        sum
    }
}

/// Fourier-multiplier operator: a real, even symbol sampled at the modes
/// `m = 0..=n/2` of one grid.
///
/// Realness of the operator is guaranteed structurally: only `m >= 0` is
/// stored, so `symbol(-m) = symbol(m)` always holds.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierSpec {
    grid: Grid,
    symbol: Vec<f64>,
}

impl MultiplierSpec {
    /// Samples `symbol(m)` at the integer modes `0..=n/2`.
    pub fn from_symbol(grid: Grid, symbol: impl Fn(i64) -> f64) -> Self {
        let values: Vec<f64> = (0..=grid.n() / 2).map(|m| symbol(m as i64)).collect();
        assert!(
            values.iter().all(|v| v.is_finite()),
            "multiplier symbol must be finite"
        );
        MultiplierSpec {
            grid,
            symbol: values,
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn symbol_at(&self, m: i64) -> f64 {
        self.symbol[m.unsigned_abs() as usize]
    }

    /// Pointwise inverse symbol; fails if any represented mode is zero.
    pub fn inverse(&self) -> Result<MultiplierSpec> {
        for (m, &s) in self.symbol.iter().enumerate() {
            if s == 0.0 {
                return Err(Error::ZeroMultiplier(m as i64));
            }
        }
        Ok(MultiplierSpec {
            grid: self.grid,
            symbol: self.symbol.iter().map(|s| 1.0 / s).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::testing::rand_trig;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn g64() -> Grid {
        Grid::standard(64).unwrap()
    }

    #[test]
    fn grid_rejects_odd_or_tiny() {
        assert!(Grid::new(7, TAU).is_err());
        assert!(Grid::new(6, TAU).is_err());
        assert!(Grid::new(8, TAU).is_ok());
        assert!(Grid::new(8, -1.0).is_err());
    }

    #[test]
    fn deriv_of_sin_is_cos() {
        let f = Field::from_fn(g64(), f64::sin);
        let df = f.deriv(1);
        let exact = Field::from_fn(g64(), f64::cos);
        assert!((&df - &exact).sup_norm() < 1e-12);
    }

    #[test]
    fn deriv_of_constant_is_zero() {
        let f = Field::constant(g64(), 1.0);
        assert!(f.deriv(1).sup_norm() < 1e-13);
    }

    #[test]
    fn second_deriv_of_sin3x() {
        let f = Field::from_fn(g64(), |x| (3.0 * x).sin());
        let exact = Field::from_fn(g64(), |x| -9.0 * (3.0 * x).sin());
        assert!((&f.deriv(2) - &exact).sup_norm() < 1e-11);
    }

    #[test]
    fn deriv_respects_box_length() {
        let grid = Grid::new(128, 4.0 * TAU).unwrap();
        let f = Field::from_fn(grid, |x| (0.5 * x).sin());
        let exact = Field::from_fn(grid, |x| 0.5 * (0.5 * x).cos());
        assert!((&f.deriv(1) - &exact).sup_norm() < 1e-12);
    }

    #[test]
    fn quad_basics() {
        assert!(Field::from_fn(g64(), f64::sin).quad().abs() < 1e-13);
        assert!((Field::constant(g64(), 1.0).quad() - TAU).abs() < 1e-13);
        let sin2 = Field::from_fn(g64(), |x| x.sin().powi(2));
        assert!((sin2.quad() - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn interp_matches_band_limited_values() {
        let f = Field::from_fn(g64(), f64::sin);
        let v = f.interp_one(std::f64::consts::FRAC_PI_3);
        assert!((v - (std::f64::consts::FRAC_PI_3).sin()).abs() < 1e-12);

        let c = Field::from_fn(g64(), |x| (2.0 * x).cos());
        assert!((c.interp_one(0.7) - (1.4f64).cos()).abs() < 1e-12);
    }

    #[test]
    fn interp_reproduces_nodes() {
        let f = Field::from_fn(g64(), |x| (3.0 * x).sin() - 0.4 * (5.0 * x).cos());
        let at_nodes = f.interp(&g64().nodes());
        for (a, b) in at_nodes.iter().zip(f.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn interp_reduces_points_mod_length() {
        let f = Field::from_fn(g64(), f64::sin);
        assert!((f.interp_one(1.0 + 3.0 * TAU) - 1f64.sin()).abs() < 1e-11);
        assert!((f.interp_one(1.0 - 2.0 * TAU) - 1f64.sin()).abs() < 1e-11);
    }

    #[test]
    fn multiplier_a1_on_sin() {
        // Symbol 1 + m^2 doubles the fundamental.
        let mult = MultiplierSpec::from_symbol(g64(), |m| 1.0 + (m * m) as f64);
        let f = Field::from_fn(g64(), f64::sin);
        let out = f.apply_multiplier(&mult);
        assert!((&out - &(&f * 2.0)).sup_norm() < 1e-12);
    }

    #[test]
    fn multiplier_a2_on_sin2x() {
        let mult = MultiplierSpec::from_symbol(g64(), |m| {
            let m2 = (m * m) as f64;
            1.0 + m2 + m2 * m2
        });
        let f = Field::from_fn(g64(), |x| (2.0 * x).sin());
        let out = f.apply_multiplier(&mult);
        // The m^4 symbol amplifies the spectral noise floor to ~1e-10.
        let diff = (&out - &(&f * 21.0)).sup_norm();
        assert!(diff < 1e-8, "sup diff {diff}");
    }

    #[test]
    fn multiplier_inverse_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mult = MultiplierSpec::from_symbol(g64(), |m| 1.0 + (m * m) as f64);
        let inv = mult.inverse().unwrap();
        let f = rand_trig(g64(), 10, 1.0, &mut rng);
        let back = f.apply_multiplier(&mult).apply_multiplier(&inv);
        assert!((&back - &f).sup_norm() < 1e-12);
    }

    #[test]
    fn multiplier_inverse_rejects_zero_symbol() {
        let mult = MultiplierSpec::from_symbol(g64(), |m| if m == 3 { 0.0 } else { 1.0 });
        assert!(matches!(mult.inverse(), Err(Error::ZeroMultiplier(3))));
    }

    #[test]
    fn dealias_keeps_low_and_kills_high_modes() {
        let f = Field::from_fn(g64(), f64::sin);
        assert!((&f.dealias(2.0 / 3.0) - &f).sup_norm() < 1e-13);

        let hi = Field::from_fn(g64(), |x| (31.0 * x).sin());
        assert!(hi.dealias(2.0 / 3.0).sup_norm() < 1e-12);

        let mid = Field::from_fn(g64(), |x| (11.0 * x).cos() + x.sin());
        assert!((&mid.dealias(1.0) - &mid).sup_norm() < 1e-12);
    }

    #[test]
    fn deriv_commutes_with_even_multiplier() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mult = MultiplierSpec::from_symbol(g64(), |m| 1.0 + (m * m) as f64);
        for _ in 0..20 {
            let f = rand_trig(g64(), 20, 1.0, &mut rng);
            let a = f.deriv(1).apply_multiplier(&mult);
            let b = f.apply_multiplier(&mult).deriv(1);
            assert!((&a - &b).sup_norm() < 1e-10);
        }
    }

    #[test]
    fn integration_by_parts_on_circle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let f = rand_trig(g64(), 20, 1.0, &mut rng);
            let g = rand_trig(g64(), 20, 1.0, &mut rng);
            let lhs = (&f * &g.deriv(1)).quad();
            let rhs = -(&f.deriv(1) * &g).quad();
            let scale = 1.0 + lhs.abs().max(rhs.abs());
            assert!((lhs - rhs).abs() / scale < 1e-10);
        }
    }

    proptest! {
        #[test]
        fn quad_of_derivative_vanishes(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let f = rand_trig(g64(), 31, 2.0, &mut rng);
            prop_assert!(f.deriv(1).quad().abs() < 1e-10);
        }

        #[test]
        fn interp_is_linear_and_exact(seed in 0u64..200, x in 0.0..TAU) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // Top occupied mode n/2 - 1 = 31: interpolation must be exact.
            let f = rand_trig(g64(), 31, 1.0, &mut rng);
            let g = rand_trig(g64(), 31, 1.0, &mut rng);
            let combo = &(&f * 2.5) + &g;
            let direct = combo.interp_one(x);
            let linear = 2.5 * f.interp_one(x) + g.interp_one(x);
            prop_assert!((direct - linear).abs() < 1e-10);
        }
    }

    #[test]
    fn interp_exact_on_top_mode() {
        // Highest fully-representable mode for interpolation is n/2 - 1.
        let f = Field::from_fn(g64(), |x| (31.0 * x).sin());
        for &x in &[0.3, 1.1, 4.9] {
            assert!((f.interp_one(x) - (31.0 * x).sin()).abs() < 1e-10);
        }
    }
}
