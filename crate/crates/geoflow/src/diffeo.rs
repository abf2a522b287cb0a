//! The group layer: orientation-preserving diffeomorphisms of the circle
//! stored as identity-plus-displacement, their composition and inversion,
//! the Schwarzian derivative, the Bott group cocycle and the Virasoro-Bott
//! multiplication and adjoint action.

use crate::grid::{Field, Grid, Interpolant};
use crate::metrics::CentralVec;
use crate::{Error, Result};

/// Minimum admissible value of `1 + g'`; below this the map has left the
/// group at the working resolution.
pub const SLOPE_MARGIN: f64 = 1e-8;

const NEWTON_MAX_ITER: usize = 50;
const NEWTON_TOL: f64 = 1e-12;

/// Orientation-preserving diffeomorphism `φ(x) = x + g(x)` with periodic
/// displacement `g` and `1 + g' > 0` at every node.
#[derive(Debug, Clone, PartialEq)]
pub struct Diffeo {
    disp: Field,
}

impl Diffeo {
    pub fn new(disp: Field) -> Result<Self> {
        if !disp.is_finite() {
            return Err(Error::NonFinite("Diffeo displacement"));
        }
        let min_slope = 1.0 + disp.deriv(1).min_value();
        if min_slope <= SLOPE_MARGIN {
            return Err(Error::OrientationLost { min_slope });
        }
        Ok(Diffeo { disp })
    }

    pub fn identity(grid: Grid) -> Self {
        Diffeo {
            disp: Field::zeros(grid),
        }
    }

    pub fn from_fn(grid: Grid, disp: impl Fn(f64) -> f64) -> Result<Self> {
        Diffeo::new(Field::from_fn(grid, disp))
    }

    pub fn grid(&self) -> Grid {
        self.disp.grid()
    }

    pub fn disp(&self) -> &Field {
        &self.disp
    }

    /// Derivative `φ' = 1 + g'` sampled at the nodes.
    pub fn slope(&self) -> Field {
        &Field::constant(self.grid(), 1.0) + &self.disp.deriv(1)
    }

    pub fn min_slope(&self) -> f64 {
        self.slope().min_value()
    }

    pub fn eval_one(&self, x: f64) -> f64 {
        x + self.disp.interp_one(x)
    }

    pub fn eval(&self, points: &[f64]) -> Vec<f64> {
        let interp = Interpolant::new(&self.disp);
        points.iter().map(|&x| x + interp.eval(x)).collect()
    }

    /// Composition `φ∘ψ`: displacement `ψ.g + φ.g(x + ψ.g)`.
    pub fn compose(&self, inner: &Diffeo) -> Result<Diffeo> {
        if self.grid() != inner.grid() {
            return Err(Error::GridMismatch(self.grid().n(), inner.grid().n()));
        }
        let grid = self.grid();
        let outer = Interpolant::new(&self.disp);
        let values: Vec<f64> = (0..grid.n())
            .map(|j| {
                let shifted = grid.node(j) + inner.disp.values()[j];
                inner.disp.values()[j] + outer.eval(shifted)
            })
            .collect();
        Diffeo::new(Field::from_values(grid, values)?)
    }

    /// Inverse by per-node Newton iteration on `φ(y) = x`.
    pub fn invert(&self) -> Result<Diffeo> {
        let grid = self.grid();
        let min_slope = self.min_slope();
        if min_slope <= SLOPE_MARGIN {
            return Err(Error::OrientationLost { min_slope });
        }
        let disp = Interpolant::new(&self.disp);
        let dslope = Interpolant::new(&self.disp.deriv(1));
        let mut values = Vec::with_capacity(grid.n());
        for j in 0..grid.n() {
            let x = grid.node(j);
            let mut y = x - disp.eval(x);
            let mut residual = f64::INFINITY;
            let mut converged = false;
            for _ in 0..NEWTON_MAX_ITER {
                residual = y + disp.eval(y) - x;
                if residual.abs() < NEWTON_TOL {
                    converged = true;
                    break;
                }
                let slope = 1.0 + dslope.eval(y);
                y -= residual / slope.max(SLOPE_MARGIN);
            }
            if !converged {
                return Err(Error::NewtonDiverged {
                    node: j,
                    residual: residual.abs(),
                });
            }
            values.push(y - x);
        }
        Diffeo::new(Field::from_values(grid, values)?)
    }

    /// Schwarzian derivative `S(φ) = (φ''/φ')' − ½(φ''/φ')²`.
    pub fn schwarzian(&self) -> Field {
        let grid = self.grid();
        let slope = self.slope();
        let curv = self.disp.deriv(2);
        let w: Vec<f64> = curv
            .values()
            .iter()
            .zip(slope.values())
            .map(|(c, s)| c / s)
            .collect();
        let w = Field::from_values(grid, w).expect("slope is bounded away from zero");
        &w.deriv(1) - &(&(&w * &w) * 0.5)
    }
}

/// Bott group cocycle `c(φ,ψ) = ½ ∫ log(φ'∘ψ) d log ψ'`.
pub fn bott_cocycle(phi: &Diffeo, psi: &Diffeo) -> Result<f64> {
    if phi.grid() != psi.grid() {
        return Err(Error::GridMismatch(phi.grid().n(), psi.grid().n()));
    }
    let grid = phi.grid();
    let phi_slope = Interpolant::new(&phi.slope());
    let psi_slope = psi.slope();
    let psi_curv = psi.disp().deriv(2);
    let mut values = Vec::with_capacity(grid.n());
    for j in 0..grid.n() {
        let at = grid.node(j) + psi.disp().values()[j];
        let s = phi_slope.eval(at);
        if s <= 0.0 {
            return Err(Error::NonFinite("log of non-positive slope in Bott cocycle"));
        }
        values.push(s.ln() * psi_curv.values()[j] / psi_slope.values()[j]);
    }
    Ok(0.5 * Field::from_values(grid, values)?.quad())
}

/// Element `(φ, α)` of the Virasoro-Bott group with the ℝ-central-extension
/// law `(φ,α)·(ψ,β) = (φ∘ψ, α+β+c(φ,ψ))`.
#[derive(Debug, Clone)]
pub struct VirasoroElement {
    pub phi: Diffeo,
    pub alpha: f64,
}

impl VirasoroElement {
    pub fn new(phi: Diffeo, alpha: f64) -> Self {
        VirasoroElement { phi, alpha }
    }

    pub fn identity(grid: Grid) -> Self {
        VirasoroElement {
            phi: Diffeo::identity(grid),
            alpha: 0.0,
        }
    }

    pub fn mul(&self, rhs: &VirasoroElement) -> Result<VirasoroElement> {
        Ok(VirasoroElement {
            phi: self.phi.compose(&rhs.phi)?,
            alpha: self.alpha + rhs.alpha + bott_cocycle(&self.phi, &rhs.phi)?,
        })
    }

    /// Group inverse `(φ⁻¹, −α)`; uses `c(φ, φ⁻¹) = 0`.
    pub fn inverse(&self) -> Result<VirasoroElement> {
        Ok(VirasoroElement {
            phi: self.phi.invert()?,
            alpha: -self.alpha,
        })
    }

    /// Adjoint action `Ad(φ,α)(Y,b) = (φ_*Y, b + ∫S(φ)·Y dx)` with the
    /// push-forward `φ_*Y = (φ'·Y)∘φ⁻¹`.
    ///
    /// This is a group homomorphism for the composition order used by
    /// [`VirasoroElement::mul`]: `Ad(g·h) = Ad(g)∘Ad(h)` (asserted in the
    /// test suite).
    pub fn adjoint(&self, v: &CentralVec) -> Result<CentralVec> {
        let grid = self.phi.grid();
        if v.grid() != grid {
            return Err(Error::GridMismatch(v.grid().n(), grid.n()));
        }
        let pushed = {
            let w = &self.phi.slope() * &v.x;
            let inv = self.phi.invert()?;
            let interp = Interpolant::new(&w);
            let values: Vec<f64> = (0..grid.n())
                .map(|j| interp.eval(grid.node(j) + inv.disp().values()[j]))
                .collect();
            Field::from_values(grid, values)?
        };
        let central = v.a + (&self.phi.schwarzian() * &v.x).quad();
        Ok(CentralVec::new(pushed, central))
    }
}

/// Order-`p` derivative of `f∘g` at a point from the derivative lists
/// `f_derivs[i] = f^(i+1)(g(x))` and `g_derivs[i] = g^(i+1)(x)`.
///
/// Sums over integer compositions of `p`; intended for small orders
/// (`p <= 10`), where the factorial growth is harmless.
pub fn faa_di_bruno(f_derivs: &[f64], g_derivs: &[f64], p: usize) -> Result<f64> {
    if p == 0 || p > 10 {
        return Err(Error::InvalidParameter(format!(
            "composition order must be in 1..=10, got {p}"
        )));
    }
    if f_derivs.len() < p || g_derivs.len() < p {
        return Err(Error::InvalidParameter(format!(
            "need derivatives up to order {p}: got {} for f, {} for g",
            f_derivs.len(),
            g_derivs.len()
        )));
    }
    let factorial = |k: usize| (1..=k).map(|i| i as f64).product::<f64>();
    // Recursively enumerate compositions of `remaining` into positive parts.
    fn compositions(remaining: usize, prefix_product: f64, g: &[f64], parts: usize, acc: &mut Vec<(usize, f64)>) {
        if remaining == 0 {
            acc.push((parts, prefix_product));
            return;
        }
        for part in 1..=remaining {
            let factor = g[part - 1] / (1..=part).map(|i| i as f64).product::<f64>();
            compositions(remaining - part, prefix_product * factor, g, parts + 1, acc);
        }
    }
    let mut terms = Vec::new();
    compositions(p, 1.0, g_derivs, 0, &mut terms);
    let mut total = 0.0;
    for (m, product) in terms {
        total += f_derivs[m - 1] / factorial(m) * product;
    }
    Ok(factorial(p) * total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::testing::rand_small_displacement;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    fn grid() -> Grid {
        Grid::standard(256).unwrap()
    }

    fn rand_diffeo(rng: &mut ChaCha8Rng) -> Diffeo {
        Diffeo::new(rand_small_displacement(grid(), 4, 0.08, rng)).unwrap()
    }

    #[test]
    fn rejects_orientation_breaking_displacement() {
        let disp = Field::from_fn(grid(), |x| 1.2 * x.sin());
        assert!(matches!(
            Diffeo::new(disp),
            Err(Error::OrientationLost { .. })
        ));
    }

    #[test]
    fn compose_with_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let psi = rand_diffeo(&mut rng);
        let id = Diffeo::identity(grid());
        let left = id.compose(&psi).unwrap();
        let right = psi.compose(&id).unwrap();
        assert!((left.disp() - psi.disp()).sup_norm() < 1e-12);
        assert!((right.disp() - psi.disp()).sup_norm() < 1e-12);
    }

    #[test]
    fn compose_matches_pointwise_evaluation() {
        // φ = ψ = x + 0.1 sin x composed: displacement
        // 0.1 sin x + 0.1 sin(x + 0.1 sin x), checked pointwise.
        let phi = Diffeo::from_fn(grid(), |x| 0.1 * x.sin()).unwrap();
        let out = phi.compose(&phi).unwrap();
        let expect = Field::from_fn(grid(), |x| {
            0.1 * x.sin() + 0.1 * (x + 0.1 * x.sin()).sin()
        });
        assert!((out.disp() - &expect).sup_norm() < 1e-10);
    }

    #[test]
    fn compose_is_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5 {
            let a = rand_diffeo(&mut rng);
            let b = rand_diffeo(&mut rng);
            let c = rand_diffeo(&mut rng);
            let left = a.compose(&b).unwrap().compose(&c).unwrap();
            let right = a.compose(&b.compose(&c).unwrap()).unwrap();
            assert!((left.disp() - right.disp()).sup_norm() < 1e-8);
        }
    }

    #[test]
    fn deep_composition_eventually_leaves_the_group() {
        // Iterating x + 0.8 sin x contracts the slope at x = π by 0.2 per
        // step; the composite must eventually be rejected rather than
        // returned as a non-diffeomorphism.
        let g = Grid::standard(512).unwrap();
        let phi = Diffeo::from_fn(g, |x| 0.8 * x.sin()).unwrap();
        let mut acc = phi.clone();
        let mut rejected = false;
        for _ in 0..14 {
            match acc.compose(&phi) {
                Ok(next) => acc = next,
                Err(_) => {
                    rejected = true;
                    break;
                }
            }
        }
        assert!(rejected, "composition series stayed inside the group");
    }

    #[test]
    fn invert_identity_and_translation() {
        let id = Diffeo::identity(grid());
        assert!(id.invert().unwrap().disp().sup_norm() < 1e-12);

        let shift = Diffeo::new(Field::constant(grid(), 0.37)).unwrap();
        let inv = shift.invert().unwrap();
        assert!((inv.disp() - &Field::constant(grid(), -0.37)).sup_norm() < 1e-11);
    }

    #[test]
    fn invert_composes_back_to_identity() {
        let phi = Diffeo::from_fn(grid(), |x| 0.3 * x.sin()).unwrap();
        let inv = phi.invert().unwrap();
        let both = phi.compose(&inv).unwrap();
        assert!(both.disp().sup_norm() < 1e-8);
        let other = inv.compose(&phi).unwrap();
        assert!(other.disp().sup_norm() < 1e-8);
    }

    #[test]
    fn schwarzian_of_identity_vanishes() {
        assert!(Diffeo::identity(grid()).schwarzian().sup_norm() < 1e-12);
    }

    #[test]
    fn schwarzian_composition_law() {
        // S(φ∘ψ) = (S(φ)∘ψ)·(ψ')² + S(ψ).
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let phi = rand_diffeo(&mut rng);
            let psi = rand_diffeo(&mut rng);
            let comp = phi.compose(&psi).unwrap();
            let lhs = comp.schwarzian();
            let s_phi = Interpolant::new(&phi.schwarzian());
            let psi_slope = psi.slope();
            let g = grid();
            let rhs_vals: Vec<f64> = (0..g.n())
                .map(|j| {
                    let at = g.node(j) + psi.disp().values()[j];
                    s_phi.eval(at) * psi_slope.values()[j].powi(2)
                })
                .collect();
            let rhs = &Field::from_values(g, rhs_vals).unwrap() + &psi.schwarzian();
            assert!(
                (&lhs - &rhs).sup_norm() < 1e-7,
                "composition law residual {}",
                (&lhs - &rhs).sup_norm()
            );
        }
    }

    #[test]
    fn schwarzian_inverse_law() {
        // S(φ⁻¹) = −(S(φ)/φ'²)∘φ⁻¹.
        let phi = Diffeo::from_fn(grid(), |x| 0.15 * x.sin() + 0.05 * (2.0 * x).cos()).unwrap();
        let inv = phi.invert().unwrap();
        let lhs = inv.schwarzian();
        let slope = phi.slope();
        let ratio_vals: Vec<f64> = phi
            .schwarzian()
            .values()
            .iter()
            .zip(slope.values())
            .map(|(s, d)| -s / (d * d))
            .collect();
        let ratio = Field::from_values(grid(), ratio_vals).unwrap();
        let interp = Interpolant::new(&ratio);
        let g = grid();
        let rhs_vals: Vec<f64> = (0..g.n())
            .map(|j| interp.eval(g.node(j) + inv.disp().values()[j]))
            .collect();
        let rhs = Field::from_values(g, rhs_vals).unwrap();
        assert!((&lhs - &rhs).sup_norm() < 1e-6);
    }

    #[test]
    fn schwarzian_of_moebius_vanishes_in_the_interior() {
        // Long-box realization of the real line: a Möbius map windowed to
        // the interior has vanishing Schwarzian where it is exactly Möbius.
        let length = 80.0;
        let grid = Grid::new(2048, length).unwrap();
        let half = length / 2.0;
        let (b, c) = (0.2, 1e-4);
        let moebius_disp = |s: f64| (b - c * s * s) / (1.0 + c * s);
        let ramp = |u: f64| {
            // C-infinity partition ramp: 0 for u<=0, 1 for u>=1.
            let bump = |v: f64| if v > 0.0 { (-1.0 / v).exp() } else { 0.0 };
            bump(u) / (bump(u) + bump(1.0 - u))
        };
        let window = |s: f64| {
            let r = s.abs();
            if r <= 24.0 {
                1.0
            } else if r >= 36.0 {
                0.0
            } else {
                ramp((36.0 - r) / 12.0)
            }
        };
        let phi = Diffeo::from_fn(grid, |x| {
            let s = x - half;
            window(s) * moebius_disp(s)
        })
        .unwrap();
        let s_phi = phi.schwarzian();
        let mut worst: f64 = 0.0;
        for j in 0..grid.n() {
            let s = grid.node(j) - half;
            if s.abs() <= 20.0 {
                worst = worst.max(s_phi.values()[j].abs());
            }
        }
        assert!(worst < 1e-6, "interior Schwarzian {worst}");
    }

    #[test]
    fn bott_cocycle_degenerate_arguments() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let psi = rand_diffeo(&mut rng);
        let id = Diffeo::identity(grid());
        assert_eq!(bott_cocycle(&psi, &id).unwrap(), 0.0);
        assert!(bott_cocycle(&id, &psi).unwrap().abs() < 1e-12);
        let inv = psi.invert().unwrap();
        assert!(bott_cocycle(&psi, &inv).unwrap().abs() < 1e-8);
    }

    #[test]
    fn bott_cocycle_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let p1 = rand_diffeo(&mut rng);
            let p2 = rand_diffeo(&mut rng);
            let p3 = rand_diffeo(&mut rng);
            let residual = bott_cocycle(&p2, &p3).unwrap()
                - bott_cocycle(&p1.compose(&p2).unwrap(), &p3).unwrap()
                + bott_cocycle(&p1, &p2.compose(&p3).unwrap()).unwrap()
                - bott_cocycle(&p1, &p2).unwrap();
            assert!(residual.abs() < 1e-8, "cocycle residual {residual}");
        }
    }

    #[test]
    fn virasoro_unit_and_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = VirasoroElement::new(rand_diffeo(&mut rng), 0.7);
        let e = VirasoroElement::identity(grid());
        let left = e.mul(&a).unwrap();
        assert!((left.disp_norm(&a)) < 1e-12);
        assert!((left.alpha - a.alpha).abs() < 1e-12);

        let prod = a.mul(&a.inverse().unwrap()).unwrap();
        assert!(prod.phi.disp().sup_norm() < 1e-8);
        assert!(prod.alpha.abs() < 1e-8);
    }

    impl VirasoroElement {
        fn disp_norm(&self, other: &VirasoroElement) -> f64 {
            (self.phi.disp() - other.phi.disp()).sup_norm()
        }
    }

    #[test]
    fn virasoro_mul_is_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..3 {
            let a = VirasoroElement::new(rand_diffeo(&mut rng), 0.3);
            let b = VirasoroElement::new(rand_diffeo(&mut rng), -0.2);
            let c = VirasoroElement::new(rand_diffeo(&mut rng), 1.1);
            let left = a.mul(&b).unwrap().mul(&c).unwrap();
            let right = a.mul(&b.mul(&c).unwrap()).unwrap();
            assert!(left.disp_norm(&right) < 1e-8);
            assert!((left.alpha - right.alpha).abs() < 1e-8);
        }
    }

    #[test]
    fn adjoint_of_identity_and_inverse_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let v = CentralVec::new(
            rand_small_displacement(grid(), 4, 0.5, &mut rng),
            0.9,
        );
        let e = VirasoroElement::identity(grid());
        let out = e.adjoint(&v).unwrap();
        assert!((&out.x - &v.x).sup_norm() < 1e-10);
        assert!((out.a - v.a).abs() < 1e-10);

        let g = VirasoroElement::new(rand_diffeo(&mut rng), 0.0);
        let ginv = g.inverse().unwrap();
        let round = ginv.adjoint(&g.adjoint(&v).unwrap()).unwrap();
        assert!((&round.x - &v.x).sup_norm() < 1e-7);
        assert!((round.a - v.a).abs() < 1e-7);
    }

    #[test]
    fn adjoint_is_a_homomorphism_for_this_composition_order() {
        // Resolves the left/right convention question empirically:
        // Ad(g·h) = Ad(g)∘Ad(h) (not the anti-homomorphism order).
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = VirasoroElement::new(rand_diffeo(&mut rng), 0.2);
        let h = VirasoroElement::new(rand_diffeo(&mut rng), -0.4);
        let v = CentralVec::new(rand_small_displacement(grid(), 4, 0.5, &mut rng), 0.3);
        let lhs = g.mul(&h).unwrap().adjoint(&v).unwrap();
        let homo = g.adjoint(&h.adjoint(&v).unwrap()).unwrap();
        let anti = h.adjoint(&g.adjoint(&v).unwrap()).unwrap();
        let homo_res = (&lhs.x - &homo.x).sup_norm().max((lhs.a - homo.a).abs());
        let anti_res = (&lhs.x - &anti.x).sup_norm().max((lhs.a - anti.a).abs());
        assert!(homo_res < 1e-7, "homomorphism residual {homo_res}");
        assert!(anti_res > 1e-4, "orders unexpectedly agree; degenerate data");
    }

    #[test]
    fn adjoint_central_part_with_identity_map() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let v = CentralVec::new(rand_small_displacement(grid(), 4, 0.5, &mut rng), 1.3);
        // φ = id has S(φ) = 0, so the central part passes through.
        let e = VirasoroElement::identity(grid());
        assert!((e.adjoint(&v).unwrap().a - 1.3).abs() < 1e-12);
    }

    #[test]
    fn faa_di_bruno_low_orders() {
        // p = 1: chain rule; p = 2: f''·g'² + f'·g''.
        let f = [2.0, -1.0, 0.5, 3.0];
        let g = [1.5, 0.7, -0.2, 0.1];
        assert!((faa_di_bruno(&f, &g, 1).unwrap() - 2.0 * 1.5).abs() < 1e-14);
        let expect = -(1.5f64.powi(2)) + 2.0 * 0.7;
        assert!((faa_di_bruno(&f, &g, 2).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn faa_di_bruno_matches_finite_difference() {
        // 4th derivative of sin(exp x) at x = 0.3 against an O(h^4)
        // seven-point central stencil.
        let x0 = 0.3f64;
        let gx = x0.exp();
        let f_derivs = [gx.cos(), -gx.sin(), -gx.cos(), gx.sin()];
        let g_derivs = [gx, gx, gx, gx];
        let result = faa_di_bruno(&f_derivs, &g_derivs, 4).unwrap();

        let h = 0.01;
        let f = |x: f64| x.exp().sin();
        let stencil = [
            (-3, -1.0 / 6.0),
            (-2, 2.0),
            (-1, -13.0 / 2.0),
            (0, 28.0 / 3.0),
            (1, -13.0 / 2.0),
            (2, 2.0),
            (3, -1.0 / 6.0),
        ];
        let fd: f64 = stencil
            .iter()
            .map(|&(k, w)| w * f(x0 + k as f64 * h))
            .sum::<f64>()
            / h.powi(4);
        assert!((result - fd).abs() < 1e-5, "faa {result} vs fd {fd}");
    }

    #[test]
    fn faa_di_bruno_rejects_short_lists() {
        assert!(faa_di_bruno(&[1.0], &[1.0, 2.0], 2).is_err());
        assert!(faa_di_bruno(&[1.0, 2.0], &[1.0], 2).is_err());
    }

    #[test]
    fn eval_reduces_points_modulo_period() {
        let phi = Diffeo::from_fn(grid(), |x| 0.1 * x.sin()).unwrap();
        let a = phi.eval_one(1.0);
        let b = phi.eval_one(1.0 + TAU);
        assert!((b - a - TAU).abs() < 1e-10);
    }
}
