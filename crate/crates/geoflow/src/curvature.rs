//! Curvature evaluators: the Emb(ℝ,ℝ) Christoffel form and its closed-form
//! curvature, the generic 16-term right-invariant curvature quadruple, the
//! sectional curvature, and the Virasoro closed-form curvature integral.
//!
//! Sign convention: sectional curvature is normalized so that the `H^0`
//! (Burgers) values are non-negative, `k(X∧Y) = ‖[X,Y]‖²/Gram(X,Y)`.

use crate::diffeo::Diffeo;
use crate::grid::Field;
use crate::metrics::{
    ad_transpose, bracket_in, gelfand_fuchs, inner, Algebra, CentralVec, InertiaSpec,
};
use crate::{Error, Result};

/// Christoffel form of the `L²` metric on embeddings:
/// `Γ_f(h,k) = -(hk)_x / f_x`.
pub fn christoffel_emb(f: &Diffeo, h: &Field, k: &Field) -> Field {
    let num = (h * k).deriv(1);
    let fx = f.slope();
    let values: Vec<f64> = num
        .values()
        .iter()
        .zip(fx.values())
        .map(|(n, d)| -n / d)
        .collect();
    Field::from_values(f.grid(), values).expect("slope bounded away from zero")
}

/// Closed-form curvature of the embedding metric:
/// `R_f(h,k)ℓ = (1/f_x³)(f_xx h_x k ℓ − f_xx h k_x ℓ + f_x h k_xx ℓ −
/// f_x h_xx k ℓ + 2 f_x h k_x ℓ_x − 2 f_x h_x k ℓ_x)`.
pub fn curvature_emb(f: &Diffeo, h: &Field, k: &Field, l: &Field) -> Field {
    let fx = f.slope();
    let fxx = f.disp().deriv(2);
    let (hx, kx, lx) = (h.deriv(1), k.deriv(1), l.deriv(1));
    let (hxx, kxx) = (h.deriv(2), k.deriv(2));
    let n = f.grid().n();
    let values: Vec<f64> = (0..n)
        .map(|j| {
            let (fxj, fxxj) = (fx.values()[j], fxx.values()[j]);
            let (hj, kj, lj) = (h.values()[j], k.values()[j], l.values()[j]);
            let (hxj, kxj, lxj) = (hx.values()[j], kx.values()[j], lx.values()[j]);
            let (hxxj, kxxj) = (hxx.values()[j], kxx.values()[j]);
            (fxxj * hxj * kj * lj - fxxj * hj * kxj * lj + fxj * hj * kxxj * lj
                - fxj * hxxj * kj * lj
                + 2.0 * fxj * hj * kxj * lxj
                - 2.0 * fxj * hxj * kj * lxj)
                / fxj.powi(3)
        })
        .collect();
    Field::from_values(f.grid(), values).expect("curvature values are finite")
}

/// Curvature assembled from the Christoffel form with directional
/// derivatives in the base point taken by central finite differences:
/// `R = -dΓ(h)(k,ℓ) + dΓ(k)(h,ℓ) + Γ_f(h,Γ_f(k,ℓ)) − Γ_f(k,Γ_f(h,ℓ))`.
pub fn curvature_emb_via_christoffel(
    f: &Diffeo,
    h: &Field,
    k: &Field,
    l: &Field,
    fd_step: f64,
) -> Result<Field> {
    let dgamma = |dir: &Field, a: &Field, b: &Field| -> Result<Field> {
        let plus = Diffeo::new(f.disp() + &(dir * fd_step))?;
        let minus = Diffeo::new(f.disp() - &(dir * fd_step))?;
        Ok(&(&christoffel_emb(&plus, a, b) - &christoffel_emb(&minus, a, b))
            * (1.0 / (2.0 * fd_step)))
    };
    let first = dgamma(h, k, l)?;
    let second = dgamma(k, h, l)?;
    let third = christoffel_emb(f, h, &christoffel_emb(f, k, l));
    let fourth = christoffel_emb(f, k, &christoffel_emb(f, h, l));
    Ok(&(&(-&first) + &second) + &(&third - &fourth))
}

/// The generic right-invariant curvature quadruple `γ(4R(X,Y)Z,U)`:
/// the 16-term expression in brackets and metric transposes.
///
/// The `algebra` argument selects between the plain vector-field algebra
/// (Burgers-type curvature) and its Virasoro central extension.
pub fn curvature_quadruple(
    spec: InertiaSpec,
    algebra: Algebra,
    x: &CentralVec,
    y: &CentralVec,
    z: &CentralVec,
    u: &CentralVec,
) -> f64 {
    let g = |a: &CentralVec, b: &CentralVec| inner(spec, a, b);
    let adt = |a: &CentralVec, b: &CentralVec| ad_transpose(spec, a, b);
    let br = |a: &CentralVec, b: &CentralVec| bracket_in(algebra, a, b);

    2.0 * g(&br(x, y), &br(z, u)) - g(&br(y, z), &br(x, u)) + g(&br(x, z), &br(y, u))
        - g(z, &br(u, &br(x, y)))
        + g(u, &br(z, &br(x, y)))
        - g(y, &br(x, &br(u, z)))
        - g(x, &br(y, &br(z, u)))
        + g(&adt(x, z), &adt(y, u))
        + g(&adt(x, z), &adt(u, y))
        + g(&adt(z, x), &adt(y, u))
        - g(&adt(u, x), &adt(y, z))
        - g(&adt(y, z), &adt(x, u))
        - g(&adt(z, y), &adt(x, u))
        - g(&adt(u, x), &adt(z, y))
        + g(&adt(u, y), &adt(z, x))
}

/// The pair form `γ(4R(X,Y)X,Y)` in five terms, an independent route to
/// the sectional numerator.
pub fn curvature_pair(spec: InertiaSpec, algebra: Algebra, x: &CentralVec, y: &CentralVec) -> f64 {
    let g = |a: &CentralVec, b: &CentralVec| inner(spec, a, b);
    let adt = |a: &CentralVec, b: &CentralVec| ad_transpose(spec, a, b);
    let ad_xy = bracket_in(algebra, x, y);
    let ad_yx = bracket_in(algebra, y, x);
    let mixed = &adt(x, y) + &adt(y, x);
    3.0 * g(&ad_xy, &ad_xy) - 2.0 * g(&adt(y, x), &ad_xy) - 2.0 * g(&adt(x, y), &ad_yx)
        + 4.0 * g(&adt(x, x), &adt(y, y))
        - g(&mixed, &mixed)
}

/// Sectional curvature `k(X∧Y) = -γ(R(X,Y)X,Y) / (‖X‖²‖Y‖² − ⟨X,Y⟩²)`,
/// normalized so Burgers (`H^0`) planes have `k ≥ 0`.
pub fn sectional(spec: InertiaSpec, algebra: Algebra, x: &CentralVec, y: &CentralVec) -> Result<f64> {
    let xx = inner(spec, x, x);
    let yy = inner(spec, y, y);
    let xy = inner(spec, x, y);
    let gram = xx * yy - xy * xy;
    let tol = 1e-12 * (1.0 + xx.abs()) * (1.0 + yy.abs());
    if gram <= tol {
        return Err(Error::DegeneratePlane(gram));
    }
    Ok(-curvature_quadruple(spec, algebra, x, y, x, y) / (4.0 * gram))
}

/// Closed-form Virasoro sectional-curvature integral for the `H^0` metric:
/// the value `⟨4R((X₁,a₁),(X₂,a₂))(X₁,a₁),(X₂,a₂)⟩₀` as a single quadrature
/// plus `3ω(X₁,X₂)²`.
pub fn virasoro_curvature_form(x1: &Field, a1: f64, x2: &Field, a2: f64) -> f64 {
    let br = &(&x1.deriv(1) * x2) - &(x1 * &x2.deriv(1));
    let (d1_3, d2_3) = (x1.deriv(3), x2.deriv(3));
    let (d1_4, d2_4) = (x1.deriv(4), x2.deriv(4));
    let weighted = &(&(x1 * &d2_4) - &(&x1.deriv(1) * &d2_3))
        + &(&(&d1_3 * &x2.deriv(1)) - &(&d1_4 * x2));
    let mix = &(x2 * a1) - &(x1 * a2);
    let integrand = &(&(&(-&(&br * &br)) * 4.0) + &(&(&mix * &weighted) * 4.0))
        + &(&(&(&d2_3 * &d2_3) * (-a1 * a1))
            + &(&(&(&d1_3 * &d2_3) * (2.0 * a1 * a2)) + &(&(&d1_3 * &d1_3) * (-a2 * a2))));
    let omega = gelfand_fuchs(x1, x2);
    integrand.quad() + 3.0 * omega * omega
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::metrics::alpha_op;
    use crate::util::testing::{rand_small_displacement, rand_trig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::standard(128).unwrap()
    }

    fn sin_field() -> Field {
        Field::from_fn(grid(), f64::sin)
    }

    fn cos_field() -> Field {
        Field::from_fn(grid(), f64::cos)
    }

    fn rand_vec(rng: &mut ChaCha8Rng, central: bool) -> CentralVec {
        let a = if central { rng.gen_range(-1.0..1.0) } else { 0.0 };
        CentralVec::new(rand_trig(grid(), 4, 1.0, rng), a)
    }

    #[test]
    fn christoffel_at_identity() {
        let id = Diffeo::identity(grid());
        assert!(christoffel_emb(&id, &sin_field(), &Field::zeros(grid())).sup_norm() < 1e-14);
        // Γ_id(sin, sin) = -(sin²)' = -sin 2x.
        let out = christoffel_emb(&id, &sin_field(), &sin_field());
        let expect = Field::from_fn(grid(), |x| -(2.0 * x).sin());
        assert!((&out - &expect).sup_norm() < 1e-11);
    }

    #[test]
    fn christoffel_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = Diffeo::new(rand_small_displacement(grid(), 4, 0.2, &mut rng)).unwrap();
        let h = rand_trig(grid(), 5, 1.0, &mut rng);
        let k = rand_trig(grid(), 5, 1.0, &mut rng);
        let a = christoffel_emb(&f, &h, &k);
        let b = christoffel_emb(&f, &k, &h);
        assert!((&a - &b).sup_norm() < 1e-13);
    }

    #[test]
    fn curvature_emb_antisymmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = Diffeo::new(rand_small_displacement(grid(), 4, 0.2, &mut rng)).unwrap();
        let h = rand_trig(grid(), 5, 1.0, &mut rng);
        let k = rand_trig(grid(), 5, 1.0, &mut rng);
        let l = rand_trig(grid(), 5, 1.0, &mut rng);
        let hk = curvature_emb(&f, &h, &k, &l);
        let kh = curvature_emb(&f, &k, &h, &l);
        assert!((&hk + &kh).sup_norm() < 1e-10);
        assert!(curvature_emb(&f, &h, &h, &l).sup_norm() < 1e-12);
    }

    #[test]
    fn curvature_emb_matches_christoffel_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..5 {
            let f = Diffeo::new(rand_small_displacement(grid(), 4, 0.2, &mut rng)).unwrap();
            let h = rand_trig(grid(), 4, 1.0, &mut rng);
            let k = rand_trig(grid(), 4, 1.0, &mut rng);
            let l = rand_trig(grid(), 4, 1.0, &mut rng);
            let closed = curvature_emb(&f, &h, &k, &l);
            let expanded = curvature_emb_via_christoffel(&f, &h, &k, &l, 1e-5).unwrap();
            let sup = (&closed - &expanded).sup_norm();
            assert!(sup < 1e-6, "closed vs expanded sup {sup}");
        }
    }

    #[test]
    fn quadruple_vanishes_on_equal_first_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = rand_vec(&mut rng, true);
        let z = rand_vec(&mut rng, true);
        let u = rand_vec(&mut rng, true);
        let v = curvature_quadruple(InertiaSpec::h0(), Algebra::Virasoro, &x, &x, &z, &u);
        assert!(v.abs() < 1e-10);
    }

    #[test]
    fn quadruple_antisymmetries_and_pair_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for spec in [InertiaSpec::h0(), InertiaSpec::hk(1)] {
            let x = rand_vec(&mut rng, true);
            let y = rand_vec(&mut rng, true);
            let z = rand_vec(&mut rng, true);
            let u = rand_vec(&mut rng, true);
            let base = curvature_quadruple(spec, Algebra::Virasoro, &x, &y, &z, &u);
            let swap_xy = curvature_quadruple(spec, Algebra::Virasoro, &y, &x, &z, &u);
            let swap_zu = curvature_quadruple(spec, Algebra::Virasoro, &x, &y, &u, &z);
            let pairs = curvature_quadruple(spec, Algebra::Virasoro, &z, &u, &x, &y);
            let scale = 1.0 + base.abs();
            assert!((base + swap_xy).abs() / scale < 1e-10);
            assert!((base + swap_zu).abs() / scale < 1e-10);
            assert!((base - pairs).abs() / scale < 1e-8);
        }
    }

    #[test]
    fn first_bianchi_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let x = rand_vec(&mut rng, true);
            let y = rand_vec(&mut rng, true);
            let z = rand_vec(&mut rng, true);
            let u = rand_vec(&mut rng, true);
            let total = curvature_quadruple(InertiaSpec::h0(), Algebra::Virasoro, &x, &y, &z, &u)
                + curvature_quadruple(InertiaSpec::h0(), Algebra::Virasoro, &y, &z, &x, &u)
                + curvature_quadruple(InertiaSpec::h0(), Algebra::Virasoro, &z, &x, &y, &u);
            assert!(total.abs() < 1e-8, "Bianchi residual {total}");
        }
    }

    #[test]
    fn burgers_curvature_operator_is_minus_alpha_of_bracket() {
        // H0, no center: γ(4R(X,Y)Z,U)/4 = ⟨-α([X,Y])Z, U⟩.
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let h0 = InertiaSpec::h0();
        for _ in 0..5 {
            let x = rand_vec(&mut rng, false);
            let y = rand_vec(&mut rng, false);
            let z = rand_vec(&mut rng, false);
            let u = rand_vec(&mut rng, false);
            let generic = curvature_quadruple(h0, Algebra::Diff, &x, &y, &z, &u) / 4.0;
            let xy = CentralVec::field(crate::metrics::bracket_field(&x.x, &y.x));
            let direct = inner(h0, &alpha_op(h0, &xy, &z).scaled(-1.0), &u);
            assert!(
                (generic - direct).abs() < 1e-8,
                "generic {generic} vs -α([X,Y]) route {direct}"
            );
        }
    }

    #[test]
    fn pair_form_matches_quadruple() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for spec in [InertiaSpec::h0(), InertiaSpec::hk(2), InertiaSpec::ga(0.5).unwrap()] {
            let x = rand_vec(&mut rng, true);
            let y = rand_vec(&mut rng, true);
            let a = curvature_quadruple(spec, Algebra::Virasoro, &x, &y, &x, &y);
            let b = curvature_pair(spec, Algebra::Virasoro, &x, &y);
            assert!((a - b).abs() < 1e-8 * (1.0 + a.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn burgers_sectional_of_sin_cos_is_two_over_pi() {
        let x = CentralVec::field(sin_field());
        let y = CentralVec::field(cos_field());
        let k = sectional(InertiaSpec::h0(), Algebra::Diff, &x, &y).unwrap();
        assert!((k - 2.0 / PI).abs() < 1e-10, "sectional {k}");
    }

    #[test]
    fn sectional_rejects_degenerate_planes() {
        let x = CentralVec::field(sin_field());
        let y = x.scaled(3.0);
        assert!(matches!(
            sectional(InertiaSpec::h0(), Algebra::Diff, &x, &y),
            Err(Error::DegeneratePlane(_))
        ));
    }

    #[test]
    fn burgers_sectional_is_nonnegative() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..50 {
            let x = rand_vec(&mut rng, false);
            let y = rand_vec(&mut rng, false);
            match sectional(InertiaSpec::h0(), Algebra::Diff, &x, &y) {
                Ok(k) => assert!(k >= -1e-12, "negative curvature {k}"),
                Err(Error::DegeneratePlane(_)) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn virasoro_form_trivial_input() {
        assert_eq!(
            virasoro_curvature_form(&Field::zeros(grid()), 0.0, &Field::zeros(grid()), 0.0),
            0.0
        );
    }

    #[test]
    fn virasoro_form_matches_generic_quadruple() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let x1 = rand_trig(grid(), 3, 1.0, &mut rng);
            let x2 = rand_trig(grid(), 3, 1.0, &mut rng);
            let a1 = rng.gen_range(-1.0..1.0);
            let a2 = rng.gen_range(-1.0..1.0);
            let closed = virasoro_curvature_form(&x1, a1, &x2, a2);
            let generic = curvature_quadruple(
                InertiaSpec::h0(),
                Algebra::Virasoro,
                &CentralVec::new(x1.clone(), a1),
                &CentralVec::new(x2.clone(), a2),
                &CentralVec::new(x1.clone(), a1),
                &CentralVec::new(x2.clone(), a2),
            );
            assert!(
                (closed - generic).abs() < 1e-8 * (1.0 + closed.abs()),
                "closed {closed} vs generic {generic}"
            );
        }
    }

    #[test]
    fn virasoro_sin_cos_reference_value() {
        // The raw quadruple ⟨4R(X₁,X₂)X₁,X₂⟩₀ equals -π(8 + a₁² + a₂² − 3π).
        for (a1, a2) in [(0.0, 0.0), (0.5, -0.3), (1.0, 2.0)] {
            let reference = -PI * (8.0 + a1 * a1 + a2 * a2 - 3.0 * PI);
            let closed = virasoro_curvature_form(&sin_field(), a1, &cos_field(), a2);
            assert!(
                (closed - reference).abs() < 1e-9,
                "closed {closed} vs reference {reference}"
            );
        }
    }

    #[test]
    fn metric_compatibility_for_constant_fields() {
        // ⟨∇_X Y, Z⟩ + ⟨Y, ∇_X Z⟩ = 0 for grid-frozen fields (R_X term
        // drops), with ∇_X Y = ½ad(X)ᵀY + ½ad(Y)ᵀX − ½ad(X)Y.
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for spec in [InertiaSpec::h0(), InertiaSpec::hk(1)] {
            let x = rand_vec(&mut rng, true);
            let y = rand_vec(&mut rng, true);
            let z = rand_vec(&mut rng, true);
            let nabla = |a: &CentralVec, b: &CentralVec| {
                let t1 = ad_transpose(spec, a, b).scaled(0.5);
                let t2 = ad_transpose(spec, b, a).scaled(0.5);
                let t3 = bracket_in(Algebra::Virasoro, a, b).scaled(-0.5);
                &(&t1 + &t2) + &t3
            };
            let total = inner(spec, &nabla(&x, &y), &z) + inner(spec, &y, &nabla(&x, &z));
            assert!(total.abs() < 1e-9, "compatibility residual {total}");
        }
    }
}
