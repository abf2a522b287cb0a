//! Inertia operators and the Lie-algebra layer of the Virasoro algebra:
//! inner products, bracket, Gelfand-Fuchs cocycle and the metric
//! transpose `ad(X)ᵀ` for every metric family.
//!
//! Plain vector-field algebra elements are represented as [`CentralVec`]
//! with zero central component; all central arithmetic then degenerates
//! correctly. The bracket convention is `[X, Y] = X'Y - XY'`.

use crate::grid::{Field, Grid, MultiplierSpec};
use crate::{Error, Result};

const DEALIAS: f64 = 2.0 / 3.0;

/// Metric family on the diffeomorphism group.
///
/// * `Hk(k)` - Sobolev inertia operator with symbol `Σ_{i<=k} ξ^{2i}`.
/// * `Ga(A)` - the `G^A` operator `1 - A ∂_x²` with symbol `1 + A ξ²`;
///   `Ga(1)` coincides with `Hk(1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InertiaFamily {
    Hk(u32),
    Ga(f64),
}

/// Inertia operator of a right-invariant metric, realized as a positive
/// Fourier multiplier family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertiaSpec {
    family: InertiaFamily,
}

impl InertiaSpec {
    pub fn hk(k: u32) -> Self {
        InertiaSpec {
            family: InertiaFamily::Hk(k),
        }
    }

    pub fn ga(a: f64) -> Result<Self> {
        if !(a.is_finite() && a >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "G^A weight must be finite and >= 0, got {a}"
            )));
        }
        Ok(InertiaSpec {
            family: InertiaFamily::Ga(a),
        })
    }

    pub fn h0() -> Self {
        Self::hk(0)
    }

    pub fn family(&self) -> InertiaFamily {
        self.family
    }

    pub fn name(&self) -> String {
        match self.family {
            InertiaFamily::Hk(k) => format!("h{k}"),
            InertiaFamily::Ga(a) => format!("ga{a}"),
        }
    }

    /// Whether the operator is the identity (the `H^0` case).
    pub fn is_identity(&self) -> bool {
        matches!(self.family, InertiaFamily::Hk(0)) || matches!(self.family, InertiaFamily::Ga(a) if a == 0.0)
    }

    /// Symbol value at physical wavenumber `xi`; strictly positive.
    pub fn symbol(&self, xi: f64) -> f64 {
        match self.family {
            InertiaFamily::Hk(k) => {
                let x2 = xi * xi;
                let mut acc = 1.0;
                let mut pow = 1.0;
                for _ in 0..k {
                    pow *= x2;
                    acc += pow;
                }
                acc
            }
            InertiaFamily::Ga(a) => 1.0 + a * xi * xi,
        }
    }

    /// Multiplier of the operator on the given grid.
    pub fn multiplier(&self, grid: Grid) -> MultiplierSpec {
        MultiplierSpec::from_symbol(grid, |m| self.symbol(grid.wavenumber(m)))
    }

    /// Multiplier of the inverse operator (always defined: the symbol is
    /// bounded below by 1).
    pub fn inverse_multiplier(&self, grid: Grid) -> MultiplierSpec {
        self.multiplier(grid)
            .inverse()
            .expect("inertia symbol is strictly positive")
    }

    pub fn apply(&self, f: &Field) -> Field {
        if self.is_identity() {
            f.clone()
        } else {
            f.apply_multiplier(&self.multiplier(f.grid()))
        }
    }

    pub fn apply_inverse(&self, f: &Field) -> Field {
        if self.is_identity() {
            f.clone()
        } else {
            f.apply_multiplier(&self.inverse_multiplier(f.grid()))
        }
    }
}

/// Element of the Virasoro algebra: a vector field plus a central scalar.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralVec {
    pub x: Field,
    pub a: f64,
}

impl CentralVec {
    pub fn new(x: Field, a: f64) -> Self {
        CentralVec { x, a }
    }

    /// Plain vector-field element (zero central component).
    pub fn field(x: Field) -> Self {
        CentralVec { x, a: 0.0 }
    }

    pub fn zero(grid: Grid) -> Self {
        CentralVec {
            x: Field::zeros(grid),
            a: 0.0,
        }
    }

    pub fn grid(&self) -> Grid {
        self.x.grid()
    }

    pub fn sup_norm(&self) -> f64 {
        self.x.sup_norm().max(self.a.abs())
    }

    pub fn scaled(&self, c: f64) -> CentralVec {
        CentralVec {
            x: &self.x * c,
            a: self.a * c,
        }
    }
}

impl std::ops::Add<&CentralVec> for &CentralVec {
    type Output = CentralVec;
    fn add(self, rhs: &CentralVec) -> CentralVec {
        CentralVec {
            x: &self.x + &rhs.x,
            a: self.a + rhs.a,
        }
    }
}

impl std::ops::Sub<&CentralVec> for &CentralVec {
    type Output = CentralVec;
    fn sub(self, rhs: &CentralVec) -> CentralVec {
        CentralVec {
            x: &self.x - &rhs.x,
            a: self.a - rhs.a,
        }
    }
}

/// Gelfand-Fuchs Lie-algebra cocycle `ω(X, Y) = ∫ X' Y'' dx`.
pub fn gelfand_fuchs(x: &Field, y: &Field) -> f64 {
    (&x.deriv(1) * &y.deriv(2)).quad()
}

/// Which Lie algebra the computation lives in: the plain vector-field
/// algebra of `Diff(S¹)` or its Virasoro central extension.
///
/// The distinction matters even for inputs with zero central component:
/// the Virasoro bracket feeds the Gelfand-Fuchs cocycle into central
/// slots, which changes curvature and Jacobi assemblies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algebra {
    Diff,
    Virasoro,
}

/// Bracket in the chosen algebra; `Diff` keeps the central part zero.
pub fn bracket_in(algebra: Algebra, v: &CentralVec, w: &CentralVec) -> CentralVec {
    match algebra {
        Algebra::Virasoro => bracket(v, w),
        Algebra::Diff => CentralVec::field(bracket_field(&v.x, &w.x)),
    }
}

/// Inner product `⟨(X,a),(Y,b)⟩ = ∫ X·A(Y) dx + a·b` of the metric family.
pub fn inner(spec: InertiaSpec, v: &CentralVec, w: &CentralVec) -> f64 {
    (&v.x * &spec.apply(&w.x)).quad() + v.a * w.a
}

/// Virasoro bracket `[(X,a),(Y,b)] = (X'Y - XY', ω(X,Y))`.
pub fn bracket(v: &CentralVec, w: &CentralVec) -> CentralVec {
    CentralVec {
        x: bracket_field(&v.x, &w.x),
        a: gelfand_fuchs(&v.x, &w.x),
    }
}

/// Field part of the bracket: `X'Y - XY'`.
pub fn bracket_field(x: &Field, y: &Field) -> Field {
    &(&x.deriv(1) * y) - &(x * &y.deriv(1))
}

/// Metric transpose of the adjoint action:
/// `ad(X,a)ᵀ(Z,c) = (A⁻¹(2X'·A(Z) + X·A(Z') + c·X'''), 0)`.
///
/// Quadratic products are dealiased by the 2/3 rule before the inverse
/// multiplier is applied.
pub fn ad_transpose(spec: InertiaSpec, v: &CentralVec, w: &CentralVec) -> CentralVec {
    let x = &v.x;
    let az = spec.apply(&w.x);
    let azp = spec.apply(&w.x.deriv(1));
    let mut num = &(&(&x.deriv(1) * &az) * 2.0) + &(x * &azp);
    if w.a != 0.0 {
        num = &num + &(&x.deriv(3) * w.a);
    }
    CentralVec {
        x: spec.apply_inverse(&num.dealias(DEALIAS)),
        a: 0.0,
    }
}

/// The operator `α(ξ)η := ad(η)ᵀ ξ` used by the covariant derivative and
/// the Jacobi equation.
pub fn alpha_op(spec: InertiaSpec, v: &CentralVec, w: &CentralVec) -> CentralVec {
    ad_transpose(spec, w, v)
}
