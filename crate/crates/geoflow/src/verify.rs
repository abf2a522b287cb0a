//! Deterministic property batteries: each suite measures the residuals of
//! the structural identities of one subsystem against pinned tolerances
//! and reports them as machine-readable rows. Given the same seed the
//! report is bit-identical.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curvature::{
    curvature_emb, curvature_emb_via_christoffel, curvature_pair, curvature_quadruple, sectional,
    virasoro_curvature_form,
};
use crate::diffeo::{bott_cocycle, Diffeo, VirasoroElement};
use crate::flow::{rhs, solve, ExitReason};
use crate::grid::{Field, Grid};
use crate::jacobi::{jacobi_rhs_burgers, solve_jacobi, symplectic_pairing};
use crate::metrics::{
    ad_transpose, alpha_op, bracket, bracket_field, gelfand_fuchs, inner, Algebra,
    CentralVec, InertiaSpec,
};
use crate::util::testing::{rand_small_displacement, rand_trig};
use crate::util::bump_field;
use crate::vanish::{
    length_bound, mollified_ramp, path_energy, time_samples, vanishing_demo, CompressionWave,
    PathSample, StartStopWave, WaveSpec,
};
use crate::Result;

/// Outcome of one measured property.
#[derive(Debug, Clone)]
pub struct PropertyResult {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl PropertyResult {
    fn new(name: impl Into<String>, residual: f64, tol: f64) -> Self {
        let name = name.into();
        PropertyResult {
            pass: residual.is_finite() && residual < tol,
            name,
            residual,
            tol,
        }
    }
}

/// The named suites exposed by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Algebra,
    Cocycles,
    Curvature,
    Conservation,
    Jacobi,
    Vanish,
    Convergence,
}

impl std::str::FromStr for Suite {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "algebra" => Suite::Algebra,
            "cocycles" => Suite::Cocycles,
            "curvature" => Suite::Curvature,
            "conservation" => Suite::Conservation,
            "jacobi" => Suite::Jacobi,
            "vanish" => Suite::Vanish,
            "convergence" => Suite::Convergence,
            other => {
                return Err(crate::Error::InvalidParameter(format!(
                    "unknown suite '{other}'"
                )))
            }
        })
    }
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Algebra,
        Suite::Cocycles,
        Suite::Curvature,
        Suite::Conservation,
        Suite::Jacobi,
        Suite::Vanish,
        Suite::Convergence,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Cocycles => "cocycles",
            Suite::Curvature => "curvature",
            Suite::Conservation => "conservation",
            Suite::Jacobi => "jacobi",
            Suite::Vanish => "vanish",
            Suite::Convergence => "convergence",
        }
    }
}

/// Runs one suite with CLI-scale parameters.
pub fn run_suite(suite: Suite, seed: u64) -> Result<Vec<PropertyResult>> {
    Ok(match suite {
        Suite::Algebra => algebra_suite(seed),
        Suite::Cocycles => cocycle_suite(seed, 30),
        Suite::Curvature => curvature_suite(seed, 40)?,
        Suite::Conservation => conservation_battery(256, 1e-3, 0.5)?,
        Suite::Jacobi => jacobi_suite(seed)?,
        Suite::Vanish => vanish_suite()?,
        Suite::Convergence => convergence_suite()?,
    })
}

fn grid128() -> Grid {
    Grid::standard(128).expect("128 is a valid grid size")
}

fn rand_vec(grid: Grid, rng: &mut ChaCha8Rng, central: bool) -> CentralVec {
    let a = if central { rng.gen_range(-1.0..1.0) } else { 0.0 };
    CentralVec::new(rand_trig(grid, 4, 1.0, rng), a)
}

/// Lie-algebra layer: bracket identities and metric-transpose identities.
pub fn algebra_suite(seed: u64) -> Vec<PropertyResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = grid128();
    let mut out = Vec::new();

    let mut jacobi_worst: f64 = 0.0;
    let mut adjoint_worst: f64 = 0.0;
    let mut sumdiff_worst: f64 = 0.0;
    let mut commutator_worst: f64 = 0.0;
    let mut alpha_homo_worst: f64 = 0.0;
    let specs = [
        InertiaSpec::h0(),
        InertiaSpec::hk(1),
        InertiaSpec::hk(2),
        InertiaSpec::ga(1.0).expect("A >= 0"),
    ];
    for _ in 0..20 {
        let x = rand_vec(g, &mut rng, true);
        let y = rand_vec(g, &mut rng, true);
        let z = rand_vec(g, &mut rng, true);
        let cyc = &(&bracket(&x, &bracket(&y, &z)) + &bracket(&y, &bracket(&z, &x)))
            + &bracket(&z, &bracket(&x, &y));
        jacobi_worst = jacobi_worst.max(cyc.sup_norm());

        for spec in specs {
            let lhs = inner(spec, &bracket(&x, &y), &z);
            let rhs_v = inner(spec, &y, &ad_transpose(spec, &x, &z));
            adjoint_worst = adjoint_worst.max((lhs - rhs_v).abs());
        }

        // H0 operator identities on the field parts.
        let h0 = InertiaSpec::h0();
        let (xf, zf) = (&x.x, &z.x);
        let adt = ad_transpose(h0, &CentralVec::field(xf.clone()), &CentralVec::field(zf.clone()));
        let ad = bracket_field(xf, zf);
        let sum = &adt.x + &ad;
        let diff = &adt.x - &ad;
        let want_sum = &(&xf.deriv(1) * zf) * 3.0;
        let want_diff = &(&xf.deriv(1) * zf) + &(&(xf * &zf.deriv(1)) * 2.0);
        sumdiff_worst = sumdiff_worst
            .max((&sum - &want_sum).sup_norm())
            .max((&diff - &want_diff).sup_norm());

        let xy = ad_transpose(h0, &x, &ad_transpose(h0, &y, &z));
        let yx = ad_transpose(h0, &y, &ad_transpose(h0, &x, &z));
        let comm = &(&xy - &yx).x - &ad_transpose(h0, &bracket(&x, &y), &z).scaled(-1.0).x;
        commutator_worst = commutator_worst.max(comm.sup_norm());

        // Plain vector-field statement: strip central components.
        let half_alpha = |v: &CentralVec, w: &CentralVec| alpha_op(h0, v, w).scaled(-0.5);
        let xf2 = CentralVec::field(x.x.clone());
        let yf2 = CentralVec::field(y.x.clone());
        let zf2 = CentralVec::field(z.x.clone());
        let xy_f = CentralVec::field(bracket_field(&x.x, &y.x));
        let lhs = half_alpha(&xy_f, &zf2);
        let rhs_v =
            &half_alpha(&xf2, &half_alpha(&yf2, &zf2)) - &half_alpha(&yf2, &half_alpha(&xf2, &zf2));
        alpha_homo_worst = alpha_homo_worst.max((&lhs.x - &rhs_v.x).sup_norm());
    }
    out.push(PropertyResult::new("bracket-jacobi-identity", jacobi_worst, 1e-10));
    out.push(PropertyResult::new("ad-transpose-adjointness", adjoint_worst, 1e-9));
    out.push(PropertyResult::new("h0-sum-difference-identities", sumdiff_worst, 1e-10));
    out.push(PropertyResult::new(
        "transpose-commutator-bracket",
        commutator_worst,
        1e-8,
    ));
    out.push(PropertyResult::new(
        "minus-half-alpha-homomorphism",
        alpha_homo_worst,
        1e-8,
    ));

    // Positive definiteness on nonzero inputs.
    let mut posdef_ok = f64::INFINITY;
    for spec in specs {
        for _ in 0..5 {
            let v = rand_vec(g, &mut rng, true);
            posdef_ok = posdef_ok.min(inner(spec, &v, &v));
        }
    }
    out.push(PropertyResult::new(
        "inner-positive-definite (min value, pass if > 0)",
        if posdef_ok > 0.0 { 0.0 } else { 1.0 },
        0.5,
    ));
    out
}

/// Bott and Gelfand-Fuchs cocycle identities over random triples.
pub fn cocycle_suite(seed: u64, trials: usize) -> Vec<PropertyResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = Grid::standard(256).expect("valid grid");
    let mut bott_worst: f64 = 0.0;
    let mut gf_worst: f64 = 0.0;
    let mut degenerate_worst: f64 = 0.0;
    let mut schwarzian_worst: f64 = 0.0;
    let mut adjoint_worst: f64 = 0.0;
    for _ in 0..trials {
        let p1 = Diffeo::new(rand_small_displacement(g, 4, 0.08, &mut rng)).expect("small disp");
        let p2 = Diffeo::new(rand_small_displacement(g, 4, 0.08, &mut rng)).expect("small disp");
        let p3 = Diffeo::new(rand_small_displacement(g, 4, 0.08, &mut rng)).expect("small disp");
        let res = bott_cocycle(&p2, &p3).expect("cocycle")
            - bott_cocycle(&p1.compose(&p2).expect("compose"), &p3).expect("cocycle")
            + bott_cocycle(&p1, &p2.compose(&p3).expect("compose")).expect("cocycle")
            - bott_cocycle(&p1, &p2).expect("cocycle");
        bott_worst = bott_worst.max(res.abs());

        let x = rand_trig(g, 5, 1.0, &mut rng);
        let y = rand_trig(g, 5, 1.0, &mut rng);
        let z = rand_trig(g, 5, 1.0, &mut rng);
        let cyc = gelfand_fuchs(&bracket_field(&x, &y), &z)
            + gelfand_fuchs(&bracket_field(&y, &z), &x)
            + gelfand_fuchs(&bracket_field(&z, &x), &y);
        gf_worst = gf_worst.max(cyc.abs());

        let inv = p1.invert().expect("invert");
        degenerate_worst = degenerate_worst
            .max(bott_cocycle(&p1, &inv).expect("cocycle").abs())
            .max(bott_cocycle(&Diffeo::identity(g), &p2).expect("cocycle").abs());

        // Schwarzian composition law.
        let comp = p1.compose(&p2).expect("compose");
        let lhs = comp.schwarzian();
        let s1 = crate::grid::Interpolant::new(&p1.schwarzian());
        let slope2 = p2.slope();
        let vals: Vec<f64> = (0..g.n())
            .map(|j| s1.eval(g.node(j) + p2.disp().values()[j]) * slope2.values()[j].powi(2))
            .collect();
        let rhs_f = &Field::from_values(g, vals).expect("finite") + &p2.schwarzian();
        schwarzian_worst = schwarzian_worst.max((&lhs - &rhs_f).sup_norm());

        // Adjoint action is a homomorphism for this composition order.
        let ga = VirasoroElement::new(p1.clone(), 0.3);
        let hb = VirasoroElement::new(p2.clone(), -0.6);
        let v = CentralVec::new(rand_trig(g, 4, 0.5, &mut rng), 0.4);
        let lhs = ga.mul(&hb).expect("mul").adjoint(&v).expect("adjoint");
        let rhs_v = ga.adjoint(&hb.adjoint(&v).expect("adjoint")).expect("adjoint");
        adjoint_worst = adjoint_worst
            .max((&lhs.x - &rhs_v.x).sup_norm())
            .max((lhs.a - rhs_v.a).abs());
    }
    vec![
        PropertyResult::new("bott-cocycle-identity", bott_worst, 1e-8),
        PropertyResult::new("bott-degenerate-values", degenerate_worst, 1e-8),
        PropertyResult::new("gelfand-fuchs-cocycle-condition", gf_worst, 1e-8),
        PropertyResult::new("schwarzian-composition-law", schwarzian_worst, 1e-7),
        PropertyResult::new("virasoro-adjoint-homomorphism", adjoint_worst, 1e-7),
    ]
}

/// Curvature identities: internal cross-checks plus reference constants.
pub fn curvature_suite(seed: u64, trials: usize) -> Result<Vec<PropertyResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = grid128();
    let h0 = InertiaSpec::h0();
    let mut out = Vec::new();

    let mut pair_worst: f64 = 0.0;
    let mut bianchi_worst: f64 = 0.0;
    let mut alpha_route_worst: f64 = 0.0;
    let mut vira_worst: f64 = 0.0;
    let mut nonneg_min = f64::INFINITY;
    for _ in 0..trials {
        let x = rand_vec(g, &mut rng, true);
        let y = rand_vec(g, &mut rng, true);
        let z = rand_vec(g, &mut rng, true);
        let u = rand_vec(g, &mut rng, true);
        let q = curvature_quadruple(h0, Algebra::Virasoro, &x, &y, &x, &y);
        let p = curvature_pair(h0, Algebra::Virasoro, &x, &y);
        pair_worst = pair_worst.max((q - p).abs() / (1.0 + q.abs()));

        let b = curvature_quadruple(h0, Algebra::Virasoro, &x, &y, &z, &u)
            + curvature_quadruple(h0, Algebra::Virasoro, &y, &z, &x, &u)
            + curvature_quadruple(h0, Algebra::Virasoro, &z, &x, &y, &u);
        bianchi_worst = bianchi_worst.max(b.abs());

        let xf = CentralVec::field(x.x.clone());
        let yf = CentralVec::field(y.x.clone());
        let zf = CentralVec::field(z.x.clone());
        let uf = CentralVec::field(u.x.clone());
        let generic = curvature_quadruple(h0, Algebra::Diff, &xf, &yf, &zf, &uf) / 4.0;
        let xy = CentralVec::field(bracket_field(&x.x, &y.x));
        let direct = inner(h0, &alpha_op(h0, &xy, &zf).scaled(-1.0), &uf);
        alpha_route_worst = alpha_route_worst.max((generic - direct).abs());

        let closed = virasoro_curvature_form(&x.x, x.a, &y.x, y.a);
        let quad = curvature_quadruple(h0, Algebra::Virasoro, &x, &y, &x, &y);
        vira_worst = vira_worst.max((closed - quad).abs() / (1.0 + closed.abs()));

        if let Ok(k) = sectional(h0, Algebra::Diff, &xf, &yf) {
            nonneg_min = nonneg_min.min(k);
        }
    }
    out.push(PropertyResult::new("pair-form-vs-quadruple", pair_worst, 1e-8));
    out.push(PropertyResult::new("first-bianchi-cyclic-sum", bianchi_worst, 1e-8));
    out.push(PropertyResult::new(
        "burgers-curvature-is-minus-alpha-bracket",
        alpha_route_worst,
        1e-8,
    ));
    out.push(PropertyResult::new(
        "virasoro-closed-form-vs-generic",
        vira_worst,
        1e-8,
    ));
    out.push(PropertyResult::new(
        "burgers-sectional-nonnegative (min)",
        (-nonneg_min).max(0.0),
        1e-12,
    ));

    let sin = CentralVec::field(Field::from_fn(g, f64::sin));
    let cos = CentralVec::field(Field::from_fn(g, f64::cos));
    let k = sectional(h0, Algebra::Diff, &sin, &cos)?;
    out.push(PropertyResult::new(
        "burgers-sectional-sin-cos-2-over-pi",
        (k - 2.0 / std::f64::consts::PI).abs(),
        1e-10,
    ));

    // Emb(ℝ,ℝ) closed form vs finite-difference Christoffel expansion.
    let mut emb_worst: f64 = 0.0;
    for _ in 0..10 {
        let f = Diffeo::new(rand_small_displacement(g, 4, 0.2, &mut rng)).expect("small disp");
        let h = rand_trig(g, 4, 1.0, &mut rng);
        let k = rand_trig(g, 4, 1.0, &mut rng);
        let l = rand_trig(g, 4, 1.0, &mut rng);
        let closed = curvature_emb(&f, &h, &k, &l);
        let expanded = curvature_emb_via_christoffel(&f, &h, &k, &l, 1e-5)?;
        emb_worst = emb_worst.max((&closed - &expanded).sup_norm());
    }
    out.push(PropertyResult::new(
        "emb-curvature-vs-christoffel-fd",
        emb_worst,
        1e-6,
    ));
    Ok(out)
}

/// Momentum and energy conservation across the metric families.
///
/// Runs every `(family, a)` pair on its own worker thread; results are
/// reported in a fixed order regardless of scheduling.
pub fn conservation_battery(n: usize, dt: f64, t_end: f64) -> Result<Vec<PropertyResult>> {
    let grid = Grid::standard(n)?;
    let u0 = Field::from_fn(grid, |x| 0.1 * x.sin());
    let specs: Vec<(InertiaSpec, f64)> = [
        InertiaSpec::h0(),
        InertiaSpec::hk(1),
        InertiaSpec::hk(2),
        InertiaSpec::ga(1.0)?,
    ]
    .into_iter()
    .flat_map(|s| [(s, 0.0), (s, 0.5)])
    .collect();

    let results: Vec<Result<(String, f64, f64)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = specs
            .iter()
            .map(|&(spec, a)| {
                let u0 = &u0;
                scope.spawn(move || -> Result<(String, f64, f64)> {
                    let traj = solve(spec, u0, a, t_end, dt)?;
                    if traj.exit != ExitReason::Completed {
                        return Err(crate::Error::ShockDetected {
                            t: traj.last().t,
                            min_slope: f64::NAN,
                        });
                    }
                    Ok((
                        format!("{} a={a}", spec.name()),
                        traj.momentum_drift(),
                        traj.energy_drift(),
                    ))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("conservation worker panicked"))
            .collect()
    });

    let mut out = Vec::new();
    for r in results {
        let (label, mdrift, edrift) = r?;
        out.push(PropertyResult::new(
            format!("momentum-drift {label}"),
            mdrift,
            1e-5,
        ));
        out.push(PropertyResult::new(
            format!("energy-drift {label}"),
            edrift,
            1e-6,
        ));
    }
    Ok(out)
}

/// Jacobi machinery: time-translation residual, linearization, pairing
/// conservation and the B1 constant.
pub fn jacobi_suite(seed: u64) -> Result<Vec<PropertyResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = Grid::standard(256)?;
    let spec = InertiaSpec::h0();
    let u0 = Field::from_fn(g, |x| 0.2 * x.sin());
    let mut out = Vec::new();

    // (a) time-translation field solves the second-order equation.
    let traj = solve(spec, &u0, 0.0, 1.0, 1e-3)?;
    let mut tt_worst: f64 = 0.0;
    for i in (2..traj.states.len() - 2).step_by(111) {
        let s = &traj.states[i];
        let ut = |k: usize| rhs(spec, &traj.states[k].u, 0.0);
        // Fourth-order centered difference of u_t gives y_tt for y = u.
        let ytt = &(&(&(&ut(i - 2) - &(&ut(i - 1) * 8.0)) + &(&ut(i + 1) * 8.0)) - &ut(i + 2))
            * (1.0 / (12.0 * traj.dt));
        let want = jacobi_rhs_burgers(&s.u, &s.u, &ut(i));
        tt_worst = tt_worst.max((&ytt - &want).sup_norm());
    }
    out.push(PropertyResult::new(
        "time-translation-jacobi-residual",
        tt_worst,
        1e-6,
    ));

    // (b) two-geodesic linearization at ε = 1e-4.
    let p = rand_trig(g, 3, 1.0, &mut rng);
    let zero = Field::zeros(g);
    let js = solve_jacobi(&traj, &zero, &p, 0.0, 0.0)?;
    let eps = 1e-4;
    let traj_eps = solve(spec, &(&u0 + &(&p * eps)), 0.0, 1.0, 1e-3)?;
    let mut lin_worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for ((j, s), se) in js.iter().zip(&traj.states).zip(&traj_eps.states) {
        let fd = &(&se.u - &s.u) * (1.0 / eps);
        let q = &j.yt - &bracket_field(&s.u, &j.y);
        lin_worst = lin_worst.max((&fd - &q).sup_norm());
        scale = scale.max(q.sup_norm());
    }
    out.push(PropertyResult::new(
        "two-geodesic-linearization (O(eps) at 1e-4)",
        lin_worst / scale.max(1.0),
        5e-3,
    ));

    // (c) symplectic pairing conservation on Burgers and KdV.
    for a in [0.0, 0.5] {
        let traj = solve(spec, &Field::from_fn(g, |x| 0.15 * x.sin()), a, 1.0, 1e-3)?;
        let y0 = rand_trig(g, 3, 1.0, &mut rng);
        let yt0 = rand_trig(g, 3, 1.0, &mut rng);
        let z0 = rand_trig(g, 3, 1.0, &mut rng);
        let zt0 = rand_trig(g, 3, 1.0, &mut rng);
        let js = solve_jacobi(&traj, &y0, &yt0, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))?;
        let ks = solve_jacobi(&traj, &z0, &zt0, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))?;
        let p0 = symplectic_pairing(&traj.states[0].u, a, &js[0], &ks[0]);
        let scale = p0.abs().max(1e-6);
        let mut drift: f64 = 0.0;
        let mut b1_worst: f64 = 0.0;
        for ((j, k), s) in js.iter().zip(&ks).zip(&traj.states) {
            drift = drift.max((symplectic_pairing(&s.u, a, j, k) - p0).abs() / scale);
            b1_worst = b1_worst.max(j.b1_residual(&s.u).abs());
        }
        out.push(PropertyResult::new(
            format!("symplectic-pairing-drift a={a}"),
            drift,
            1e-4,
        ));
        out.push(PropertyResult::new(
            format!("b1-constancy a={a}"),
            b1_worst,
            1e-5,
        ));
    }
    Ok(out)
}

/// Compression-wave bounds and endpoint checks.
pub fn vanish_suite() -> Result<Vec<PropertyResult>> {
    let mut out = Vec::new();

    // Ramp structure.
    let ramp = mollified_ramp(0.1, 64)?;
    let mut df_excess: f64 = 0.0;
    for i in 0..=400 {
        let z = -0.3 + 1.8 * i as f64 / 400.0;
        df_excess = df_excess.max(ramp.df(z) - 1.0).max(-ramp.df(z));
    }
    out.push(PropertyResult::new("ramp-derivative-in-unit-interval", df_excess, 1e-10));

    // Basic-wave energy bound for the swept widths.
    for eps in [0.2, 0.1, 0.05] {
        let spec = WaveSpec::new(eps, 8.0, 4096)?;
        let wave = CompressionWave::new(spec)?;
        let (t0, t1) = (1.6, 2.6);
        let n_t = time_samples(t1 - t0, eps);
        let path = PathSample::from_fn(t0, t1, n_t, |t| wave.map(t))?;
        let e = path_energy(&path)?;
        let bound = wave.energy_bound(t0, t1);
        out.push(PropertyResult::new(
            format!("basic-wave-energy-over-bound eps={eps}"),
            e / bound,
            1.02,
        ));
    }

    // Length bounds decrease along the sweep for a fixed target.
    let template = WaveSpec::new(0.1, 8.0, 4096)?;
    let g = template.grid()?;
    let target = bump_field(g, 8.0, 1.5, 0.5);
    let rows = vanishing_demo(&template, &target, &[0.2, 0.1, 0.05])?;
    let mut monotone = 0.0;
    for w in rows.windows(2) {
        if w[1].length_bound >= w[0].length_bound {
            monotone = 1.0;
        }
    }
    out.push(PropertyResult::new(
        "vanishing-demo-bounds-strictly-decrease",
        monotone,
        0.5,
    ));

    // Start/stop endpoint correctness at a mid-sweep width.
    let spec = WaveSpec::new(0.02, 8.0, 16384)?;
    let g = spec.grid()?;
    let target = bump_field(g, 8.0, 1.5, 0.5);
    let wave = StartStopWave::new(spec, &target)?;
    let (t0, t1) = wave.window();
    let before = wave.map(t0)?;
    let after = wave.map(t1)?;
    out.push(PropertyResult::new(
        "start-stop-identity-at-entry",
        before.disp().sup_norm(),
        1e-12,
    ));
    out.push(PropertyResult::new(
        "start-stop-endpoint-error eps=0.02",
        (after.disp() - &target).sup_norm(),
        5e-3,
    ));

    // Length-energy inequality on a sampled wave path.
    let spec = WaveSpec::new(0.1, 8.0, 4096)?;
    let wave = CompressionWave::new(spec)?;
    let path = PathSample::from_fn(1.6, 2.6, 96, |t| wave.map(t))?;
    let e = path_energy(&path)?;
    let l = crate::vanish::path_length(&path)?;
    out.push(PropertyResult::new(
        "length-squared-vs-energy-ratio",
        l * l / (e * path.duration()),
        1.0 + 1e-12,
    ));
    let _ = length_bound(e, path.duration());
    Ok(out)
}

/// RK4 self-convergence orders for Burgers, Camassa-Holm and KdV.
pub fn convergence_suite() -> Result<Vec<PropertyResult>> {
    let g = Grid::standard(128)?;
    let u0 = Field::from_fn(g, |x| 0.2 * x.sin());
    let mut out = Vec::new();
    for (name, spec, a) in [
        ("burgers", InertiaSpec::h0(), 0.0),
        ("camassa-holm", InertiaSpec::hk(1), 0.0),
        ("kdv", InertiaSpec::h0(), 0.5),
    ] {
        let run = |dt: f64| -> Result<Field> {
            Ok(solve(spec, &u0, a, 0.4, dt)?.last().u.clone())
        };
        let c = run(0.02)?;
        let m = run(0.01)?;
        let f = run(0.005)?;
        let order = ((&c - &m).sup_norm() / (&m - &f).sup_norm()).log2();
        out.push(PropertyResult::new(
            format!("rk4-order-{name} (|order-4|)"),
            (order - 4.0).abs(),
            0.5,
        ));
    }
    Ok(out)
}
