//! Subcommand implementations: each writes CSV artifacts plus a JSON
//! sidecar into its run directory and returns a process exit code.

use std::fs;
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use geoflow::curvature::{
    curvature_emb, curvature_emb_via_christoffel, curvature_quadruple, sectional,
    virasoro_curvature_form,
};
use geoflow::diffeo::Diffeo;
use geoflow::flow::{shock_time, solve, ExitReason};
use geoflow::grid::Field;
use geoflow::jacobi::{solve_jacobi, symplectic_pairing};
use geoflow::metrics::{inner, Algebra, CentralVec, InertiaSpec};
use geoflow::util::testing::{rand_small_displacement, rand_trig};
use geoflow::vanish::{linear_path_energy, vanishing_demo, WaveSpec};
use geoflow::verify::{run_suite, Suite};
use geoflow::{Error, Result};

use crate::config::{parse_profile, RunConfig};

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)
        .map_err(|e| Error::InvalidParameter(format!("cannot create {dir:?}: {e}")))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::InvalidParameter(format!("cannot write {path:?}: {e}")))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidParameter(format!("serialization failed: {e}")))?;
    text.push('\n');
    write_text(path, &text)
}

#[derive(Serialize)]
struct SolveSidecar {
    spec: String,
    n: usize,
    dt: f64,
    #[serde(rename = "T")]
    t_end: f64,
    a: f64,
    momentum_drift: f64,
    energy_drift: f64,
    shock_time: Option<f64>,
    exit_reason: String,
}

/// `geoflow solve`: integrate one geodesic, write the trajectory CSV and
/// the JSON sidecar. Exit code 2 when the horizon was cut by a shock.
pub fn cmd_solve(cfg: &RunConfig, out: &Path, stride: usize) -> Result<i32> {
    ensure_dir(out)?;
    write_text(&out.join("config.kv"), &cfg.to_kv())?;
    let spec = cfg.inertia()?;
    let grid = cfg.grid()?;
    let u0 = cfg.initial_condition(grid)?;
    let traj = solve(spec, &u0, cfg.a, cfg.t_end, cfg.dt)?;

    let stride = stride.max(1);
    let mut csv = String::from("t");
    for j in 0..grid.n() {
        csv.push_str(&format!(",u_{j}"));
    }
    csv.push('\n');
    for (i, s) in traj.states.iter().enumerate() {
        if i % stride != 0 && i != traj.states.len() - 1 {
            continue;
        }
        csv.push_str(&format!("{}", s.t));
        for v in s.u.values() {
            csv.push_str(&format!(",{v}"));
        }
        csv.push('\n');
    }
    write_text(&out.join("trajectory.csv"), &csv)?;

    let ts = if spec.is_identity() && cfg.a == 0.0 {
        let t = shock_time(&u0);
        t.is_finite().then_some(t)
    } else {
        None
    };
    let exit_reason = match &traj.exit {
        ExitReason::Completed => "completed".to_string(),
        ExitReason::Shock { t, detail } => format!("shock at t≈{t:.4}: {detail}"),
    };
    let sidecar = SolveSidecar {
        spec: spec.name(),
        n: grid.n(),
        dt: cfg.dt,
        t_end: cfg.t_end,
        a: cfg.a,
        momentum_drift: traj.momentum_drift(),
        energy_drift: traj.energy_drift(),
        shock_time: ts,
        exit_reason,
    };
    write_json(&out.join("run.json"), &sidecar)?;

    println!(
        "solve {}: {} states, momentum drift {:.3e}, energy drift {:.3e}",
        spec.name(),
        traj.states.len(),
        sidecar.momentum_drift,
        sidecar.energy_drift
    );
    Ok(match traj.exit {
        ExitReason::Completed => 0,
        ExitReason::Shock { .. } => 2,
    })
}

#[derive(Serialize)]
struct JacobiSidecar {
    spec: String,
    n: usize,
    dt: f64,
    #[serde(rename = "T")]
    t_end: f64,
    a: f64,
    pairing_drift: f64,
    b1_residual_max: f64,
    exit_reason: String,
}

/// `geoflow jacobi`: integrate two seeded Jacobi fields along the
/// configured geodesic; write (t, pairing, B1 residual, sup|y|) rows.
pub fn cmd_jacobi(cfg: &RunConfig, out: &Path) -> Result<i32> {
    ensure_dir(out)?;
    write_text(&out.join("config.kv"), &cfg.to_kv())?;
    let spec = cfg.inertia()?;
    let grid = cfg.grid()?;
    let u0 = cfg.initial_condition(grid)?;
    let traj = solve(spec, &u0, cfg.a, cfg.t_end, cfg.dt)?;
    if traj.exit != ExitReason::Completed {
        return Err(Error::InvalidParameter(
            "geodesic hit a shock before the horizon; shorten T".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mk = |rng: &mut ChaCha8Rng| {
        (
            rand_trig(grid, 3, 1.0, rng),
            rand_trig(grid, 3, 1.0, rng),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        )
    };
    let (y0, yt0, b0, bt0) = mk(&mut rng);
    let (z0, zt0, c0, ct0) = mk(&mut rng);
    let js = solve_jacobi(&traj, &y0, &yt0, b0, bt0)?;
    let ks = solve_jacobi(&traj, &z0, &zt0, c0, ct0)?;

    let p0 = symplectic_pairing(&traj.states[0].u, cfg.a, &js[0], &ks[0]);
    let scale = p0.abs().max(1e-6);
    let mut csv = String::from("t,pairing,b1_residual,y_sup\n");
    let mut drift: f64 = 0.0;
    let mut b1_worst: f64 = 0.0;
    for ((j, k), s) in js.iter().zip(&ks).zip(&traj.states) {
        let p = symplectic_pairing(&s.u, cfg.a, j, k);
        let b1r = j.b1_residual(&s.u);
        drift = drift.max((p - p0).abs() / scale);
        b1_worst = b1_worst.max(b1r.abs());
        csv.push_str(&format!("{},{},{},{}\n", j.t, p, b1r, j.y.sup_norm()));
    }
    write_text(&out.join("jacobi.csv"), &csv)?;
    write_json(
        &out.join("run.json"),
        &JacobiSidecar {
            spec: spec.name(),
            n: grid.n(),
            dt: cfg.dt,
            t_end: cfg.t_end,
            a: cfg.a,
            pairing_drift: drift,
            b1_residual_max: b1_worst,
            exit_reason: "completed".into(),
        },
    )?;
    println!("jacobi: pairing drift {drift:.3e}, B1 residual {b1_worst:.3e}");
    Ok(0)
}

/// `geoflow curvature`: emit dual-evaluation tables (generic vs closed
/// form, with the documented reference value where one exists).
pub fn cmd_curvature(case: &str, a1: f64, a2: f64, count: usize, seed: u64, out: &Path) -> Result<i32> {
    ensure_dir(out)?;
    let grid = geoflow::grid::Grid::standard(128)?;
    let h0 = InertiaSpec::h0();
    let mut csv = String::new();
    match case {
        "virasoro-sincos" => {
            csv.push_str("case,a1,a2,generic_quadruple,closed_form,discrepancy,reference,raw_matches_reference\n");
            let sin = Field::from_fn(grid, f64::sin);
            let cos = Field::from_fn(grid, f64::cos);
            let v1 = CentralVec::new(sin.clone(), a1);
            let v2 = CentralVec::new(cos.clone(), a2);
            let generic = curvature_quadruple(h0, Algebra::Virasoro, &v1, &v2, &v1, &v2);
            let closed = virasoro_curvature_form(&sin, a1, &cos, a2);
            let reference = -std::f64::consts::PI
                * (8.0 + a1 * a1 + a2 * a2 - 3.0 * std::f64::consts::PI);
            let matches = (generic - reference).abs() < 1e-8;
            csv.push_str(&format!(
                "virasoro-sincos,{a1},{a2},{generic},{closed},{},{reference},{matches}\n",
                (generic - closed).abs()
            ));
            println!(
                "virasoro-sincos: generic {generic:.9}, closed {closed:.9}, reference {reference:.9}"
            );
        }
        "burgers-random" => {
            csv.push_str("index,sectional,gram,quadruple\n");
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut written = 0;
            while written < count {
                let x = CentralVec::field(rand_trig(grid, 5, 1.0, &mut rng));
                let y = CentralVec::field(rand_trig(grid, 5, 1.0, &mut rng));
                if let Ok(k) = sectional(h0, Algebra::Diff, &x, &y) {
                    let q = curvature_quadruple(h0, Algebra::Diff, &x, &y, &x, &y);
                    let gram = inner(h0, &x, &x) * inner(h0, &y, &y) - inner(h0, &x, &y).powi(2);
                    csv.push_str(&format!("{written},{k},{gram},{q}\n"));
                    written += 1;
                }
            }
            println!("burgers-random: {count} sectional curvatures written");
        }
        "emb-random" => {
            csv.push_str("index,closed_sup,expanded_sup,discrepancy_sup\n");
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in 0..count {
                let f = Diffeo::new(rand_small_displacement(grid, 4, 0.2, &mut rng))?;
                let h = rand_trig(grid, 4, 1.0, &mut rng);
                let k = rand_trig(grid, 4, 1.0, &mut rng);
                let l = rand_trig(grid, 4, 1.0, &mut rng);
                let closed = curvature_emb(&f, &h, &k, &l);
                let expanded = curvature_emb_via_christoffel(&f, &h, &k, &l, 1e-5)?;
                csv.push_str(&format!(
                    "{i},{},{},{}\n",
                    closed.sup_norm(),
                    expanded.sup_norm(),
                    (&closed - &expanded).sup_norm()
                ));
            }
            println!("emb-random: {count} dual evaluations written");
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown curvature case '{other}' (virasoro-sincos | burgers-random | emb-random)"
            )))
        }
    }
    write_text(&out.join("curvature.csv"), &csv)?;
    Ok(0)
}

#[derive(Serialize)]
struct VanishSummary {
    eps: Vec<f64>,
    energies: Vec<f64>,
    length_bounds: Vec<f64>,
    monotone_decreasing: bool,
    naive_linear_energy: f64,
}

/// `geoflow vanish`: ε-sweep of the start/stop compression-wave paths for
/// a fixed target diffeomorphism.
pub fn cmd_vanish(
    eps_list: &[f64],
    target_desc: &str,
    box_half: f64,
    resolution: usize,
    out: &Path,
) -> Result<i32> {
    ensure_dir(out)?;
    if eps_list.is_empty() {
        return Err(Error::InvalidParameter("empty eps list".into()));
    }
    let template = WaveSpec::new(eps_list[0], box_half, resolution)?;
    let grid = template.grid()?;
    let target = parse_profile(target_desc, grid)?;
    let rows = vanishing_demo(&template, &target, eps_list)?;
    let naive = linear_path_energy(&target, 64)?;

    let mut csv = String::from("eps,energy,length_bound\n");
    for r in &rows {
        csv.push_str(&format!("{},{},{}\n", r.eps, r.energy, r.length_bound));
    }
    write_text(&out.join("vanish.csv"), &csv)?;

    let monotone = rows.windows(2).all(|w| w[1].length_bound < w[0].length_bound);
    write_json(
        &out.join("summary.json"),
        &VanishSummary {
            eps: rows.iter().map(|r| r.eps).collect(),
            energies: rows.iter().map(|r| r.energy).collect(),
            length_bounds: rows.iter().map(|r| r.length_bound).collect(),
            monotone_decreasing: monotone,
            naive_linear_energy: naive,
        },
    )?;
    for r in &rows {
        println!(
            "vanish: eps {:.4} energy {:.6} length bound {:.6}",
            r.eps, r.energy, r.length_bound
        );
    }
    println!("vanish: naive straight-path energy {naive:.6}");
    Ok(0)
}

#[derive(Serialize)]
struct VerifyReport {
    suite: String,
    seed: u64,
    all_pass: bool,
    results: Vec<VerifyRow>,
}

#[derive(Serialize)]
struct VerifyRow {
    name: String,
    residual: f64,
    tol: f64,
    pass: bool,
}

/// `geoflow verify`: run the named property suite (or all of them) and
/// write a deterministic JSON report.
pub fn cmd_verify(suite_name: &str, seed: u64, out: &Path) -> Result<i32> {
    ensure_dir(out)?;
    let suites: Vec<Suite> = if suite_name == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![suite_name.parse()?]
    };
    let mut all_ok = true;
    for suite in suites {
        let rows = run_suite(suite, seed)?;
        let pass = rows.iter().all(|r| r.pass);
        all_ok &= pass;
        let report = VerifyReport {
            suite: suite.name().into(),
            seed,
            all_pass: pass,
            results: rows
                .iter()
                .map(|r| VerifyRow {
                    name: r.name.clone(),
                    residual: r.residual,
                    tol: r.tol,
                    pass: r.pass,
                })
                .collect(),
        };
        write_json(&out.join(format!("report_{}.json", suite.name())), &report)?;
        let mut stdout = std::io::stdout().lock();
        for r in &rows {
            writeln!(
                stdout,
                "[{}] {}: {} = {:.3e} (tol {:.1e})",
                if r.pass { "PASS" } else { "FAIL" },
                suite.name(),
                r.name,
                r.residual,
                r.tol
            )
            .ok();
        }
    }
    Ok(if all_ok { 0 } else { 1 })
}
