//! `geoflow` - experiment runner for geodesic flows on diffeomorphism
//! groups: trajectory solves, Jacobi-field diagnostics, curvature tables,
//! compression-wave sweeps and the property-suite driver.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{output_dir, RunConfig};

#[derive(Parser)]
#[command(name = "geoflow", version, about = "Geodesic flows on Diff(S¹) and the Virasoro-Bott group")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Flat key = value configuration file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Metric family: h0, h1, h2, ... or ga.
    #[arg(long)]
    family: Option<String>,
    /// Weight A of the G^A inertia operator.
    #[arg(long = "ga-a")]
    ga_weight: Option<f64>,
    /// Central velocity component a.
    #[arg(long)]
    a: Option<f64>,
    /// Grid size (even).
    #[arg(long)]
    n: Option<usize>,
    /// Time step.
    #[arg(long)]
    dt: Option<f64>,
    /// Horizon T.
    #[arg(long = "T")]
    t_end: Option<f64>,
    /// Initial condition: zero | sine:amp:wavenum | bump:center:halfwidth:height.
    #[arg(long)]
    ic: Option<String>,
    /// Seed for randomized batteries.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: $GEOFLOW_OUT/<subcommand> or runs/<subcommand>).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn build(&self) -> geoflow::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = &self.family {
            cfg.family = v.clone();
        }
        if let Some(v) = self.ga_weight {
            cfg.ga_weight = v;
        }
        if let Some(v) = self.a {
            cfg.a = v;
        }
        if let Some(v) = self.n {
            cfg.n = v;
        }
        if let Some(v) = self.dt {
            cfg.dt = v;
        }
        if let Some(v) = self.t_end {
            cfg.t_end = v;
        }
        if let Some(v) = &self.ic {
            cfg.ic = v.clone();
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a geodesic and write trajectory.csv + run.json.
    Solve {
        #[command(flatten)]
        run: RunArgs,
        /// Keep every k-th state in the CSV.
        #[arg(long, default_value_t = 1)]
        stride: usize,
    },
    /// Integrate Jacobi fields along a geodesic; write pairing diagnostics.
    Jacobi {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Emit curvature tables (generic vs closed form vs reference).
    Curvature {
        /// Case: virasoro-sincos | burgers-random | emb-random.
        #[arg(long, default_value = "virasoro-sincos")]
        case: String,
        #[arg(long, default_value_t = 0.0)]
        a1: f64,
        #[arg(long, default_value_t = 0.0)]
        a2: f64,
        /// Rows for the random cases.
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compression-wave ε-sweep toward a fixed target diffeomorphism.
    Vanish {
        /// Comma-separated mollification widths.
        #[arg(long, default_value = "0.2,0.1,0.05")]
        eps: String,
        /// Target displacement (bump:center:halfwidth:height or zero).
        #[arg(long, default_value = "bump:8.0:1.5:0.5")]
        target: String,
        /// Half-length of the periodic box.
        #[arg(long, default_value_t = 8.0)]
        box_half: f64,
        /// Box grid size.
        #[arg(long, default_value_t = 4096)]
        resolution: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a property suite and write a deterministic JSON report.
    Verify {
        /// Suite: algebra | cocycles | curvature | conservation | jacobi |
        /// vanish | convergence | all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Solve { run, stride } => run.build().and_then(|cfg| {
            let out = output_dir(run.out.as_deref(), "solve");
            commands::cmd_solve(&cfg, &out, *stride)
        }),
        Command::Jacobi { run } => run.build().and_then(|cfg| {
            let out = output_dir(run.out.as_deref(), "jacobi");
            commands::cmd_jacobi(&cfg, &out)
        }),
        Command::Curvature {
            case,
            a1,
            a2,
            count,
            seed,
            out,
        } => {
            let dir = output_dir(out.as_deref(), "curvature");
            commands::cmd_curvature(case, *a1, *a2, *count, *seed, &dir)
        }
        Command::Vanish {
            eps,
            target,
            box_half,
            resolution,
            out,
        } => {
            let dir = output_dir(out.as_deref(), "vanish");
            let parsed: Result<Vec<f64>, _> = eps
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect();
            match parsed {
                Ok(eps_list) => {
                    commands::cmd_vanish(&eps_list, target, *box_half, *resolution, &dir)
                }
                Err(e) => Err(geoflow::Error::InvalidParameter(format!(
                    "bad eps list '{eps}': {e}"
                ))),
            }
        }
        Command::Verify { suite, seed, out } => {
            let dir = output_dir(out.as_deref(), "verify");
            commands::cmd_verify(suite, *seed, &dir)
        }
    };
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
