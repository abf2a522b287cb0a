//! Run configuration: flat key-value files plus command-line overrides.

use std::path::{Path, PathBuf};

use geoflow::grid::{Field, Grid};
use geoflow::metrics::InertiaSpec;
use geoflow::util::bump_field;
use geoflow::{Error, Result};

/// Parameters shared by the experiment subcommands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Metric family: h0, h1, h2, ... or ga.
    pub family: String,
    /// Weight A of the G^A family (ignored for h-k).
    pub ga_weight: f64,
    /// Central velocity component a.
    pub a: f64,
    /// Grid size (even, >= 8).
    pub n: usize,
    /// Time step.
    pub dt: f64,
    /// Horizon T.
    pub t_end: f64,
    /// Initial-condition descriptor: zero | sine:amp:wavenum | bump:center:halfwidth:height.
    pub ic: String,
    /// Seed for the randomized batteries.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            family: "h0".into(),
            ga_weight: 1.0,
            a: 0.0,
            n: 256,
            dt: 1e-3,
            t_end: 1.0,
            ic: "sine:0.2:1".into(),
            seed: 0,
        }
    }
}

impl RunConfig {
    /// Parses the flat `key = value` format (# starts a comment).
    pub fn parse_kv(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidParameter(format!("line {}: expected key = value", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| {
                Error::InvalidParameter(format!("line {}: bad {what} '{value}'", lineno + 1))
            };
            match key {
                "family" => cfg.family = value.to_string(),
                "ga_weight" => cfg.ga_weight = value.parse().map_err(|_| bad("ga_weight"))?,
                "a" => cfg.a = value.parse().map_err(|_| bad("a"))?,
                "n" => cfg.n = value.parse().map_err(|_| bad("n"))?,
                "dt" => cfg.dt = value.parse().map_err(|_| bad("dt"))?,
                "T" => cfg.t_end = value.parse().map_err(|_| bad("T"))?,
                "ic" => cfg.ic = value.to_string(),
                "seed" => cfg.seed = value.parse().map_err(|_| bad("seed"))?,
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "line {}: unknown key '{other}'",
                        lineno + 1
                    )))
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("cannot read {path:?}: {e}")))?;
        Self::parse_kv(&text)
    }

    /// Serializes to the same flat format (round-trips through
    /// [`RunConfig::parse_kv`] unchanged).
    pub fn to_kv(&self) -> String {
        format!(
            "family = {}\nga_weight = {}\na = {}\nn = {}\ndt = {}\nT = {}\nic = {}\nseed = {}\n",
            self.family, self.ga_weight, self.a, self.n, self.dt, self.t_end, self.ic, self.seed
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 8 || !self.n.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("bad grid size {}", self.n)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) || self.t_end < 0.0 || !self.t_end.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "bad time parameters dt = {}, T = {}",
                self.dt, self.t_end
            )));
        }
        self.inertia()?;
        self.initial_condition(Grid::standard(self.n)?)?;
        Ok(())
    }

    pub fn inertia(&self) -> Result<InertiaSpec> {
        if self.family == "ga" {
            return InertiaSpec::ga(self.ga_weight);
        }
        if let Some(k) = self.family.strip_prefix('h') {
            let k: u32 = k.parse().map_err(|_| {
                Error::InvalidParameter(format!("bad metric family '{}'", self.family))
            })?;
            return Ok(InertiaSpec::hk(k));
        }
        Err(Error::InvalidParameter(format!(
            "unknown metric family '{}' (expected h<k> or ga)",
            self.family
        )))
    }

    pub fn initial_condition(&self, grid: Grid) -> Result<Field> {
        parse_profile(&self.ic, grid)
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::standard(self.n)
    }
}

/// Parses a field preset: zero | sine:amp:wavenum | bump:center:halfwidth:height.
pub fn parse_profile(descriptor: &str, grid: Grid) -> Result<Field> {
    let parts: Vec<&str> = descriptor.split(':').collect();
    let numeric = |s: &str| -> Result<f64> {
        s.parse()
            .map_err(|_| Error::InvalidParameter(format!("bad number '{s}' in '{descriptor}'")))
    };
    match parts[0] {
        "zero" => Ok(Field::zeros(grid)),
        "sine" => {
            if parts.len() != 3 {
                return Err(Error::InvalidParameter(format!(
                    "sine preset needs sine:amp:wavenum, got '{descriptor}'"
                )));
            }
            let amp = numeric(parts[1])?;
            let wavenum = numeric(parts[2])?;
            Ok(Field::from_fn(grid, |x| amp * (wavenum * x).sin()))
        }
        "bump" => {
            if parts.len() != 4 {
                return Err(Error::InvalidParameter(format!(
                    "bump preset needs bump:center:halfwidth:height, got '{descriptor}'"
                )));
            }
            Ok(bump_field(
                grid,
                numeric(parts[1])?,
                numeric(parts[2])?,
                numeric(parts[3])?,
            ))
        }
        other => Err(Error::InvalidParameter(format!(
            "unknown initial-condition preset '{other}'"
        ))),
    }
}

/// Output root: `--out` wins, then `GEOFLOW_OUT`, then `./runs`.
pub fn output_dir(explicit: Option<&Path>, subcommand: &str) -> PathBuf {
    if let Some(dir) = explicit {
        return dir.to_path_buf();
    }
    let root = std::env::var_os("GEOFLOW_OUT")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("runs"));
    root.join(subcommand)
}
