//! Geodesic flows of right-invariant `H^k` and `G^A` metrics on the
//! diffeomorphism group of the circle and on its Virasoro-Bott central
//! extension.
//!
//! The crate is organised around a periodic pseudospectral kernel:
//!
//! * [`grid`] - uniform periodic grids, spectral differentiation,
//!   quadrature, trigonometric interpolation and Fourier-multiplier
//!   operators (the inertia operators `A_k` and their inverses).
//! * [`diffeo`] - the group layer: composition, inversion, Schwarzian
//!   derivative, Bott cocycle and the Virasoro-Bott multiplication.
//! * [`metrics`] - inertia operators, the Lie bracket with the
//!   Gelfand-Fuchs cocycle, and the metric transpose `ad(X)ᵀ`.
//! * [`flow`] - Eulerian geodesic integration (Burgers, Camassa-Holm,
//!   KdV and their `H^k` hierarchies) with the Lagrangian lift and the
//!   conserved momentum map.
//! * [`jacobi`] - Jacobi fields along geodesics and their conserved
//!   weak-symplectic pairing.
//! * [`curvature`] - Christoffel/curvature closed forms and the generic
//!   right-invariant curvature quadruple.
//! * [`vanish`] - mollified compression waves and the
//!   vanishing-geodesic-distance construction.
//! * [`verify`] - deterministic property batteries used by the CLI and
//!   the acceptance suite.

pub mod curvature;
pub mod diffeo;
pub mod flow;
pub mod grid;
pub mod jacobi;
pub mod metrics;
pub mod util;
pub mod vanish;
pub mod verify;

use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("fields live on different grids ({0} vs {1} nodes)")]
    GridMismatch(usize, usize),
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("multiplier has a zero symbol at wavenumber {0}; not invertible")]
    ZeroMultiplier(i64),
    #[error("map is not orientation-preserving: min(1+g') = {min_slope:.3e}")]
    OrientationLost { min_slope: f64 },
    #[error("Newton inversion failed to converge at node {node} (residual {residual:.3e})")]
    NewtonDiverged { node: usize, residual: f64 },
    #[error("shock detected at t = {t:.6}: min Lagrangian slope {min_slope:.3e}")]
    ShockDetected { t: f64, min_slope: f64 },
    #[error("characteristics cross at t = {shock_time:.6}; requested t = {t:.6}")]
    CharacteristicsCross { t: f64, shock_time: f64 },
    #[error("degenerate plane: Gram determinant {0:.3e} below tolerance")]
    DegeneratePlane(f64),
    #[error("resolution too coarse: {0}")]
    TooCoarse(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
