//! Periodic-box discretization of ℝⁿ×𝕋: grids, transforms, the multiplier solver, the
//! representation-formula solver and field I/O.
//!
//! Spatial transforms are unitary (N^{−n/2} in both directions); time transforms use the
//! normalized average (1/Nt)Σ forward and a plain sum backward.

mod field;
mod forcing;
mod grid;
pub mod io;
mod solver;

pub use field::{GridField, Representation, REALNESS_TOLERANCE};
pub use forcing::{default_plane_waves, gaussian_bump_pulse, plane_wave_forcing, PlaneWave};
pub use grid::{make_grid, GridSpec};
pub use solver::{
    apply_tp_stokes_operator, convolve_remainder, direct_remainder_convolution, divergence, solve_by_representation,
    solve_tp_stokes, COMPATIBILITY_TOLERANCE,
};
