//! Fundamental solution of the time-periodic Stokes equations on ℝⁿ×𝕋 (n = 2, 3).
//!
//! * [`specfun`]: complex-argument Hankel functions and the upper-half-plane square root.
//! * [`kernels`]: steady Stokeslet, Laplace and Helmholtz kernels, per-mode Stokes kernels,
//!   the oscillatory remainder kernel and the assembled fundamental solution.
//! * [`spectral`]: periodic-box discretization, transforms, the multiplier solver and the
//!   representation-formula solver.
//! * [`verify`]: decay, summability and pointwise-estimate checks producing [`verify::VerificationReport`]s.
//! * [`cli`]: the `tpstokes` command-line front end.

pub mod cli;
pub mod error;
pub mod kernels;
pub mod quadrature;
pub mod spectral;
pub mod specfun;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
