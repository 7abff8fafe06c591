//! Closed-form kernels of the time-periodic Stokes problem.
//!
//! Sign conventions: the Fourier transform is `F[f](ξ) = ∫ f(x) e^{−ix·ξ} dx`, the Laplace
//! kernel Ψ satisfies `−ΔΨ = δ` (so `F[Ψ] = 1/|ξ|²`), and the Helmholtz kernel Γₖ satisfies
//! `(−Δ + λₖ)Γₖ = δ` with `λₖ = i(2π/T)k`.
//!
//! General-n forms kept for reference (only n ∈ {2, 3} is implemented):
//! `Ψ = |x|^{2−n}/((n−2)ωₙ)`, `Γₖ = (i/4)(η/(2π|x|))^{n/2−1} H⁽¹⁾_{n/2−1}(η|x|)`.

mod helmholtz;
mod laplace;
mod mode;
mod oracle;
mod remainder;

pub use helmholtz::{
    helmholtz_kernel, helmholtz_kernel_exponential, helmholtz_radial, helmholtz_symbol, projection_symbol,
    tp_multiplier, HelmholtzRadial,
};
pub use laplace::{laplace_fund, laplace_hessian_radial, steady_stokeslet_pressure, steady_stokeslet_velocity};
pub use mode::{conv_second_derivative, mode_radial, mode_stokeslet, ModeRadial};
pub use oracle::{conv_second_derivative_oracle, conv_second_derivative_oracle_tensor};
pub use remainder::{
    remainder_kernel, sawtooth, tp_fundamental_solution, RemainderSample, RemainderSeries, TpFundamentalSample,
    Truncation, TruncationWarning, ADAPTIVE_FLOOR, DEFAULT_MODE_CAP,
};

use crate::error::{Error, Result};
use crate::specfun::sqrt_upper;
use crate::tensor::Tensor;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Kernels are not evaluated closer than this to the singular origin.
pub const MIN_RADIUS: f64 = 1e-8;

/// Problem configuration: dimension n ∈ {2, 3} and time period T > 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamsSpec", into = "ParamsSpec")]
pub struct Params {
    n: usize,
    period: f64,
    omega_n: f64,
    frequency: f64,
}

/// Serialized form of [`Params`]; the derived constants are recomputed on load.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamsSpec {
    pub n: usize,
    pub period: f64,
}

impl TryFrom<ParamsSpec> for Params {
    type Error = Error;
    fn try_from(s: ParamsSpec) -> Result<Self> {
        Params::new(s.n, s.period)
    }
}

impl From<Params> for ParamsSpec {
    fn from(p: Params) -> Self {
        ParamsSpec { n: p.n, period: p.period }
    }
}

impl Params {
    pub fn new(n: usize, period: f64) -> Result<Self> {
        if n != 2 && n != 3 {
            return Err(Error::Config(format!("dimension must be 2 or 3, got {n}")));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::Config(format!("period must be positive and finite, got {period}")));
        }
        let omega_n = if n == 2 { 2.0 * PI } else { 4.0 * PI };
        Ok(Params { n, period, omega_n, frequency: 2.0 * PI / period })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Surface area of the unit sphere in ℝⁿ.
    pub fn omega_n(&self) -> f64 {
        self.omega_n
    }

    /// Angular frequency 2π/T.
    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    /// λₖ = i(2π/T)k.
    pub fn lambda(&self, k: i64) -> Complex64 {
        Complex64::new(0.0, self.frequency * k as f64)
    }

    /// η = √(−λₖ) with Im η > 0; the Helmholtz kernel decays like e^{−Im η |x|}.
    pub fn eta(&self, k: i64) -> Result<Complex64> {
        if k == 0 {
            return Err(Error::Domain("no Helmholtz wavenumber for the steady mode k = 0".into()));
        }
        sqrt_upper(-self.lambda(k))
    }
}

/// A dual-group point (ξ, k).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub xi: Vec<f64>,
    pub k: i64,
    pub lambda: Complex64,
}

impl Mode {
    pub fn new(params: &Params, xi: &[f64], k: i64) -> Result<Self> {
        if xi.len() != params.n() {
            return Err(Error::Shape(format!("frequency has {} components, expected {}", xi.len(), params.n())));
        }
        Ok(Mode { xi: xi.to_vec(), k, lambda: params.lambda(k) })
    }

    pub fn xi_squared(&self) -> f64 {
        self.xi.iter().map(|v| v * v).sum()
    }
}

/// A point of ℝⁿ × 𝕋.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacetimePoint {
    pub x: Vec<f64>,
    pub t: f64,
}

/// Pressure part of a fundamental solution. Its time factor is the Dirac measure on 𝕋, so it
/// acts by spatial convolution within each time slice and has no pointwise time dependence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceLocalPressure {
    pub values: Vec<f64>,
}

/// Velocity block and pressure row of a real fundamental solution at one point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSample {
    pub velocity: Tensor<f64>,
    pub pressure: SliceLocalPressure,
}

/// Validates a position and returns `(|x|, x/|x|)`.
pub(crate) fn polar(params: &Params, x: &[f64]) -> Result<(f64, Vec<f64>)> {
    if x.len() != params.n() {
        return Err(Error::Shape(format!("point has {} components, expected {}", x.len(), params.n())));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite point".into()));
    }
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if r < MIN_RADIUS {
        return Err(Error::Domain(format!("kernel is singular at the origin (|x| = {r:e} < {MIN_RADIUS:e})")));
    }
    Ok((r, x.iter().map(|v| v / r).collect()))
}

pub(crate) fn check_radius(r: f64) -> Result<()> {
    if !(r >= MIN_RADIUS && r.is_finite()) {
        return Err(Error::Domain(format!("kernel is singular at the origin (|x| = {r:e} < {MIN_RADIUS:e})")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_invariants() {
        let p = Params::new(3, 2.0 * PI).unwrap();
        assert_eq!(p.omega_n(), 4.0 * PI);
        assert!((p.frequency() * p.period() - 2.0 * PI).abs() < 1e-15);
        assert_eq!(p.lambda(0), Complex64::new(0.0, 0.0));
        assert!(Params::new(4, 1.0).is_err());
        assert!(Params::new(2, 0.0).is_err());
        assert!(Params::new(2, f64::NAN).is_err());
    }

    #[test]
    fn params_serde_recomputes_derived_constants() {
        let p = Params::new(2, 3.0).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"n":2,"period":3.0}"#);
        let back: Params = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<Params>(r#"{"n":5,"period":3.0}"#).is_err());
    }

    #[test]
    fn eta_has_positive_imaginary_part() {
        let p = Params::new(3, 2.0 * PI).unwrap();
        for k in [-5, -1, 1, 7] {
            let e = p.eta(k).unwrap();
            assert!(e.im > 0.0);
            assert!((e * e + p.lambda(k)).norm() < 1e-14 * (k.abs() as f64));
            assert!((e.im - (PI * k.abs() as f64 / p.period()).sqrt()).abs() < 1e-14);
        }
        assert!(p.eta(0).is_err());
    }

    #[test]
    fn polar_rejects_origin_and_wrong_shape() {
        let p = Params::new(2, 1.0).unwrap();
        assert!(matches!(polar(&p, &[0.0, 0.0]), Err(Error::Domain(_))));
        assert!(matches!(polar(&p, &[1e-9, 0.0]), Err(Error::Domain(_))));
        assert!(matches!(polar(&p, &[1.0, 0.0, 0.0]), Err(Error::Shape(_))));
        let (r, u) = polar(&p, &[3.0, 4.0]).unwrap();
        assert_eq!(r, 5.0);
        assert_eq!(u, vec![0.6, 0.8]);
    }
}
