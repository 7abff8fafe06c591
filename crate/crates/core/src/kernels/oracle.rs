use super::helmholtz::helmholtz_radial;
use super::{polar, Params};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};
use crate::tensor::Tensor;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Requested relative accuracy of the oracle.
const ORACLE_TOLERANCE: f64 = 1e-6;

/// ∂ᵢ∂ⱼ(Ψ*Γₖ)(x) = ∫ ∂ᵢΨ(x−y) ∂ⱼΓₖ(y) dy by nested adaptive quadrature.
pub fn conv_second_derivative_oracle(params: &Params, k: i64, x: &[f64], i: usize, j: usize) -> Result<Complex64> {
    if i >= params.n() || j >= params.n() {
        return Err(Error::Shape(format!("index ({i}, {j}) out of range for n = {}", params.n())));
    }
    Ok(conv_second_derivative_oracle_tensor(params, k, x)?.get(i, j))
}

/// Full tensor version of [`conv_second_derivative_oracle`].
///
/// In polar coordinates about the axis x̂ (y = ρ(cos θ x̂ + sin θ e), e ⊥ x̂), the average over
/// e of (x − y)ᵢ ŷⱼ is `r cos θ x̂ᵢx̂ⱼ − ρ[cos²θ x̂ᵢx̂ⱼ + sin²θ (δᵢⱼ − x̂ᵢx̂ⱼ)/(n−1)]`, so the
/// integral reduces to two (ρ, θ) integrals multiplying x̂x̂ and δ − x̂x̂.
pub fn conv_second_derivative_oracle_tensor(params: &Params, k: i64, x: &[f64]) -> Result<Tensor<Complex64>> {
    let (r, u) = polar(params, x)?;
    let n = params.n();
    let eta = params.eta(k)?;
    let nf = n as f64;
    // ∂ᵢΨ(z) = −zᵢ/(ωₙ|z|ⁿ); the measure carries the angular factor of the e-average.
    let inner = |rho: f64| -> Result<[Complex64; 2]> {
        let g1 = helmholtz_radial(params, k, rho)?.d1;
        let measure = if n == 3 { 2.0 * PI * rho * rho } else { 2.0 * rho };
        let f = |th: f64| -> [Complex64; 2] {
            let (s, c) = th.sin_cos();
            let d2 = (r * r + rho * rho - 2.0 * r * rho * c).max(1e-300);
            let dn = if n == 3 { d2 * d2.sqrt() } else { d2 };
            let jac = if n == 3 { s } else { 1.0 };
            let w = -measure * jac / (params.omega_n() * dn);
            [g1 * (w * c * (r - rho * c)), g1 * (-w * rho * s * s / (nf - 1.0))]
        };
        let e = integrate(f, 0.0, PI, Tolerance::relative(1e-10).with_abs(1e-14 * (1.0 + g1.norm())).with_max_intervals(4000))?;
        Ok(e.value)
    };
    let mut failure: Option<Error> = None;
    let mut outer = |rho: f64| -> [Complex64; 2] {
        match inner(rho) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                [Complex64::new(0.0, 0.0); 2]
            }
        }
    };
    let cut = r + 60.0 / eta.im;
    let tol = Tolerance::relative(1e-8).with_max_intervals(4000);
    let near = integrate(&mut outer, 0.0, r, tol);
    let far = integrate(&mut outer, r, cut, tol);
    if let Some(e) = failure {
        return Err(e);
    }
    let (near, far) = (near?, far?);
    let par = near.value[0] + far.value[0];
    let perp = near.value[1] + far.value[1];
    let err = near.error + far.error;
    let size = par.norm().max(perp.norm());
    if err > ORACLE_TOLERANCE * size {
        return Err(Error::Quadrature { estimate: err, tolerance: ORACLE_TOLERANCE * size });
    }
    Ok(Tensor::isotropic(perp, par - perp, &u))
}
