use super::helmholtz::helmholtz_radial;
use super::laplace::laplace_radial_derivatives;
use super::{check_radius, polar, Params};
use crate::error::{Error, Result};
use crate::specfun::EULER_GAMMA;
use crate::tensor::Tensor;
use num_complex::Complex64;
use std::f64::consts::PI;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

// Below these values of |η|r the differences Ψ − Γₖ are summed as power series.
const SERIES_LIMIT_3D: f64 = 0.5;
const SERIES_LIMIT_2D: f64 = 2.0;

/// Radial coefficients of one time mode at radius r:
/// `∂ᵢ∂ⱼ(Ψ*Γₖ) = hess_a δᵢⱼ + hess_b x̂ᵢx̂ⱼ` and `Gₖ = (gamma + hess_a) δᵢⱼ + hess_b x̂ᵢx̂ⱼ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeRadial {
    pub gamma: Complex64,
    pub hess_a: Complex64,
    pub hess_b: Complex64,
}

impl ModeRadial {
    /// `(A, B)` with Gₖ = A δ + B x̂x̂.
    pub fn stokes(&self) -> (Complex64, Complex64) {
        (self.gamma + self.hess_a, self.hess_b)
    }
}

/// Ψ*Γₖ = (Ψ − Γₖ)/λₖ, so its Hessian is (1/λₖ)∂ᵢ∂ⱼ(Ψ − Γₖ); with D = Ψ − Γₖ radial,
/// ∂ᵢ∂ⱼD = (D'/r) δ + (D'' − D'/r) x̂x̂.
pub fn mode_radial(params: &Params, k: i64, r: f64) -> Result<ModeRadial> {
    check_radius(r)?;
    let lambda = params.lambda(k);
    let eta = params.eta(k)?;
    let z = (eta * r).norm();
    let g = helmholtz_radial(params, k, r)?;
    let (hess_a, hess_b) = match params.n() {
        3 if z < SERIES_LIMIT_3D => series_3d(eta, r),
        2 if z <= SERIES_LIMIT_2D => series_2d(eta, lambda, r),
        n => {
            let (p1, p2) = laplace_radial_derivatives(n, r);
            let d1 = p1 - g.d1;
            let d2 = p2 - g.d2;
            (d1 / (lambda * r), (d2 - d1 / r) / lambda)
        }
    };
    let out = ModeRadial { gamma: g.gamma, hess_a, hess_b };
    for v in [out.gamma, out.hess_a, out.hess_b] {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Convergence(format!("mode kernel non-finite at k = {k}, r = {r:e}")));
        }
    }
    Ok(out)
}

// D = (1 − e^{iηr})/(4πr) = −(1/4π) Σ_{m≥1} (iη)^m r^{m−1}/m! and λ = −η², giving
// D'/(λr) = −(1/4πr) Σ_{m≥2} (iηr)^{m−2}(m−1)/m!, (D'' − D'/r)/λ = −(1/4πr) Σ_{m≥2} (iηr)^{m−2}(m−1)(m−3)/m!.
fn series_3d(eta: Complex64, r: f64) -> (Complex64, Complex64) {
    let w = I * eta * r;
    let mut pw = Complex64::new(1.0, 0.0);
    let mut fact = 2.0;
    let mut a = Complex64::new(0.0, 0.0);
    let mut b = Complex64::new(0.0, 0.0);
    for m in 2..60 {
        let mf = m as f64;
        if m > 2 {
            pw *= w;
            fact *= mf;
        }
        let t = pw / fact;
        a += t * (mf - 1.0);
        b += t * ((mf - 1.0) * (mf - 3.0));
        if t.norm() * mf * mf < 1e-18 {
            break;
        }
    }
    let c = -1.0 / (4.0 * PI * r);
    (a * c, b * c)
}

// With α = λ/4 and J₀(ηr) = Σ αᵐr²ᵐ/(m!)², the ascending series of Y₀ gives
// D = Σ_{m≥1} αᵐ/(m!)² [r²ᵐ log r − H_m r²ᵐ]/(2π) + c J₀(ηr), c = (log(η/2) + γ)/(2π) − i/4,
// which is differentiated termwise.
fn series_2d(eta: Complex64, lambda: Complex64, r: f64) -> (Complex64, Complex64) {
    let q = lambda / 4.0 * r * r;
    let c = ((eta / 2.0).ln() + EULER_GAMMA) / (2.0 * PI) - 0.25 * I;
    let lr = r.ln();
    let mut a = Complex64::new(0.0, 0.0);
    let mut b = Complex64::new(0.0, 0.0);
    // factor_m = q^{m−1}/(4 (m!)²)
    let mut factor = Complex64::new(0.25, 0.0);
    let mut harmonic = 0.0;
    for m in 1..80 {
        let mf = m as f64;
        if m > 1 {
            factor *= q / (mf * mf);
        }
        harmonic += 1.0 / mf;
        let ta = factor * ((2.0 * mf * lr + 1.0 - 2.0 * mf * harmonic) / (2.0 * PI) + 2.0 * mf * c);
        let kk = 4.0 * mf * (mf - 1.0);
        let tb = factor * ((kk * lr + 4.0 * mf - 2.0 - kk * harmonic) / (2.0 * PI) + kk * c);
        a += ta;
        b += tb;
        if factor.norm() * (1.0 + lr.abs() + harmonic) * (1.0 + mf * mf) < 1e-18 * (1.0 + b.norm()) {
            break;
        }
    }
    (a, b)
}

/// Gₖ(x) = δᵢⱼΓₖ(x) + (1/λₖ)∂ᵢ∂ⱼ(Ψ − Γₖ)(x), the kernel with spatial symbol P(ξ)/(|ξ|² + λₖ).
pub fn mode_stokeslet(params: &Params, k: i64, x: &[f64]) -> Result<Tensor<Complex64>> {
    let (r, u) = polar(params, x)?;
    let m = mode_radial(params, k, r)?;
    let (a, b) = m.stokes();
    Ok(Tensor::isotropic(a, b, &u))
}

/// Closed form of ∂ᵢ∂ⱼ(Ψ*Γₖ)(x).
pub fn conv_second_derivative(params: &Params, k: i64, x: &[f64]) -> Result<Tensor<Complex64>> {
    let (r, u) = polar(params, x)?;
    let m = mode_radial(params, k, r)?;
    Ok(Tensor::isotropic(m.hess_a, m.hess_b, &u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(n: usize) -> Params {
        Params::new(n, 2.0 * PI).unwrap()
    }

    // Direct (non-series) evaluation, valid where no cancellation occurs.
    fn direct(params: &Params, k: i64, r: f64) -> (Complex64, Complex64) {
        let g = helmholtz_radial(params, k, r).unwrap();
        let (p1, p2) = laplace_radial_derivatives(params.n(), r);
        let lambda = params.lambda(k);
        let d1 = p1 - g.d1;
        let d2 = p2 - g.d2;
        (d1 / (lambda * r), (d2 - d1 / r) / lambda)
    }

    #[test]
    fn series_matches_direct_near_switch() {
        for n in [2usize, 3] {
            let pr = p(n);
            for k in [1i64, -1, 3, -8] {
                let limit = if n == 3 { SERIES_LIMIT_3D } else { SERIES_LIMIT_2D };
                let r = limit / pr.eta(k).unwrap().norm();
                for rr in [r * 0.999, r * 0.9] {
                    let (a, b) = direct(&pr, k, rr);
                    let (sa, sb) = if n == 3 {
                        series_3d(pr.eta(k).unwrap(), rr)
                    } else {
                        series_2d(pr.eta(k).unwrap(), pr.lambda(k), rr)
                    };
                    let tol = if n == 3 { 1e-13 } else { 1e-12 };
                    assert!((a - sa).norm() <= tol * a.norm(), "n={n} k={k}: {a} vs {sa}");
                    assert!((b - sb).norm() <= tol * b.norm(), "n={n} k={k}: {b} vs {sb}");
                }
            }
        }
    }

    #[test]
    fn near_origin_structure() {
        // n = 3: G ≈ (δ + x̂x̂)/(8πr) + iη/(6π) δ; n = 2: G ≈ (1/4π)(−δ log r + x̂x̂) + const·δ.
        let pr = p(3);
        let r = 1e-6;
        let m = mode_radial(&pr, 1, r).unwrap();
        let (a, b) = m.stokes();
        let eta = pr.eta(1).unwrap();
        assert!((a - 1.0 / (8.0 * PI * r) - I * eta / (6.0 * PI)).norm() < 1e-5);
        assert!((b - 1.0 / (8.0 * PI * r)).norm() < 1e-5);
        let pr = p(2);
        let m = mode_radial(&pr, 1, r).unwrap();
        assert!((m.hess_b - 1.0 / (4.0 * PI)).norm() < 1e-10);
    }

    #[test]
    fn divergence_free_in_symbol_sense() {
        // ∂ᵢGᵢⱼ = 0 for G = A δ + B x̂x̂ ⇔ A' + B' + (n−1)B/r = 0; checked by central differences.
        for n in [2usize, 3] {
            let pr = p(n);
            for k in [1i64, 4] {
                for r in [0.3, 1.0, 2.5] {
                    let h = 1e-3 * r;
                    let f = |s: f64| {
                        let (a, b) = mode_radial(&pr, k, s).unwrap().stokes();
                        a + b
                    };
                    let deriv = (8.0 * (f(r + h) - f(r - h)) - f(r + 2.0 * h) + f(r - 2.0 * h)) / (12.0 * h);
                    let (_, b) = mode_radial(&pr, k, r).unwrap().stokes();
                    let div = deriv + (n as f64 - 1.0) * b / r;
                    let scale = b.norm() / r;
                    assert!(div.norm() < 1e-7 * scale, "n={n} k={k} r={r}: {div}");
                }
            }
        }
    }

    #[test]
    fn errors() {
        assert!(matches!(mode_stokeslet(&p(3), 0, &[1.0, 0.0, 0.0]), Err(Error::Domain(_))));
        assert!(matches!(mode_stokeslet(&p(3), 1, &[0.0, 0.0, 0.0]), Err(Error::Domain(_))));
    }

    proptest! {
        #[test]
        fn conjugate_symmetric_and_even(k in 1i64..64, x in prop::collection::vec(-6.0f64..6.0, 3), n in 2usize..4) {
            let x = &x[..n];
            prop_assume!(x.iter().map(|v| v * v).sum::<f64>() > 1e-4);
            let g = mode_stokeslet(&p(n), k, x).unwrap();
            let gm = mode_stokeslet(&p(n), -k, x).unwrap();
            prop_assert!(g.max_abs_diff(&gm.conj()) <= 1e-13 * g.max_abs());
            prop_assert!(g.is_symmetric());
            let neg: Vec<f64> = x.iter().map(|v| -v).collect();
            prop_assert_eq!(mode_stokeslet(&p(n), k, &neg).unwrap(), g);
        }

        #[test]
        fn trace_identity(k in 1i64..32, r in 0.05f64..8.0, n in 2usize..4) {
            // tr ∂∂(Ψ*Γₖ) = Δ(Ψ*Γₖ) = −Γₖ
            let m = mode_radial(&p(n), k, r).unwrap();
            let tr = m.hess_a * n as f64 + m.hess_b;
            prop_assert!((tr + m.gamma).norm() <= 1e-10 * m.hess_b.norm().max(m.gamma.norm()));
        }
    }
}
