use super::{check_radius, polar, Params};
use crate::error::Result;
use crate::tensor::Tensor;
use std::f64::consts::PI;

/// Ψ(x): −(1/2π) log|x| for n = 2, 1/(4π|x|) for n = 3.
pub fn laplace_fund(params: &Params, x: &[f64]) -> Result<f64> {
    let (r, _) = polar(params, x)?;
    Ok(laplace_radial(params.n(), r))
}

pub(crate) fn laplace_radial(n: usize, r: f64) -> f64 {
    if n == 2 {
        -r.ln() / (2.0 * PI)
    } else {
        1.0 / (4.0 * PI * r)
    }
}

/// `(Ψ', Ψ'')` as functions of r.
pub(crate) fn laplace_radial_derivatives(n: usize, r: f64) -> (f64, f64) {
    if n == 2 {
        (-1.0 / (2.0 * PI * r), 1.0 / (2.0 * PI * r * r))
    } else {
        (-1.0 / (4.0 * PI * r * r), 2.0 / (4.0 * PI * r * r * r))
    }
}

/// `(a, b)` with ∂ᵢ∂ⱼΨ(x) = a δᵢⱼ + b x̂ᵢx̂ⱼ, that is `−(δ − n x̂x̂)/(ωₙ|x|ⁿ)`.
pub fn laplace_hessian_radial(params: &Params, r: f64) -> Result<(f64, f64)> {
    check_radius(r)?;
    let (d1, d2) = laplace_radial_derivatives(params.n(), r);
    Ok((d1 / r, d2 - d1 / r))
}

/// Velocity block of the steady Stokeslet.
pub fn steady_stokeslet_velocity(params: &Params, x: &[f64]) -> Result<Tensor<f64>> {
    let (r, u) = polar(params, x)?;
    let c = 1.0 / (2.0 * params.omega_n());
    let diag = if params.n() == 2 { -r.ln() } else { 1.0 / r };
    let outer = if params.n() == 2 { 1.0 } else { 1.0 / r };
    Ok(Tensor::isotropic(c * diag, c * outer, &u))
}

/// Pressure row of the steady Stokeslet, `xᵢ/(ωₙ|x|ⁿ)`.
pub fn steady_stokeslet_pressure(params: &Params, x: &[f64]) -> Result<Vec<f64>> {
    let (r, _) = polar(params, x)?;
    let scale = 1.0 / (params.omega_n() * r.powi(params.n() as i32));
    Ok(x.iter().map(|v| v * scale).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(n: usize) -> Params {
        Params::new(n, 2.0 * PI).unwrap()
    }

    #[test]
    fn laplace_examples() {
        assert_eq!(laplace_fund(&p(2), &[1.0, 0.0]).unwrap(), 0.0);
        assert!((laplace_fund(&p(3), &[0.0, 1.0, 0.0]).unwrap() - 1.0 / (4.0 * PI)).abs() < 1e-17);
        let e = std::f64::consts::E;
        assert!((laplace_fund(&p(2), &[0.0, e]).unwrap() + 1.0 / (2.0 * PI)).abs() < 1e-16);
        assert!(laplace_fund(&p(3), &[0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn stokeslet_examples() {
        let v = steady_stokeslet_velocity(&p(2), &[1.0, 0.0]).unwrap();
        assert!((v.get(0, 0) - 1.0 / (4.0 * PI)).abs() < 1e-17);
        assert_eq!(v.get(1, 1), 0.0);
        assert_eq!(v.get(0, 1), 0.0);
        let v = steady_stokeslet_velocity(&p(3), &[1.0, 0.0, 0.0]).unwrap();
        assert!((v.get(0, 0) - 1.0 / (4.0 * PI)).abs() < 1e-17);
        assert!((v.get(1, 1) - 1.0 / (8.0 * PI)).abs() < 1e-17);
        let q = steady_stokeslet_pressure(&p(3), &[1.0, 0.0, 0.0]).unwrap();
        assert!((q[0] - 1.0 / (4.0 * PI)).abs() < 1e-17 && q[1] == 0.0 && q[2] == 0.0);
        let q = steady_stokeslet_pressure(&p(2), &[0.0, 2.0]).unwrap();
        assert!(q[0] == 0.0 && (q[1] - 1.0 / (4.0 * PI)).abs() < 1e-17);
    }

    #[test]
    fn hessian_matches_closed_form() {
        for n in [2, 3] {
            let (a, b) = laplace_hessian_radial(&p(n), 2.0).unwrap();
            let w = p(n).omega_n() * 2f64.powi(n as i32);
            assert!((a + 1.0 / w).abs() < 1e-16);
            assert!((b - n as f64 / w).abs() < 1e-16);
        }
    }

    // Sixth-order central differences for the Stokes residual checks.
    fn d1(f: &dyn Fn(f64) -> f64, h: f64) -> f64 {
        (f(3.0 * h) - 9.0 * f(2.0 * h) + 45.0 * f(h) - 45.0 * f(-h) + 9.0 * f(-2.0 * h) - f(-3.0 * h)) / (60.0 * h)
    }
    fn d2(f: &dyn Fn(f64) -> f64, h: f64) -> f64 {
        (2.0 * f(3.0 * h) - 27.0 * f(2.0 * h) + 270.0 * f(h) - 490.0 * f(0.0) + 270.0 * f(-h) - 27.0 * f(-2.0 * h)
            + 2.0 * f(-3.0 * h))
            / (180.0 * h * h)
    }

    fn stokes_residuals(n: usize, x: &[f64]) -> (f64, f64, f64) {
        let pr = p(n);
        let h = 1e-3;
        let shifted = |axis: usize, s: f64| -> Vec<f64> {
            let mut y = x.to_vec();
            y[axis] += s;
            y
        };
        let mut momentum: f64 = 0.0;
        let mut divergence: f64 = 0.0;
        let scale = steady_stokeslet_velocity(&pr, x).unwrap().max_abs() / x.iter().map(|v| v * v).sum::<f64>();
        for i in 0..n {
            for j in 0..n {
                let mut lap = 0.0;
                for a in 0..n {
                    lap += d2(&|s| steady_stokeslet_velocity(&pr, &shifted(a, s)).unwrap().get(i, j), h);
                }
                let grad_p = d1(&|s| steady_stokeslet_pressure(&pr, &shifted(i, s)).unwrap()[j], h);
                momentum = momentum.max((-lap + grad_p).abs());
            }
            let mut div = 0.0;
            for a in 0..n {
                div += d1(&|s| steady_stokeslet_velocity(&pr, &shifted(a, s)).unwrap().get(a, i), h);
            }
            divergence = divergence.max(div.abs());
        }
        (momentum, divergence, scale)
    }

    proptest! {
        #[test]
        fn stokeslet_symmetric_and_pressure_odd(x in prop::collection::vec(-4.0f64..4.0, 3), n in 2usize..4) {
            let x = &x[..n];
            prop_assume!(x.iter().map(|v| v * v).sum::<f64>() > 1e-4);
            let v = steady_stokeslet_velocity(&p(n), x).unwrap();
            prop_assert!(v.is_symmetric());
            let neg: Vec<f64> = x.iter().map(|v| -v).collect();
            prop_assert_eq!(steady_stokeslet_velocity(&p(n), &neg).unwrap(), v);
            let a = steady_stokeslet_pressure(&p(n), x).unwrap();
            let b = steady_stokeslet_pressure(&p(n), &neg).unwrap();
            for (u, w) in a.iter().zip(&b) {
                prop_assert_eq!(*u, -*w);
            }
        }

        #[test]
        fn stokeslet_solves_steady_stokes(r in 1.0f64..4.0, th in 0.0f64..6.28, ph in 0.1f64..3.0, n in 2usize..4) {
            let x: Vec<f64> = if n == 2 {
                vec![r * th.cos(), r * th.sin()]
            } else {
                vec![r * ph.sin() * th.cos(), r * ph.sin() * th.sin(), r * ph.cos()]
            };
            let (m, d, scale) = stokes_residuals(n, &x);
            prop_assert!(m <= 1e-6 * scale, "momentum residual {} vs scale {}", m, scale);
            prop_assert!(d <= 1e-6 * scale * r, "divergence residual {}", d);
        }
    }
}
