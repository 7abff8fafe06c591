use super::{check_radius, polar, Mode, Params};
use crate::error::{Error, Result};
use crate::specfun::{hankel1, hankel1_01, HankelOrder};
use crate::tensor::Tensor;
use num_complex::Complex64;
use std::f64::consts::PI;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Γₖ(x) = (i/4)(η/(2π|x|))^{(n−2)/2} H⁽¹⁾_{n/2−1}(η|x|), η = sqrt_upper(−λₖ).
pub fn helmholtz_kernel(params: &Params, k: i64, x: &[f64]) -> Result<Complex64> {
    let (r, _) = polar(params, x)?;
    let eta = params.eta(k)?;
    let order = HankelOrder::for_dimension(params.n())?;
    let h = hankel1(order, eta * r)?;
    let power = (params.n() as f64 - 2.0) / 2.0;
    let pref = if power == 0.0 { Complex64::new(1.0, 0.0) } else { (eta / (2.0 * PI * r)).powf(power) };
    Ok(0.25 * I * pref * h)
}

/// Three-dimensional closed form e^{iη|x|}/(4π|x|).
pub fn helmholtz_kernel_exponential(params: &Params, k: i64, x: &[f64]) -> Result<Complex64> {
    if params.n() != 3 {
        return Err(Error::Domain("the exponential form of the Helmholtz kernel exists only for n = 3".into()));
    }
    let (r, _) = polar(params, x)?;
    let eta = params.eta(k)?;
    Ok((I * eta * r).exp() / (4.0 * PI * r))
}

/// Γₖ and its first two radial derivatives at radius r.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HelmholtzRadial {
    pub gamma: Complex64,
    pub d1: Complex64,
    pub d2: Complex64,
}

/// Radial profile of Γₖ: analytic for n = 3, through H₀ and H₁ for n = 2.
pub fn helmholtz_radial(params: &Params, k: i64, r: f64) -> Result<HelmholtzRadial> {
    check_radius(r)?;
    let eta = params.eta(k)?;
    let z = eta * r;
    if params.n() == 3 {
        let e = (I * z).exp() / (4.0 * PI * r);
        Ok(HelmholtzRadial {
            gamma: e,
            d1: e * (I * z - 1.0) / r,
            d2: e * (-z * z - 2.0 * I * z + 2.0) / (r * r),
        })
    } else {
        let (h0, h1) = hankel1_01(z)?;
        Ok(HelmholtzRadial {
            gamma: 0.25 * I * h0,
            d1: -0.25 * I * eta * h1,
            d2: -0.25 * I * eta * eta * (h0 - h1 / z),
        })
    }
}

/// 1/(|ξ|² + λₖ).
pub fn helmholtz_symbol(_params: &Params, mode: &Mode) -> Result<Complex64> {
    let denom = mode.xi_squared() + mode.lambda;
    if denom == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("Helmholtz symbol is singular at (ξ, k) = (0, 0)".into()));
    }
    Ok(1.0 / denom)
}

/// M(ξ, k) = (1 − δ(k))/(|ξ|² + λₖ); exactly zero on the steady mode.
pub fn tp_multiplier(_params: &Params, mode: &Mode) -> Complex64 {
    if mode.k == 0 {
        return Complex64::new(0.0, 0.0);
    }
    1.0 / (mode.xi_squared() + mode.lambda)
}

/// Leray projection P(ξ) = I − ξξᵀ/|ξ|².
pub fn projection_symbol(xi: &[f64]) -> Result<Tensor<f64>> {
    let s: f64 = xi.iter().map(|v| v * v).sum();
    if s == 0.0 || !s.is_finite() {
        return Err(Error::Domain("projection symbol is undefined at ξ = 0".into()));
    }
    let norm = s.sqrt();
    let u: Vec<f64> = xi.iter().map(|v| v / norm).collect();
    Ok(Tensor::isotropic(1.0, -1.0, &u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(n: usize) -> Params {
        Params::new(n, 2.0 * PI).unwrap()
    }

    #[test]
    fn three_dimensional_example() {
        let g = helmholtz_kernel(&p(3), 1, &[1.0, 0.0, 0.0]).unwrap();
        let eta = Complex64::from_polar(1.0, 3.0 * PI / 4.0);
        let expected = (I * eta).exp() / (4.0 * PI);
        assert!((g - expected).norm() < 1e-15);
        assert!((g.norm() - (-0.5f64.sqrt()).exp() / (4.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn hankel_and_exponential_forms_agree() {
        for k in [-3, 1, 2, 8] {
            for r in [1e-3, 0.5, 3.0, 20.0] {
                let x = [r * 0.6, 0.0, r * 0.8];
                let a = helmholtz_kernel(&p(3), k, &x).unwrap();
                let b = helmholtz_kernel_exponential(&p(3), k, &x).unwrap();
                assert!((a - b).norm() <= 1e-12 * b.norm(), "k={k} r={r}");
            }
        }
        assert!(helmholtz_kernel_exponential(&p(2), 1, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn errors_at_steady_mode_and_origin() {
        assert!(matches!(helmholtz_kernel(&p(2), 0, &[1.0, 0.0]), Err(Error::Domain(_))));
        assert!(matches!(helmholtz_kernel(&p(2), 1, &[0.0, 0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn radial_profile_matches_kernel() {
        for n in [2, 3] {
            let mut x = vec![0.0; n];
            x[0] = 1.7;
            let g = helmholtz_kernel(&p(n), 3, &x).unwrap();
            let r = helmholtz_radial(&p(n), 3, 1.7).unwrap();
            assert!((g - r.gamma).norm() < 1e-14 * g.norm());
        }
    }

    #[test]
    fn symbol_examples() {
        let m = Mode::new(&p(2), &[0.0, 0.0], 1).unwrap();
        assert!((helmholtz_symbol(&p(2), &m).unwrap() - Complex64::new(0.0, -1.0)).norm() < 1e-16);
        assert!((tp_multiplier(&p(2), &m) - Complex64::new(0.0, -1.0)).norm() < 1e-16);
        let m = Mode::new(&p(2), &[2.0, 0.0], 0).unwrap();
        assert_eq!(helmholtz_symbol(&p(2), &m).unwrap(), Complex64::new(0.25, 0.0));
        assert_eq!(tp_multiplier(&p(2), &m), Complex64::new(0.0, 0.0));
        let m = Mode::new(&p(2), &[0.0, 0.0], 0).unwrap();
        assert!(matches!(helmholtz_symbol(&p(2), &m), Err(Error::Domain(_))));
        assert_eq!(tp_multiplier(&p(2), &m), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn projection_examples() {
        let pr = projection_symbol(&[1.0, 0.0]).unwrap();
        assert_eq!(pr.to_vec(), vec![0.0, 0.0, 0.0, 1.0]);
        assert!(projection_symbol(&[0.0, 0.0, 0.0]).is_err());
    }

    proptest! {
        #[test]
        fn conjugate_modes(k in 1i64..40, r in 0.01f64..10.0, n in 2usize..4) {
            let mut x = vec![0.0; n];
            x[n - 1] = r;
            let a = helmholtz_kernel(&p(n), k, &x).unwrap();
            let b = helmholtz_kernel(&p(n), -k, &x).unwrap();
            prop_assert!((a - b.conj()).norm() <= 1e-13 * a.norm().max(1e-300));
        }

        #[test]
        fn multiplier_bounded_by_period(xi in prop::collection::vec(-50.0f64..50.0, 3), k in -100i64..100, period in 0.1f64..20.0) {
            prop_assume!(k != 0);
            let pr = Params::new(3, period).unwrap();
            let m = Mode::new(&pr, &xi, k).unwrap();
            let bound = period / (2.0 * PI * k.abs() as f64);
            prop_assert!(helmholtz_symbol(&pr, &m).unwrap().norm() <= bound * (1.0 + 1e-14));
            prop_assert!(tp_multiplier(&pr, &m).norm() <= period / (2.0 * PI) * (1.0 + 1e-14));
        }

        #[test]
        fn projection_is_idempotent_and_annihilates_xi(xi in prop::collection::vec(-10.0f64..10.0, 3), n in 2usize..4) {
            let xi = &xi[..n];
            prop_assume!(xi.iter().map(|v| v * v).sum::<f64>() > 1e-6);
            let pr = projection_symbol(xi).unwrap();
            let sq = Tensor::from_fn(n, |i, j| (0..n).map(|l| pr.get(i, l) * pr.get(l, j)).sum());
            prop_assert!(sq.max_abs_diff(&pr) < 1e-14);
            for i in 0..n {
                let v: f64 = (0..n).map(|j| pr.get(i, j) * xi[j]).sum();
                prop_assert!(v.abs() < 1e-13);
            }
            let tr: f64 = (0..n).map(|i| pr.get(i, i)).sum();
            prop_assert!((tr - (n as f64 - 1.0)).abs() < 1e-14);
        }
    }
}
