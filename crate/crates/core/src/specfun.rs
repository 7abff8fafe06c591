//! Complex-argument Hankel functions of the first kind and the upper-half-plane square root.
//!
//! Integer orders are evaluated in three regimes:
//! * `|z| ≤ SERIES_RADIUS`: ascending series for J and Y,
//! * `SERIES_RADIUS < |z| < ASYMPTOTIC_RADIUS`: the exact Laplace-type integral
//!   `H_ν(z) = √(2/(πz)) e^{i(z−νπ/2−π/4)} / Γ(ν+½) ∫₀^∞ e^{−s} s^{ν−½} (1 + is/(2z))^{ν−½} ds`
//!   discretized by the trapezoid rule after `s = u²`,
//! * `|z| ≥ ASYMPTOTIC_RADIUS`: the Hankel asymptotic expansion truncated at its smallest term.
//!
//! Half-integer orders use their elementary closed forms.

use crate::error::{Error, Result};
use crate::verify::fit::geometric_grid;
use crate::verify::report::{relative_drift, Relation, ReportBuilder, VerificationReport};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub type ComplexValue = Complex64;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Upper radius of the ascending-series regime for integer orders.
pub const SERIES_RADIUS: f64 = 4.0;
/// Lower radius of the asymptotic-expansion regime for integer orders.
pub const ASYMPTOTIC_RADIUS: f64 = 20.0;

// Trapezoid step and half-width in u for the Laplace integral. The integrand is analytic
// in |Im u| < √|z| ≥ 2, so the error is far below 1e-15 for |z| > SERIES_RADIUS.
const LAPLACE_STEP: f64 = 0.125;
const LAPLACE_HALF_WIDTH: f64 = 7.0;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Hankel orders supported by the public API.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HankelOrder {
    MinusHalf,
    Zero,
    Half,
    One,
    ThreeHalves,
}

impl HankelOrder {
    pub const ALL: [HankelOrder; 5] =
        [HankelOrder::MinusHalf, HankelOrder::Zero, HankelOrder::Half, HankelOrder::One, HankelOrder::ThreeHalves];

    pub fn value(self) -> f64 {
        self.twice() as f64 / 2.0
    }

    /// Exact lookup; any other real order is rejected.
    pub fn from_value(nu: f64) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|o| o.value() == nu)
            .ok_or_else(|| Error::Domain(format!("unsupported Hankel order {nu}")))
    }

    /// Order `n/2 − 1` of the Helmholtz kernel in dimension n.
    pub fn for_dimension(n: usize) -> Result<Self> {
        Self::from_value(n as f64 / 2.0 - 1.0)
    }

    fn twice(self) -> i32 {
        match self {
            HankelOrder::MinusHalf => -1,
            HankelOrder::Zero => 0,
            HankelOrder::Half => 1,
            HankelOrder::One => 2,
            HankelOrder::ThreeHalves => 3,
        }
    }
}

fn check_finite(z: Complex64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("non-finite argument {z}")))
    }
}

fn finite_or_err(v: Complex64, what: &str) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::Convergence(format!("{what} produced a non-finite value")))
    }
}

/// Square root with strictly positive imaginary part.
pub fn sqrt_upper(z: ComplexValue) -> Result<ComplexValue> {
    check_finite(z)?;
    if z.im == 0.0 && z.re >= 0.0 {
        return Err(Error::Domain(format!("sqrt_upper undefined at {z} (zero or positive real)")));
    }
    let w = z.sqrt();
    let w = if w.im < 0.0 { -w } else { w };
    debug_assert!(w.im > 0.0);
    Ok(w)
}

fn check_argument(z: Complex64) -> Result<()> {
    check_finite(z)?;
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("Hankel function is singular at z = 0".into()));
    }
    if z.im < 0.0 {
        return Err(Error::Domain(format!("Hankel argument {z} lies in the lower half-plane")));
    }
    Ok(())
}

/// H⁽¹⁾_ν(z) for a supported order, `z ≠ 0`, `Im z ≥ 0`.
pub fn hankel1(order: HankelOrder, z: ComplexValue) -> Result<ComplexValue> {
    check_argument(z)?;
    hankel_twice(order.twice(), z)
}

/// d/dz H⁽¹⁾_ν(z) = H⁽¹⁾_{ν−1}(z) − (ν/z) H⁽¹⁾_ν(z).
pub fn hankel1_derivative(order: HankelOrder, z: ComplexValue) -> Result<ComplexValue> {
    check_argument(z)?;
    let t = order.twice();
    let lower = hankel_twice(t - 2, z)?;
    let this = hankel_twice(t, z)?;
    finite_or_err(lower - this * (order.value() / z), "Hankel derivative")
}

/// H⁽¹⁾₀ and H⁽¹⁾₁ at the same argument, sharing the regime work.
pub fn hankel1_01(z: ComplexValue) -> Result<(ComplexValue, ComplexValue)> {
    check_argument(z)?;
    integer_pair(z)
}

// Order 2ν = t ∈ {−3, …, 3}; negative orders via H_{−ν} = e^{iνπ} H_ν.
fn hankel_twice(t: i32, z: Complex64) -> Result<Complex64> {
    let v = match t {
        -3 => -I * half_integer(3, z),
        -2 => -integer_pair(z)?.1,
        -1 => half_integer(-1, z),
        0 => integer_pair(z)?.0,
        1 => half_integer(1, z),
        2 => integer_pair(z)?.1,
        3 => half_integer(3, z),
        _ => return Err(Error::Domain(format!("unsupported Hankel order {}", t as f64 / 2.0))),
    };
    finite_or_err(v, "Hankel evaluation")
}

fn half_integer(t: i32, z: Complex64) -> Complex64 {
    let pref = (2.0 / (PI * z)).sqrt() * (I * z).exp();
    match t {
        -1 => pref,
        1 => -I * pref,
        3 => -pref * (1.0 + I / z),
        _ => unreachable!("half-integer order {t}/2 not tabulated"),
    }
}

fn integer_pair(z: Complex64) -> Result<(Complex64, Complex64)> {
    let r = z.norm();
    if r <= SERIES_RADIUS {
        series_pair(z)
    } else if r < ASYMPTOTIC_RADIUS {
        Ok((laplace_integral(0, z), laplace_integral(1, z)))
    } else {
        Ok((asymptotic(0, z)?, asymptotic(1, z)?))
    }
}

fn series_pair(z: Complex64) -> Result<(Complex64, Complex64)> {
    let w = -z * z / 4.0;
    let half = z / 2.0;
    // term_m = w^m/(m!)² for J0 and w^m/(m!(m+1)!) for J1/(z/2).
    let mut t0 = Complex64::new(1.0, 0.0);
    let mut t1 = Complex64::new(1.0, 0.0);
    let mut j0 = t0;
    let mut j1s = t1;
    let mut y0s = Complex64::new(0.0, 0.0);
    // Σ (H_m + H_{m+1}) w^m/(m!(m+1)!), starting with m = 0: H_0 + H_1 = 1.
    let mut y1s = Complex64::new(1.0, 0.0);
    let mut harmonic = 0.0;
    let mut converged = false;
    for m in 1..200 {
        let mf = m as f64;
        t0 = t0 * w / (mf * mf);
        t1 = t1 * w / (mf * (mf + 1.0));
        let h_next = harmonic + 1.0 / mf;
        let h_after = h_next + 1.0 / (mf + 1.0);
        j0 += t0;
        j1s += t1;
        y0s += t0 * h_next;
        y1s += t1 * (h_next + h_after);
        harmonic = h_next;
        let scale = j0.norm().max(y0s.norm()).max(1.0);
        if t0.norm() * (1.0 + harmonic) < 1e-17 * scale && t1.norm() * (1.0 + harmonic) < 1e-17 * scale {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence(format!("Bessel series did not converge at z = {z}")));
    }
    let j1 = half * j1s;
    let lg = half.ln() + EULER_GAMMA;
    let y0 = (2.0 / PI) * (lg * j0 - y0s);
    let y1 = -2.0 / (PI * z) + (2.0 / PI) * lg * j1 - (z / (2.0 * PI)) * y1s;
    Ok((j0 + I * y0, j1 + I * y1))
}

fn laplace_integral(nu: i32, z: Complex64) -> Complex64 {
    let steps = (LAPLACE_HALF_WIDTH / LAPLACE_STEP).round() as usize;
    let c = I / (2.0 * z);
    let f = |u: f64| -> Complex64 {
        let u2 = u * u;
        let base = 1.0 + c * u2;
        let g = if nu == 0 { 1.0 / base.sqrt() } else { base.sqrt() * u2 };
        g * (-u2).exp()
    };
    let mut sum = f(0.0);
    for j in 1..=steps {
        sum += 2.0 * f(j as f64 * LAPLACE_STEP);
    }
    let integral = sum * LAPLACE_STEP;
    // Γ(½) = √π, Γ(3/2) = √π/2.
    let gamma = if nu == 0 { PI.sqrt() } else { PI.sqrt() / 2.0 };
    let phase = I * (z - nu as f64 * PI / 2.0 - PI / 4.0);
    (2.0 / (PI * z)).sqrt() * phase.exp() * integral / gamma
}

fn asymptotic(nu: i32, z: Complex64) -> Result<Complex64> {
    let mu = 4.0 * (nu * nu) as f64;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut last = f64::INFINITY;
    let mut converged = false;
    for k in 1..200 {
        let kf = k as f64;
        let next = term * I * (mu - (2.0 * kf - 1.0).powi(2)) / (8.0 * kf * z);
        let size = next.norm();
        if size > last {
            break;
        }
        sum += next;
        term = next;
        last = size;
        if size < 1e-17 * sum.norm() {
            converged = true;
            break;
        }
    }
    if !converged && last > 1e-13 * sum.norm() {
        return Err(Error::Convergence(format!("asymptotic expansion stalled at z = {z}")));
    }
    let phase = I * (z - nu as f64 * PI / 2.0 - PI / 4.0);
    Ok((2.0 / (PI * z)).sqrt() * phase.exp() * sum)
}

/// Sample design for [`check_hankel_bounds`]: points on rays `arg z = θ` at geometrically
/// spaced radii in a large-argument and a small-argument window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HankelSampleSet {
    pub angles: Vec<f64>,
    pub large: (f64, f64),
    pub small: (f64, f64),
    pub per_ray: usize,
}

impl Default for HankelSampleSet {
    /// The small window stops at |z| = 1/2 because log|z| vanishes at |z| = 1.
    fn default() -> Self {
        HankelSampleSet { angles: vec![PI / 4.0, PI / 2.0, 3.0 * PI / 4.0], large: (1.0, 30.0), small: (1e-6, 0.5), per_ray: 25 }
    }
}

impl HankelSampleSet {
    /// Same windows with every radial gap halved.
    pub fn refined(&self) -> Self {
        HankelSampleSet { per_ray: 2 * self.per_ray - 1, ..self.clone() }
    }

    fn points(&self, window: (f64, f64)) -> Vec<Complex64> {
        let radii = geometric_grid(window.0, window.1, self.per_ray);
        self.angles.iter().flat_map(|&th| radii.iter().map(move |&r| Complex64::from_polar(r, th))).collect()
    }
}

fn bound_constants(order: HankelOrder, set: &HankelSampleSet) -> Result<(f64, f64)> {
    let nu = order.value();
    let mut large: f64 = 0.0;
    for z in set.points(set.large) {
        let h = hankel1(order, z)?;
        large = large.max(h.norm() * z.norm().sqrt() * z.im.exp());
    }
    let mut small: f64 = 0.0;
    for z in set.points(set.small) {
        let h = hankel1(order, z)?;
        let weight = if nu == 0.0 { 1.0 / z.norm().ln().abs() } else { z.norm().powf(nu.abs()) };
        small = small.max(h.norm() * weight);
    }
    Ok((large, small))
}

/// Fits the constants of `|H_ν(z)| ≤ C|z|^{−1/2}e^{−Im z}` (large |z|) and
/// `|H_ν(z)| ≤ C|z|^{−|ν|}` (ν ≠ 0) or `≤ C|log|z||` (ν = 0) (small |z|);
/// passes iff both stay within 10% when the sample set is refined.
pub fn check_hankel_bounds(order: HankelOrder, set: &HankelSampleSet) -> VerificationReport {
    let mut b = ReportBuilder::new("hankel-bounds");
    b.param("order", order.value());
    b.describe(format!(
        "{} rays, large |z| in [{}, {}], small |z| in [{:e}, {}], {} radii per ray (refined: {})",
        set.angles.len(),
        set.large.0,
        set.large.1,
        set.small.0,
        set.small.1,
        set.per_ray,
        set.refined().per_ray
    ));
    match (bound_constants(order, set), bound_constants(order, &set.refined())) {
        (Ok((l0, s0)), Ok((l1, s1))) => {
            b.constant("C_large", l0).constant("C_large_refined", l1);
            b.constant("C_small", s0).constant("C_small_refined", s1);
            b.criterion("C_large_drift", relative_drift(l0, l1), Relation::AtMost(0.10));
            b.criterion("C_small_drift", relative_drift(s0, s1), Relation::AtMost(0.10));
        }
        (Err(e), _) | (_, Err(e)) => {
            b.failure("evaluation", &e.to_string());
        }
    }
    b.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn sqrt_upper_examples() {
        assert!((sqrt_upper(c(-1.0, 0.0)).unwrap() - c(0.0, 1.0)).norm() < 1e-16);
        assert!((sqrt_upper(c(-4.0, 0.0)).unwrap() - c(0.0, 2.0)).norm() < 1e-15);
        let w = sqrt_upper(c(0.0, -1.0)).unwrap();
        let h = 0.5f64.sqrt();
        assert!((w - c(-h, h)).norm() < 1e-15);
        assert!((w * w - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn sqrt_upper_rejects_positive_axis() {
        assert!(matches!(sqrt_upper(c(0.0, 0.0)), Err(Error::Domain(_))));
        assert!(matches!(sqrt_upper(c(2.0, 0.0)), Err(Error::Domain(_))));
        assert!(matches!(sqrt_upper(c(f64::NAN, 1.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn orders_round_trip() {
        for o in HankelOrder::ALL {
            assert_eq!(HankelOrder::from_value(o.value()).unwrap(), o);
        }
        assert!(HankelOrder::from_value(2.0).is_err());
        assert!(HankelOrder::from_value(0.25).is_err());
        assert_eq!(HankelOrder::for_dimension(3).unwrap(), HankelOrder::Half);
        assert_eq!(HankelOrder::for_dimension(2).unwrap(), HankelOrder::Zero);
    }

    #[test]
    fn hankel0_at_one() {
        // J0(1) = 0.7651976865579666, Y0(1) = 0.08825696421567696.
        let h = hankel1(HankelOrder::Zero, c(1.0, 0.0)).unwrap();
        assert!((h - c(0.765_197_686_557_966_6, 0.088_256_964_215_676_96)).norm() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(hankel1(HankelOrder::Zero, c(0.0, 0.0)), Err(Error::Domain(_))));
        assert!(matches!(hankel1(HankelOrder::One, c(1.0, -0.5)), Err(Error::Domain(_))));
        assert!(matches!(hankel1_derivative(HankelOrder::Half, c(0.0, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn half_order_matches_closed_form_identity() {
        // H_{1/2} and H_{-1/2} are related by H_{-1/2} = i H_{1/2}.
        for z in [c(0.3, 0.1), c(2.0, 5.0), c(-7.0, 0.5)] {
            let a = hankel1(HankelOrder::MinusHalf, z).unwrap();
            let b = hankel1(HankelOrder::Half, z).unwrap();
            assert!(rel(a, I * b) < 1e-15);
        }
    }

    #[test]
    fn three_halves_satisfies_recurrence() {
        // H_{3/2} = (1/z) H_{1/2} − H_{−1/2}.
        for z in [c(0.5, 0.2), c(3.0, 1.0), c(-2.0, 4.0)] {
            let lhs = hankel1(HankelOrder::ThreeHalves, z).unwrap();
            let rhs = hankel1(HankelOrder::Half, z).unwrap() / z - hankel1(HankelOrder::MinusHalf, z).unwrap();
            assert!(rel(lhs, rhs) < 1e-14);
        }
    }

    #[test]
    fn first_order_derivative_matches_difference_in_every_regime() {
        for z in [c(0.7, 0.3), c(3.9, 0.2), c(4.1, 0.2), c(12.0, 3.0), c(25.0, 1.0), c(-15.0, 2.0)] {
            let d = hankel1_derivative(HankelOrder::One, z).unwrap();
            let h = 1e-5;
            let fd = (hankel1(HankelOrder::One, z + h).unwrap() - hankel1(HankelOrder::One, z - h).unwrap()) / (2.0 * h);
            assert!(rel(d, fd) < 1e-8, "{z}: {d} vs {fd}");
        }
    }

    #[test]
    fn regime_switches_are_continuous() {
        for th in [0.0, 0.4, PI / 2.0, 2.5, PI] {
            for radius in [SERIES_RADIUS, ASYMPTOTIC_RADIUS] {
                let below = Complex64::from_polar(radius * (1.0 - 1e-12), th);
                let above = Complex64::from_polar(radius * (1.0 + 1e-12), th);
                for o in [HankelOrder::Zero, HankelOrder::One] {
                    let a = hankel1(o, below).unwrap();
                    let b = hankel1(o, above).unwrap();
                    assert!(rel(a, b) < 1e-9, "order {:?} radius {radius} angle {th}: {a} vs {b}", o);
                }
            }
        }
    }

    #[test]
    fn modulus_decreases_along_imaginary_axis() {
        let mut prev = f64::INFINITY;
        for i in 0..=290 {
            let y = 1.0 + 0.1 * i as f64;
            let v = hankel1(HankelOrder::Zero, c(0.0, y)).unwrap().norm();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn derivative_of_half_order_closed_form() {
        // d/dz[−i√(2/(πz)) e^{iz}] = −i√(2/(πz)) e^{iz} (i − 1/(2z)).
        let z = c(1.0, 0.0);
        let expected = -I * (2.0 / (PI * z)).sqrt() * (I * z).exp() * (I - 0.5 / z);
        assert!(rel(hankel1_derivative(HankelOrder::Half, z).unwrap(), expected) < 1e-15);
    }

    #[test]
    fn zero_order_derivative_is_minus_first_order() {
        let z = c(2.0, 1.0);
        let d = hankel1_derivative(HankelOrder::Zero, z).unwrap();
        assert!(rel(d, -hankel1(HankelOrder::One, z).unwrap()) < 1e-15);
        let h = 1e-4;
        let fd = (hankel1(HankelOrder::Zero, z + h).unwrap() - hankel1(HankelOrder::Zero, z - h).unwrap()) / (2.0 * h);
        assert!((d - fd).norm() < 1e-6);
    }

    #[test]
    fn bounds_report_passes_for_all_orders() {
        for o in HankelOrder::ALL {
            let r = check_hankel_bounds(o, &HankelSampleSet::default());
            assert!(r.pass, "{}", r.to_text());
        }
    }

    proptest! {
        #[test]
        fn sqrt_upper_squares_back(re in -1e3f64..1e3, im in -1e3f64..1e3) {
            prop_assume!(!(im == 0.0 && re >= 0.0));
            let z = c(re, im);
            let w = sqrt_upper(z).unwrap();
            prop_assert!(w.im > 0.0);
            prop_assert!((w * w - z).norm() <= 1e-14 * z.norm());
        }

        #[test]
        fn derivative_matches_central_difference(r in 0.5f64..10.0, th in 0.0f64..PI, oi in 0usize..5) {
            let o = HankelOrder::ALL[oi];
            let z = Complex64::from_polar(r, th);
            let h = 1e-4;
            let d = hankel1_derivative(o, z).unwrap();
            let fd = (hankel1(o, z + h).unwrap() - hankel1(o, z - h).unwrap()) / (2.0 * h);
            prop_assert!((d - fd).norm() <= 1e-6, "{} vs {}", d, fd);
        }

        #[test]
        fn conjugate_reflection(r in 0.1f64..40.0, th in 0.0f64..PI) {
            // H_ν(−z̄) = −e^{−iνπ} conj(H_ν(z)) for real ν.
            let z = Complex64::from_polar(r, th);
            let a = hankel1(HankelOrder::Zero, -z.conj()).unwrap();
            let b = -hankel1(HankelOrder::Zero, z).unwrap().conj();
            prop_assert!((a - b).norm() <= 1e-12 * b.norm().max(1e-300));
        }
    }
}
