//! The oscillatory remainder Γ⊥(x, t) = Σ_{k≠0} Gₖ(x) e^{iωkt}, ω = 2π/T.
//!
//! Gₖ decays only like 1/|k|: its algebraic part (1/λₖ)∂ᵢ∂ⱼΨ sums in closed form,
//! `Σ_{k≠0} e^{iωkt}/λₖ = (π − θ)/ω` with θ = ωt mod 2π ∈ (0, 2π) (and 0 at θ = 0), while
//! the rest `Eₖ = δΓₖ − (1/λₖ)∂ᵢ∂ⱼΓₖ` decays like e^{−Im ηₖ |x|} and is summed adaptively.

use super::laplace::{laplace_hessian_radial, steady_stokeslet_pressure, steady_stokeslet_velocity};
use super::mode::mode_radial;
use super::{polar, KernelSample, Params, SliceLocalPressure};
use crate::error::{Error, Result};
use crate::tensor::Tensor;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Default hard cap on the number of mode pairs.
pub const DEFAULT_MODE_CAP: usize = 256;
/// Adaptive stopping threshold relative to the accumulated value.
pub const ADAPTIVE_FLOOR: f64 = 1e-13;
/// Largest tolerated imaginary residue relative to the real result.
const IMAGINARY_TOLERANCE: f64 = 1e-12;

/// How the mode series is cut off.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Truncation {
    /// Algebraic part in closed form; exponential part summed until its pair norm falls below
    /// `ADAPTIVE_FLOOR` relative to the accumulated value, at most `cap` pairs.
    Adaptive { cap: usize },
    /// Exactly Σ_{0<|k|≤K} Gₖ e^{iωkt}, matching a time grid with 2K+1 samples.
    Fixed(usize),
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation::Adaptive { cap: DEFAULT_MODE_CAP }
    }
}

/// The adaptive rule did not reach its threshold within the cap.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationWarning {
    pub cap: usize,
    /// Last pair norm relative to the accumulated value.
    pub last_relative: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RemainderSample {
    pub value: Tensor<f64>,
    pub modes: usize,
    /// max |Im| of the summed tensor before taking the real part.
    pub imaginary_residue: f64,
    pub warning: Option<TruncationWarning>,
}

/// `Σ_{k≠0} e^{iωkt}/λₖ`, the T-periodic sawtooth `(π − θ)/ω`, zero at its jump.
pub fn sawtooth(params: &Params, t: f64) -> f64 {
    let theta = (params.frequency() * t).rem_euclid(2.0 * PI);
    if theta == 0.0 {
        0.0
    } else {
        (PI - theta) / params.frequency()
    }
}

/// Exponentially decaying part Eₖ = Gₖ − (1/λₖ)∂∂Ψ as radial coefficients.
fn exponential_part(params: &Params, k: i64, r: f64, lap: (f64, f64)) -> Result<(Complex64, Complex64)> {
    let (a, b) = mode_radial(params, k, r)?.stokes();
    let inv = 1.0 / params.lambda(k);
    Ok((a - inv * lap.0, b - inv * lap.1))
}

/// Γ⊥(x, t) as a real n×n matrix, with the conjugate-pair realness asserted.
pub fn remainder_kernel(params: &Params, x: &[f64], t: f64, truncation: Truncation) -> Result<RemainderSample> {
    let (r, u) = polar(params, x)?;
    if !t.is_finite() {
        return Err(Error::Domain("non-finite time".into()));
    }
    let w = params.frequency();
    let mut acc_a = Complex64::new(0.0, 0.0);
    let mut acc_b = Complex64::new(0.0, 0.0);
    let mut used = 0;
    let mut warning = None;
    match truncation {
        Truncation::Fixed(kmax) => {
            if kmax < 1 {
                return Err(Error::Config("mode truncation must be at least 1".into()));
            }
            for k in 1..=kmax as i64 {
                let ph = Complex64::from_polar(1.0, w * k as f64 * t);
                let (pa, pb) = mode_radial(params, k, r)?.stokes();
                let (ma, mb) = mode_radial(params, -k, r)?.stokes();
                acc_a += pa * ph + ma * ph.conj();
                acc_b += pb * ph + mb * ph.conj();
            }
            used = kmax;
        }
        Truncation::Adaptive { cap } => {
            if cap < 1 {
                return Err(Error::Config("mode cap must be at least 1".into()));
            }
            let lap = laplace_hessian_radial(params, r)?;
            let s = sawtooth(params, t);
            acc_a += lap.0 * s;
            acc_b += lap.1 * s;
            let mut last = f64::INFINITY;
            let mut converged = false;
            for k in 1..=cap as i64 {
                let ph = Complex64::from_polar(1.0, w * k as f64 * t);
                let (pa, pb) = exponential_part(params, k, r, lap)?;
                let (ma, mb) = exponential_part(params, -k, r, lap)?;
                acc_a += pa * ph + ma * ph.conj();
                acc_b += pb * ph + mb * ph.conj();
                used = k as usize;
                let size = pa.norm() + pb.norm() + ma.norm() + mb.norm();
                let scale = acc_a.norm() + acc_b.norm();
                last = size / scale;
                if size < ADAPTIVE_FLOOR * scale {
                    converged = true;
                    break;
                }
            }
            if !converged {
                warning = Some(TruncationWarning { cap, last_relative: last });
            }
        }
    }
    let full = Tensor::isotropic(acc_a, acc_b, &u);
    let value = full.re();
    let residue = full.im().max_abs();
    if residue > IMAGINARY_TOLERANCE * value.max_abs().max(f64::MIN_POSITIVE) {
        return Err(Error::Convergence(format!(
            "remainder kernel imaginary residue {residue:e} exceeds {IMAGINARY_TOLERANCE:e} of {:e}",
            value.max_abs()
        )));
    }
    Ok(RemainderSample { value, modes: used, imaginary_residue: residue, warning })
}

/// Γ = Γ̄ ⊗ 1 + Γ⊥ (velocity) together with the slice-local steady pressure.
#[derive(Clone, Debug, PartialEq)]
pub struct TpFundamentalSample {
    pub kernel: KernelSample,
    pub modes: usize,
    pub warning: Option<TruncationWarning>,
}

pub fn tp_fundamental_solution(
    params: &Params,
    x: &[f64],
    t: f64,
    truncation: Truncation,
) -> Result<TpFundamentalSample> {
    let steady = steady_stokeslet_velocity(params, x)?;
    let rem = remainder_kernel(params, x, t, truncation)?;
    let pressure = SliceLocalPressure { values: steady_stokeslet_pressure(params, x)? };
    Ok(TpFundamentalSample {
        kernel: KernelSample { velocity: steady + rem.value, pressure },
        modes: rem.modes,
        warning: rem.warning,
    })
}

/// Precomputed radial mode data of Γ⊥ at a fixed radius, for evaluating many times at once.
/// Uses E₋ₖ = conj(Eₖ) (asserted separately by the structural checks).
#[derive(Clone, Debug)]
pub struct RemainderSeries {
    pub n: usize,
    pub r: f64,
    pub period: f64,
    /// `(a, b)` of ∂ᵢ∂ⱼΨ at r.
    pub laplace: (f64, f64),
    /// Eₖ for k = 1, 2, …
    pub modes: Vec<(Complex64, Complex64)>,
    pub converged: bool,
}

impl RemainderSeries {
    /// Sums Eₖ until |Eₖ| < floor·(|∂∂Ψ| T/2 + |E₁|), at most `cap` modes.
    pub fn new(params: &Params, r: f64, cap: usize, floor: f64) -> Result<Self> {
        let lap = laplace_hessian_radial(params, r)?;
        let base = (lap.0.abs() + lap.1.abs()) * params.period() / 2.0;
        let mut modes = Vec::new();
        let mut converged = false;
        let mut scale = base;
        for k in 1..=cap as i64 {
            let e = exponential_part(params, k, r, lap)?;
            let size = e.0.norm() + e.1.norm();
            if k == 1 {
                scale += size;
            }
            modes.push(e);
            if size < floor * scale {
                converged = true;
                break;
            }
        }
        Ok(RemainderSeries { n: params.n(), r, period: params.period(), laplace: lap, modes, converged })
    }

    fn frequency(&self) -> f64 {
        2.0 * PI / self.period
    }

    /// Radial coefficients `(A, B)` of Γ⊥ = A δ + B x̂x̂ at time t.
    pub fn radial_at(&self, t: f64) -> (f64, f64) {
        let w = self.frequency();
        let theta = (w * t).rem_euclid(2.0 * PI);
        let s = if theta == 0.0 { 0.0 } else { (PI - theta) / w };
        let mut a = self.laplace.0 * s;
        let mut b = self.laplace.1 * s;
        for (i, e) in self.modes.iter().enumerate() {
            let ph = Complex64::from_polar(1.0, w * (i + 1) as f64 * t);
            a += 2.0 * (e.0 * ph).re;
            b += 2.0 * (e.1 * ph).re;
        }
        (a, b)
    }

    /// Frobenius norm of Aδ + Bx̂x̂.
    pub fn frobenius(&self, a: f64, b: f64) -> f64 {
        ((self.n as f64 - 1.0) * a * a + (a + b) * (a + b)).sqrt()
    }

    /// `(A, B)` at the midpoints t_l = (l + ½)T/nt, l = 0..nt, via one FFT.
    pub fn sample_midpoints(&self, nt: usize) -> Vec<(f64, f64)> {
        let w = self.frequency();
        let mut ca = vec![Complex64::new(0.0, 0.0); nt];
        let mut cb = vec![Complex64::new(0.0, 0.0); nt];
        for (i, e) in self.modes.iter().enumerate() {
            let k = i + 1;
            let shift = Complex64::from_polar(1.0, PI * k as f64 / nt as f64);
            ca[k % nt] += e.0 * shift;
            cb[k % nt] += e.1 * shift;
        }
        let fft = FftPlanner::new().plan_fft_inverse(nt);
        fft.process(&mut ca);
        fft.process(&mut cb);
        (0..nt)
            .map(|l| {
                let theta = 2.0 * PI * (l as f64 + 0.5) / nt as f64;
                let s = (PI - theta) / w;
                (self.laplace.0 * s + 2.0 * ca[l].re, self.laplace.1 * s + 2.0 * cb[l].re)
            })
            .collect()
    }

    /// ‖Γ⊥(x, ·)‖_{L²(𝕋)} by Parseval: Σ_{k≠0} |Gₖ|²_F, with the tail |k| beyond the stored modes
    /// summed through Σ_{k>K} k⁻² (Gₖ is algebraic there up to exponentially small terms).
    pub fn l2_norm_parseval(&self) -> f64 {
        let w = self.frequency();
        let nm1 = self.n as f64 - 1.0;
        let mut sum = 0.0;
        for (i, e) in self.modes.iter().enumerate() {
            let lam = Complex64::new(0.0, w * (i + 1) as f64);
            let a = e.0 + self.laplace.0 / lam;
            let b = e.1 + self.laplace.1 / lam;
            sum += 2.0 * (nm1 * a.norm_sqr() + (a + b).norm_sqr());
        }
        let (la, lb) = self.laplace;
        let alg = nm1 * la * la + (la + lb) * (la + lb);
        sum += 2.0 * alg / (w * w) * inverse_square_tail(self.modes.len());
        sum.sqrt()
    }
}

/// Σ_{k>K} k⁻² by Euler–Maclaurin about K + 1.
fn inverse_square_tail(kmax: usize) -> f64 {
    let mut direct = 0.0;
    let mut k = kmax + 1;
    while k < 40 {
        direct += 1.0 / (k * k) as f64;
        k += 1;
    }
    let x = k as f64;
    direct + 1.0 / x + 1.0 / (2.0 * x * x) + 1.0 / (6.0 * x.powi(3)) - 1.0 / (30.0 * x.powi(5)) + 1.0 / (42.0 * x.powi(7))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(n: usize) -> Params {
        Params::new(n, 2.0 * PI).unwrap()
    }

    #[test]
    fn inverse_square_tail_matches_zeta() {
        let zeta2 = PI * PI / 6.0;
        for kmax in [0usize, 1, 5, 19, 20, 300] {
            let head: f64 = (1..=kmax).map(|k| 1.0 / (k * k) as f64).sum();
            assert!((head + inverse_square_tail(kmax) - zeta2).abs() < 1e-14, "{kmax}");
        }
    }

    #[test]
    fn sawtooth_is_the_mode_sum() {
        let pr = Params::new(2, 3.0).unwrap();
        let t = 0.7;
        let direct: f64 = (1..200000)
            .map(|k| {
                let kf = k as f64;
                2.0 * (pr.frequency() * kf * t).sin() / (pr.frequency() * kf)
            })
            .sum();
        assert!((sawtooth(&pr, t) - direct).abs() < 1e-4);
        assert_eq!(sawtooth(&pr, 0.0), 0.0);
        assert_eq!(sawtooth(&pr, 3.0), 0.0);
    }

    #[test]
    fn resummed_matches_truncated_sum_where_modes_are_small() {
        // At |x| = 3 the algebraic tail of the plain sum is O(1/K), so compare against a
        // large-K plain sum plus the analytically known tail of the algebraic part.
        for n in [2usize, 3] {
            let pr = p(n);
            let mut x = vec![0.0; n];
            x[0] = 3.0;
            let t = 1.3;
            let kk = 400usize;
            let plain = remainder_kernel(&pr, &x, t, Truncation::Fixed(kk)).unwrap().value;
            let lap = laplace_hessian_radial(&pr, 3.0).unwrap();
            let tail: f64 = (kk + 1..2_000_000)
                .map(|k| 2.0 * (pr.frequency() * k as f64 * t).sin() / (pr.frequency() * k as f64))
                .sum();
            let u: Vec<f64> = x.iter().map(|v| v / 3.0).collect();
            let corrected = plain + Tensor::isotropic(lap.0 * tail, lap.1 * tail, &u);
            let res = remainder_kernel(&pr, &x, t, Truncation::Adaptive { cap: 4096 }).unwrap();
            assert!(res.warning.is_none());
            assert!(res.value.max_abs_diff(&corrected) < 1e-6 * res.value.max_abs(), "n={n}");
        }
    }

    #[test]
    fn series_agrees_with_point_evaluation() {
        for n in [2usize, 3] {
            let pr = p(n);
            let series = RemainderSeries::new(&pr, 2.0, 1 << 14, ADAPTIVE_FLOOR).unwrap();
            assert!(series.converged);
            let mut x = vec![0.0; n];
            x[n - 1] = 2.0;
            for t in [0.1, 2.0, 5.9] {
                let direct = remainder_kernel(&pr, &x, t, Truncation::Adaptive { cap: 1 << 14 }).unwrap().value;
                let (a, b) = series.radial_at(t);
                let unit: Vec<f64> = x.iter().map(|v| v / 2.0).collect();
                let via = Tensor::isotropic(a, b, &unit);
                let d = direct.max_abs_diff(&via) / direct.max_abs();
                assert!(d < 1e-11, "n={n} t={t}: {d:e}");
            }
            let nt = 64;
            let samples = series.sample_midpoints(nt);
            for (l, &(a, b)) in samples.iter().enumerate() {
                let t = (l as f64 + 0.5) * pr.period() / nt as f64;
                let (ea, eb) = series.radial_at(t);
                assert!((a - ea).abs() + (b - eb).abs() < 1e-13 * (ea.abs() + eb.abs()).max(1e-3));
            }
        }
    }

    #[test]
    fn parseval_matches_time_quadrature() {
        for n in [2usize, 3] {
            let series = RemainderSeries::new(&p(n), 3.0, 1 << 14, ADAPTIVE_FLOOR).unwrap();
            let nt = 1 << 16;
            let mean: f64 = series
                .sample_midpoints(nt)
                .iter()
                .map(|&(a, b)| series.frobenius(a, b).powi(2))
                .sum::<f64>()
                / nt as f64;
            let parseval = series.l2_norm_parseval();
            assert!((mean.sqrt() - parseval).abs() < 1e-6 * parseval, "n={n}: {} vs {parseval}", mean.sqrt());
        }
    }

    #[test]
    fn truncation_warning_when_cap_too_small() {
        let res = remainder_kernel(&p(3), &[0.5, 0.0, 0.0], 1.0, Truncation::Adaptive { cap: 4 }).unwrap();
        let w = res.warning.unwrap();
        assert_eq!(w.cap, 4);
        assert!(w.last_relative > ADAPTIVE_FLOOR);
    }

    #[test]
    fn fundamental_solution_time_average_is_stokeslet() {
        for n in [2usize, 3] {
            let pr = p(n);
            let mut x = vec![0.0; n];
            x[0] = 4.5;
            x[1] = -1.5;
            let nt = 128;
            let mut avg = Tensor::<f64>::zeros(n);
            for l in 0..nt {
                let t = pr.period() * l as f64 / nt as f64;
                let s = tp_fundamental_solution(&pr, &x, t, Truncation::Adaptive { cap: 4096 }).unwrap();
                assert!(s.kernel.velocity.is_symmetric());
                avg = avg + s.kernel.velocity.scale(1.0 / nt as f64);
            }
            let st = steady_stokeslet_velocity(&pr, &x).unwrap();
            assert!(avg.max_abs_diff(&st) < 1e-12 * st.max_abs().max(1.0), "n={n}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn even_symmetric_and_real(x in prop::collection::vec(-5.0f64..5.0, 3), t in 0.0f64..6.3, n in 2usize..4) {
            let x = &x[..n];
            let r2: f64 = x.iter().map(|v| v * v).sum();
            prop_assume!(r2 > 0.25);
            let pr = p(n);
            let a = remainder_kernel(&pr, x, t, Truncation::Adaptive { cap: 1 << 13 }).unwrap();
            let neg: Vec<f64> = x.iter().map(|v| -v).collect();
            let b = remainder_kernel(&pr, &neg, t, Truncation::Adaptive { cap: 1 << 13 }).unwrap();
            prop_assert_eq!(a.value, b.value);
            prop_assert!(a.value.is_symmetric());
            prop_assert!(a.imaginary_residue <= 1e-12 * a.value.max_abs());
        }
    }
}
