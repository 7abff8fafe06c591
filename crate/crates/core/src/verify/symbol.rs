//! Discrete Fourier transform of the per-mode Stokes kernel Gₖ against its symbol
//! P(ξ)/(|ξ|² + λₖ).
//!
//! The kernel is sampled on an origin-centred lattice h·ℤⁿ ∩ [−L, L)ⁿ and transformed with the
//! weight hⁿ. The slowly decaying part (1/λₖ)∂∂Φ_σ, with Φ_σ the Laplace kernel smoothed by a
//! unit Gaussian, is removed before sampling and its exact transform −ξᵢξⱼe^{−σ²|ξ|²/2}/(λₖ|ξ|²)
//! added back, so the sampled remainder decays like e^{−Im η r} and periodization is negligible.
//! The origin sample carries the weight that makes the lattice sum exact for the singular part.

use super::report::{Relation, ReportBuilder, VerificationReport};
use crate::error::{Error, Result};
use crate::kernels::{mode_radial, Params};
use crate::specfun::EULER_GAMMA;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Σ'_{m∈ℤ³} 1/|m| continued analytically: h³ Σ'_{x∈hℤ³} f(x)/|x| − ∫ f/|x| ≈ Z·h² f(0).
pub const CUBIC_LATTICE_ZETA: f64 = -2.837_297_479_480_619_6;
/// Constant of the lattice sum of ln|x| on ℤ²: −½ln(2π) − ln(Γ(¼)²/(2π√2)).
pub const SQUARE_LATTICE_LOG_CONSTANT: f64 = -1.310_532_925_911_51;
/// Width of the Gaussian smoothing of the subtracted far field.
pub const SMOOTHING_WIDTH: f64 = 1.0;

/// `(Φ', Φ'')` of the Laplace kernel convolved with the centred Gaussian of width σ.
pub fn smoothed_laplace_derivatives(n: usize, r: f64, sigma: f64) -> (f64, f64) {
    if n == 3 {
        let s2 = sigma * 2f64.sqrt();
        let a = r / s2;
        let e = libm::erf(a);
        let de = 2.0 / PI.sqrt() * (-a * a).exp() / s2;
        let d2e = de * (-2.0 * a) / s2;
        let p1 = (-e / (r * r) + de / r) / (4.0 * PI);
        let p2 = (2.0 * e / r.powi(3) - 2.0 * de / (r * r) + d2e / r) / (4.0 * PI);
        (p1, p2)
    } else {
        let em = (-r * r / (2.0 * sigma * sigma)).exp();
        let p1 = -(1.0 - em) / (2.0 * PI * r);
        let p2 = (1.0 - em) / (2.0 * PI * r * r) - em / (2.0 * PI * sigma * sigma);
        (p1, p2)
    }
}

/// Origin weight of the diagonal entries: the lattice correction of the 1/r (n = 3) or log r
/// (n = 2) singularity of Gₖ, its regular value at 0 and the removed far field (1/λ)∂∂Φ(0).
pub fn origin_weight(params: &Params, k: i64, h: f64) -> Result<Complex64> {
    let n = params.n();
    let lambda = params.lambda(k);
    let eta = params.eta(k)?;
    let g0 = (2.0 * PI * SMOOTHING_WIDTH * SMOOTHING_WIDTH).powf(-(n as f64) / 2.0);
    let far = g0 / (n as f64 * lambda);
    let i = Complex64::new(0.0, 1.0);
    Ok(if n == 3 {
        -CUBIC_LATTICE_ZETA / (6.0 * PI * h) + i * eta / (6.0 * PI) + far
    } else {
        let c = ((eta / 2.0).ln() + EULER_GAMMA) / (2.0 * PI) - 0.25 * i;
        -(h.ln() + SQUARE_LATTICE_LOG_CONSTANT) / (4.0 * PI) - c / 2.0 + far
    })
}

/// In-place unnormalized forward DFT of an N×…×N array, axis 0 slowest.
fn fft_nd(data: &mut [Complex64], n: usize, size: usize) {
    let fft = FftPlanner::new().plan_fft_forward(size);
    let mut line = vec![Complex64::new(0.0, 0.0); size];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for axis in 0..n {
        let stride = size.pow((n - 1 - axis) as u32);
        let block = stride * size;
        for start in 0..data.len() / size {
            let (outer, inner) = (start / stride, start % stride);
            let base = outer * block + inner;
            for (j, v) in line.iter_mut().enumerate() {
                *v = data[base + j * stride];
            }
            fft.process_with_scratch(&mut line, &mut scratch);
            for (j, v) in line.iter().enumerate() {
                data[base + j * stride] = *v;
            }
        }
    }
}

fn signed(m: usize, size: usize) -> i64 {
    if m < size / 2 {
        m as i64
    } else {
        m as i64 - size as i64
    }
}

fn multi(flat: usize, n: usize, size: usize) -> [i64; 3] {
    let mut out = [0; 3];
    let mut rest = flat;
    for a in (0..n).rev() {
        out[a] = signed(rest % size, size);
        rest /= size;
    }
    out
}

/// Outcome of one transform: relative ℓ² error on the band and the largest sampled entry on
/// the box boundary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolError {
    pub relative_error: f64,
    pub boundary_magnitude: f64,
}

/// Compares hⁿ·DFT of the sampled Gₖ with P/(|ξ|² + λₖ) over 0 < |ξ| ≤ π/(4h), all i ≤ j.
pub fn symbol_error(params: &Params, k: i64, half_length: f64, size: usize) -> Result<SymbolError> {
    if k == 0 {
        return Err(Error::Config("the symbol comparison needs k ≠ 0".into()));
    }
    if size < 16 || size % 2 != 0 {
        return Err(Error::Config(format!("grid size must be even and at least 16, got {size}")));
    }
    let n = params.n();
    let h = 2.0 * half_length / size as f64;
    let lambda = params.lambda(k);
    let total = size.pow(n as u32);
    // Radial (A, B) of Gₖ − (1/λ)∂∂Φ_σ at every lattice point, (0, 0) at the origin.
    let radial: Vec<(Complex64, Complex64)> = (0..total)
        .into_par_iter()
        .map(|s| {
            let m = multi(s, n, size);
            let r = h * (0..n).map(|a| (m[a] * m[a]) as f64).sum::<f64>().sqrt();
            if s == 0 {
                return Ok((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
            }
            let (a, b) = mode_radial(params, k, r)?.stokes();
            let (p1, p2) = smoothed_laplace_derivatives(n, r, SMOOTHING_WIDTH);
            Ok((a - p1 / (r * lambda), b - (p2 - p1 / r) / lambda))
        })
        .collect::<Result<_>>()?;
    let boundary_magnitude = (0..total)
        .filter(|&s| multi(s, n, size)[..n].contains(&-(size as i64 / 2)))
        .map(|s| radial[s].0.norm().max(radial[s].1.norm()))
        .fold(0.0, f64::max);
    let origin = origin_weight(params, k, h)?;
    let dxi = PI / half_length;
    let band2 = (PI / (4.0 * h)).powi(2);
    let weight = h.powi(n as i32);
    let sigma2 = SMOOTHING_WIDTH * SMOOTHING_WIDTH;
    let (mut err2, mut ref2) = (0.0, 0.0);
    let mut data = vec![Complex64::new(0.0, 0.0); total];
    for i in 0..n {
        for j in i..n {
            data.par_iter_mut().enumerate().for_each(|(s, v)| {
                if s == 0 {
                    *v = if i == j { origin } else { Complex64::new(0.0, 0.0) };
                    return;
                }
                let m = multi(s, n, size);
                let r2 = (0..n).map(|a| (m[a] * m[a]) as f64).sum::<f64>();
                let (a, b) = radial[s];
                let xx = m[i] as f64 * m[j] as f64 / r2;
                *v = b * xx + if i == j { a } else { Complex64::new(0.0, 0.0) };
            });
            fft_nd(&mut data, n, size);
            for (s, v) in data.iter().enumerate() {
                let m = multi(s, n, size);
                let xi2 = dxi * dxi * (0..n).map(|a| (m[a] * m[a]) as f64).sum::<f64>();
                if xi2 == 0.0 || xi2 > band2 {
                    continue;
                }
                let riesz = dxi * dxi * m[i] as f64 * m[j] as f64 / xi2;
                let delta = if i == j { 1.0 } else { 0.0 };
                let exact = (delta - riesz) / (xi2 + lambda);
                let discrete = weight * v - riesz / lambda * (-sigma2 * xi2 / 2.0).exp();
                // Off-diagonal entries appear twice in the full tensor.
                let mult = if i == j { 1.0 } else { 2.0 };
                err2 += mult * (discrete - exact).norm_sqr();
                ref2 += mult * exact.norm_sqr();
            }
        }
    }
    Ok(SymbolError { relative_error: (err2 / ref2).sqrt(), boundary_magnitude })
}

/// One (n, k) comparison at a sequence of increasing grid sizes on a fixed box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolCase {
    pub k: i64,
    pub half_length: f64,
    pub sizes: Vec<usize>,
}

/// Cases for the given dimension: the box shrinks with k because Gₖ decays like e^{−√(k/2)r}.
pub fn default_symbol_cases(n: usize) -> Vec<SymbolCase> {
    if n == 3 {
        vec![
            SymbolCase { k: 1, half_length: 28.0, sizes: vec![128, 192] },
            SymbolCase { k: 8, half_length: 10.0, sizes: vec![128, 256] },
        ]
    } else {
        vec![
            SymbolCase { k: 1, half_length: 30.0, sizes: vec![256, 512] },
            SymbolCase { k: 8, half_length: 12.0, sizes: vec![256, 512] },
        ]
    }
}

/// The transformed kernel must match its symbol to 1e−3 on the finest grid of each case, the
/// error must decrease under refinement and the kernel must be negligible on the box boundary.
pub fn check_symbol_transform(params: &Params, cases: &[SymbolCase]) -> Result<VerificationReport> {
    if cases.is_empty() || cases.iter().any(|c| c.sizes.len() < 2 || c.sizes.windows(2).any(|w| w[1] <= w[0])) {
        return Err(Error::Config("each symbol case needs at least two increasing grid sizes".into()));
    }
    let mut b = ReportBuilder::new("symbol-transform");
    b.param("n", params.n() as f64).param("T", params.period()).param("smoothing_width", SMOOTHING_WIDTH);
    b.describe(
        cases
            .iter()
            .map(|c| format!("k = {} on [−{}, {}) with N = {:?}", c.k, c.half_length, c.half_length, c.sizes))
            .collect::<Vec<_>>()
            .join("; "),
    );
    let mut rows = Vec::new();
    let mut boundary: f64 = 0.0;
    for case in cases {
        let errors: Vec<SymbolError> =
            case.sizes.iter().map(|&s| symbol_error(params, case.k, case.half_length, s)).collect::<Result<_>>()?;
        for (s, e) in case.sizes.iter().zip(&errors) {
            rows.push(vec![case.k as f64, case.half_length, *s as f64, e.relative_error, e.boundary_magnitude]);
            boundary = boundary.max(e.boundary_magnitude);
        }
        let last = errors[errors.len() - 1].relative_error;
        let prev = errors[errors.len() - 2].relative_error;
        b.criterion(&format!("finest_error_k{}", case.k), last, Relation::AtMost(1e-3));
        b.criterion(&format!("refinement_ratio_k{}", case.k), last / prev, Relation::AtMost(1.0));
    }
    b.criterion("boundary_magnitude", boundary, Relation::AtMost(1e-10));
    b.table("errors", &["k", "L", "N", "relative_error", "boundary_magnitude"], rows);
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_lattice_zeta_by_ewald() {
        // Σ'_{m} 1/|m| split at Ewald parameter π: both sums converge like e^{−π|m|²}.
        let mut s = -3.0;
        for a in -6i64..=6 {
            for b in -6i64..=6 {
                for c in -6i64..=6 {
                    let m2 = (a * a + b * b + c * c) as f64;
                    if m2 == 0.0 {
                        continue;
                    }
                    let m = m2.sqrt();
                    s += libm::erfc(PI.sqrt() * m) / m + (-PI * m2).exp() / (PI * m2);
                }
            }
        }
        assert!((s - CUBIC_LATTICE_ZETA).abs() < 1e-13, "{s}");
    }

    #[test]
    fn square_lattice_constant_from_gamma() {
        let g = libm::tgamma(0.25);
        let z = -0.5 * (2.0 * PI).ln() - (g * g / (2.0 * PI * 2f64.sqrt())).ln();
        assert!((z - SQUARE_LATTICE_LOG_CONSTANT).abs() < 1e-13);
    }

    #[test]
    fn origin_regular_part_matches_small_radius_limit() {
        // Without the lattice and far-field terms the n = 3 weight is lim (A + B/3 − 1/(6πr)).
        let p = Params::new(3, 2.0 * PI).unwrap();
        let r = 1e-5;
        let (a, b) = mode_radial(&p, 3, r).unwrap().stokes();
        let limit = a + b / 3.0 - 1.0 / (6.0 * PI * r);
        let g0 = (2.0 * PI).powf(-1.5);
        let w = origin_weight(&p, 3, 1.0).unwrap() + CUBIC_LATTICE_ZETA / (6.0 * PI) - g0 / (3.0 * p.lambda(3));
        assert!((w - limit).norm() < 1e-4 * limit.norm(), "{w} vs {limit}");
    }

    #[test]
    fn smoothed_far_field_matches_laplace_outside_the_core() {
        for n in [2, 3] {
            let p = Params::new(n, 1.0).unwrap();
            let (p1, p2) = smoothed_laplace_derivatives(n, 12.0, 1.0);
            let (a, b) = crate::kernels::laplace_hessian_radial(&p, 12.0).unwrap();
            // ∂∂Ψ = (Ψ'/r) δ + (Ψ'' − Ψ'/r) x̂x̂.
            assert!((p1 / 12.0 - a).abs() < 1e-14 && (p2 - p1 / 12.0 - b).abs() < 1e-14);
        }
    }

    #[test]
    fn small_grid_transform_is_close_in_2d() {
        let p = Params::new(2, 2.0 * PI).unwrap();
        let coarse = symbol_error(&p, 8, 12.0, 64).unwrap();
        let fine = symbol_error(&p, 8, 12.0, 128).unwrap();
        assert!(fine.relative_error < coarse.relative_error && fine.relative_error < 2e-2, "{coarse:?} {fine:?}");
        assert!(symbol_error(&p, 0, 12.0, 64).is_err());
    }

    #[test]
    fn fft_nd_matches_direct_sum() {
        let (n, size) = (2, 4);
        let data: Vec<Complex64> = (0..16).map(|i| Complex64::new(i as f64, (i * i) as f64 * 0.1)).collect();
        let mut out = data.clone();
        fft_nd(&mut out, n, size);
        for k in 0..16 {
            let (k0, k1) = (k / 4, k % 4);
            let direct: Complex64 = (0..16)
                .map(|j| {
                    let (j0, j1) = (j / 4, j % 4);
                    data[j] * Complex64::from_polar(1.0, -2.0 * PI * (j0 * k0 + j1 * k1) as f64 / 4.0)
                })
                .sum();
            assert!((direct - out[k]).norm() < 1e-12);
        }
    }
}
