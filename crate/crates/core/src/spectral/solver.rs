use super::field::{spatial_transform, GridField, Representation};
use super::grid::GridSpec;
use crate::error::{Error, Result};
use crate::kernels::mode_stokeslet;
use num_complex::Complex64;
use rayon::prelude::*;

/// Relative size of f̂(0, 0) above which a forcing is rejected.
pub const COMPATIBILITY_TOLERANCE: f64 = 1e-12;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn check_vector_field(grid: &GridSpec, f: &GridField, what: &str) -> Result<()> {
    if f.grid() != grid {
        return Err(Error::Shape(format!("{what} lives on a different grid")));
    }
    if f.components() != grid.dim() {
        return Err(Error::Shape(format!("{what} has {} components, expected {}", f.components(), grid.dim())));
    }
    if f.representation() != Representation::Physical {
        return Err(Error::Shape(format!("{what} must be given in physical representation")));
    }
    Ok(())
}

/// Applies a pointwise symbol `rule(ξ, k, f̂, out)` with `out.len() = out_components`;
/// spatial Nyquist modes are set to zero.
fn apply_symbol(
    grid: &GridSpec,
    fh: &GridField,
    out_components: usize,
    rule: impl Fn(&[f64], i64, &[Complex64], &mut [Complex64]) + Sync,
) -> GridField {
    let n = grid.dim();
    let spatial = grid.spatial_len();
    let len = grid.component_len();
    let cin = fh.components();
    let vals = fh.values();
    let results: Vec<[Complex64; 3]> = (0..len)
        .into_par_iter()
        .map(|i| {
            let (l, s) = (i / spatial, i % spatial);
            let mut out = [ZERO; 3];
            if grid.is_nyquist(s) {
                return out;
            }
            let mut input = [ZERO; 4];
            for c in 0..cin {
                input[c] = vals[c * len + i];
            }
            let xi = grid.xi(s);
            rule(&xi[..n], grid.time_mode(l), &input[..cin], &mut out[..out_components]);
            out
        })
        .collect();
    let mut out = GridField::zeros(grid, out_components, Representation::Spectral);
    let ov = out.values_mut();
    for (i, r) in results.iter().enumerate() {
        for c in 0..out_components {
            ov[c * len + i] = r[c];
        }
    }
    out
}

/// P(ξ)v with P(0) = I.
fn project(xi: &[f64], v: &[Complex64], out: &mut [Complex64]) {
    let xi2: f64 = xi.iter().map(|a| a * a).sum();
    let dot: Complex64 = xi.iter().zip(v).map(|(a, b)| *b * *a).sum();
    for i in 0..xi.len() {
        out[i] = if xi2 == 0.0 { v[i] } else { v[i] - dot * (xi[i] / xi2) };
    }
}

/// −iξ·f̂/|ξ|², zero at ξ = 0.
fn pressure_symbol(xi: &[f64], v: &[Complex64]) -> Complex64 {
    let xi2: f64 = xi.iter().map(|a| a * a).sum();
    if xi2 == 0.0 {
        return ZERO;
    }
    let dot: Complex64 = xi.iter().zip(v).map(|(a, b)| *b * *a).sum();
    -I * dot / xi2
}

fn check_compatibility(grid: &GridSpec, fh: &GridField) -> Result<()> {
    let mean = (0..grid.dim()).map(|c| fh.get(c, 0, 0).norm_sqr()).sum::<f64>().sqrt();
    let total = fh.values().iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let limit = COMPATIBILITY_TOLERANCE * total;
    if mean > limit {
        return Err(Error::Compatibility { mean, limit });
    }
    Ok(())
}

/// Solves ∂ₜu − Δu + ∇p = f, div u = 0 on the grid in symbol form:
/// û = P f̂/(|ξ|² + λₖ) (this is M P f̂ for k ≠ 0 and the steady solve P f̂/|ξ|² for k = 0),
/// û(0, k) = f̂(0, k)/λₖ for k ≠ 0, p̂ = −iξ·f̂/|ξ|².
pub fn solve_tp_stokes(grid: &GridSpec, f: &GridField) -> Result<(GridField, GridField)> {
    check_vector_field(grid, f, "forcing")?;
    let fh = f.transform_forward()?;
    check_compatibility(grid, &fh)?;
    let params = *grid.params();
    let uh = apply_symbol(grid, &fh, grid.dim(), |xi, k, v, out| {
        let xi2: f64 = xi.iter().map(|a| a * a).sum();
        let denom = params.lambda(k) + xi2;
        if denom == ZERO {
            return;
        }
        project(xi, v, out);
        out.iter_mut().for_each(|o| *o /= denom);
    });
    let ph = apply_symbol(grid, &fh, 1, |xi, _, v, out| out[0] = pressure_symbol(xi, v));
    let scale = f.max_abs();
    Ok((uh.transform_inverse()?.into_real(scale)?, ph.transform_inverse()?.into_real(scale)?))
}

/// ∂ₜu − Δu + ∇p by spectral differentiation.
pub fn apply_tp_stokes_operator(grid: &GridSpec, u: &GridField, p: &GridField) -> Result<GridField> {
    check_vector_field(grid, u, "velocity")?;
    if p.grid() != grid || p.components() != 1 || p.representation() != Representation::Physical {
        return Err(Error::Shape("pressure must be a scalar physical field on the same grid".into()));
    }
    let n = grid.dim();
    let uh = u.transform_forward()?;
    let ph = p.transform_forward()?;
    let mut joined = GridField::zeros(grid, n + 1, Representation::Spectral);
    let len = grid.component_len();
    joined.values_mut()[..n * len].copy_from_slice(uh.values());
    joined.values_mut()[n * len..].copy_from_slice(ph.values());
    let params = *grid.params();
    let out = apply_symbol(grid, &joined, n, |xi, k, v, out| {
        let xi2: f64 = xi.iter().map(|a| a * a).sum();
        let sym = params.lambda(k) + xi2;
        for i in 0..xi.len() {
            out[i] = sym * v[i] + I * xi[i] * v[xi.len()];
        }
    });
    out.transform_inverse()?.into_real(u.max_abs().max(p.max_abs()))
}

/// div u by spectral differentiation, as a scalar physical field.
pub fn divergence(grid: &GridSpec, u: &GridField) -> Result<GridField> {
    check_vector_field(grid, u, "velocity")?;
    let uh = u.transform_forward()?;
    let out = apply_symbol(grid, &uh, 1, |xi, _, v, out| {
        out[0] = xi.iter().zip(v).map(|(a, b)| I * *a * *b).sum();
    });
    out.transform_inverse()?.into_real(u.max_abs())
}

/// Γ⊥ ∗ f on the grid: û₂ = M P f̂ for 0 < |k| ≤ k_max, zero otherwise (P(0) = I).
pub fn convolve_remainder(grid: &GridSpec, f: &GridField) -> Result<GridField> {
    convolve_remainder_truncated(grid, f, grid.max_mode())
}

fn convolve_remainder_truncated(grid: &GridSpec, f: &GridField, k_max: usize) -> Result<GridField> {
    check_vector_field(grid, f, "forcing")?;
    let fh = f.transform_forward()?;
    let params = *grid.params();
    let uh = apply_symbol(grid, &fh, grid.dim(), |xi, k, v, out| {
        if k == 0 || k.unsigned_abs() as usize > k_max {
            return;
        }
        let xi2: f64 = xi.iter().map(|a| a * a).sum();
        let m = 1.0 / (params.lambda(k) + xi2);
        project(xi, v, out);
        out.iter_mut().for_each(|o| *o *= m);
    });
    uh.transform_inverse()?.into_real(f.max_abs())
}

/// u = Γ̄ ∗ (time average of f) + Γ⊥ ∗ f and p = Γ̄ᵖ ∗ f(·, t) slice by slice; modes |k| > k_max
/// are dropped from Γ⊥.
pub fn solve_by_representation(grid: &GridSpec, f: &GridField, k_max: usize) -> Result<(GridField, GridField)> {
    check_vector_field(grid, f, "forcing")?;
    let n = grid.dim();
    let nt = grid.n_time();
    let spatial = grid.spatial_len();
    let len = grid.component_len();
    // Steady part from the time average, transformed in space only.
    let mut mean = vec![ZERO; n * spatial];
    for c in 0..n {
        for l in 0..nt {
            for s in 0..spatial {
                mean[c * spatial + s] += f.get(c, l, s) / nt as f64;
            }
        }
    }
    let norm: f64 = f.values().iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt() / (nt as f64).sqrt();
    spatial_transform(grid, &mut mean, false);
    let dc = (0..n).map(|c| mean[c * spatial].norm_sqr()).sum::<f64>().sqrt();
    if dc > COMPATIBILITY_TOLERANCE * norm {
        return Err(Error::Compatibility { mean: dc, limit: COMPATIBILITY_TOLERANCE * norm });
    }
    let mut steady = vec![ZERO; n * spatial];
    for s in 0..spatial {
        if s == 0 || grid.is_nyquist(s) {
            continue;
        }
        let xi = grid.xi(s);
        let xi2: f64 = xi[..n].iter().map(|a| a * a).sum();
        let v: Vec<Complex64> = (0..n).map(|c| mean[c * spatial + s]).collect();
        let mut out = [ZERO; 3];
        project(&xi[..n], &v, &mut out[..n]);
        for c in 0..n {
            steady[c * spatial + s] = out[c] / xi2;
        }
    }
    spatial_transform(grid, &mut steady, true);
    let oscillating = convolve_remainder_truncated(grid, f, k_max)?;
    let mut u = oscillating;
    let uv = u.values_mut();
    for c in 0..n {
        for l in 0..nt {
            for s in 0..spatial {
                uv[c * len + l * spatial + s] += Complex64::new(steady[c * spatial + s].re, 0.0);
            }
        }
    }
    // Pressure: each time slice separately.
    let mut slices: Vec<Complex64> = f.values().to_vec();
    spatial_transform(grid, &mut slices, false);
    let mut pressure = vec![ZERO; len];
    for l in 0..nt {
        for s in 0..spatial {
            if grid.is_nyquist(s) {
                continue;
            }
            let xi = grid.xi(s);
            let v: Vec<Complex64> = (0..n).map(|c| slices[c * len + l * spatial + s]).collect();
            pressure[l * spatial + s] = pressure_symbol(&xi[..n], &v);
        }
    }
    spatial_transform(grid, &mut pressure, true);
    let p = GridField::from_complex(grid, 1, Representation::Physical, pressure)?.into_real(f.max_abs())?;
    Ok((u, p))
}

/// Direct physical-space quadrature of (Γ⊥_K ∗ f)(x, t_l), Γ⊥_K = Σ_{0<|k|≤K} Gₖ e^{iωkt},
/// summed over the grid points with weight hⁿ and the normalized time average. `x` must not
/// coincide with a grid point carrying nonzero forcing.
pub fn direct_remainder_convolution(grid: &GridSpec, f: &GridField, x: &[f64], l: usize, k_max: usize) -> Result<Vec<f64>> {
    check_vector_field(grid, f, "forcing")?;
    let n = grid.dim();
    if x.len() != n {
        return Err(Error::Shape(format!("probe has {} components, expected {n}", x.len())));
    }
    if l >= grid.n_time() {
        return Err(Error::Shape(format!("time index {l} out of range")));
    }
    let params = *grid.params();
    let nt = grid.n_time();
    let spatial = grid.spatial_len();
    let w = params.frequency();
    let t = grid.time(l);
    let partial: Result<Vec<[f64; 3]>> = (0..spatial)
        .into_par_iter()
        .map(|s| {
            let mut acc = [0.0; 3];
            let vals: Vec<Vec<Complex64>> = (0..n).map(|c| (0..nt).map(|m| f.get(c, m, s)).collect()).collect();
            if vals.iter().all(|v| v.iter().all(|z| *z == ZERO)) {
                return Ok(acc);
            }
            let y = grid.position(s);
            let d: Vec<f64> = (0..n).map(|a| x[a] - y[a]).collect();
            for k in 1..=k_max as i64 {
                let g = mode_stokeslet(&params, k, &d)?;
                // f̂ₖ(y) = (1/Nt) Σ_m f(y, s_m) e^{−iωk s_m}; the −k term is the conjugate.
                let fk: Vec<Complex64> = vals
                    .iter()
                    .map(|v| {
                        v.iter()
                            .enumerate()
                            .map(|(m, z)| z * Complex64::from_polar(1.0, -w * k as f64 * grid.time(m)))
                            .sum::<Complex64>()
                            / nt as f64
                    })
                    .collect();
                let phase = Complex64::from_polar(1.0, w * k as f64 * t);
                for i in 0..n {
                    let s: Complex64 = (0..n).map(|j| g.get(i, j) * fk[j]).sum();
                    acc[i] += 2.0 * (s * phase).re;
                }
            }
            Ok(acc)
        })
        .collect();
    let h = grid.spacing().powi(n as i32);
    let mut out = vec![0.0; n];
    for a in partial? {
        for i in 0..n {
            out[i] += a[i] * h;
        }
    }
    Ok(out)
}
