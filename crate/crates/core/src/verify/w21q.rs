//! Mixed-norm ratio ‖Γ⊥ ∗ f‖_{W^{2,1}_q} / ‖f‖_q for random band-limited forcings, measured on
//! a grid and on its refinement.

use super::report::{relative_drift, Relation, ReportBuilder, VerificationReport};
use crate::error::{Error, Result};
use crate::kernels::Params;
use crate::spectral::{convolve_remainder, make_grid, GridField, GridSpec};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest spatial wavenumber |mᵢ| of the random forcings.
pub const FORCING_SPACE_BAND: i64 = 3;
/// Largest time mode |k| of the random forcings.
pub const FORCING_TIME_BAND: i64 = 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct W21qDesign {
    pub qs: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub half_length: f64,
    /// Coarse grid; the fine grid has 2N points per axis and 2Nt − 1 time points.
    pub n_space: usize,
    pub n_time: usize,
}

impl Default for W21qDesign {
    fn default() -> Self {
        W21qDesign { qs: vec![1.5, 2.0, 3.0], trials: 20, seed: 20_240_601, half_length: PI, n_space: 16, n_time: 5 }
    }
}

/// Coefficients of Σ 2Re(c e^{i(ξ_m·x + ωkt)}) over m ∈ [−3, 3]ⁿ, 0 ≤ k ≤ 2, (m, k) ≠ 0.
type Forcing = Vec<([i64; 3], i64, [Complex64; 3])>;

fn random_forcing(n: usize, rng: &mut ChaCha8Rng) -> Forcing {
    let b = FORCING_SPACE_BAND;
    let mut out = Vec::new();
    for k in 0..=FORCING_TIME_BAND {
        for flat in 0..(2 * b + 1).pow(n as u32) {
            let mut m = [0i64; 3];
            let mut rest = flat;
            for a in 0..n {
                m[a] = rest % (2 * b + 1) - b;
                rest /= 2 * b + 1;
            }
            if k == 0 && m.iter().all(|&v| v == 0) {
                continue;
            }
            let mut c = [Complex64::new(0.0, 0.0); 3];
            for v in c.iter_mut().take(n) {
                *v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
            out.push((m, k, c));
        }
    }
    out
}

fn sample_forcing(grid: &GridSpec, forcing: &Forcing) -> GridField {
    let n = grid.dim();
    let dxi = grid.frequency_spacing();
    let w = grid.params().frequency();
    GridField::from_fn(grid, n, |x, t, out| {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (m, k, c) in forcing {
            let phase: f64 = (0..n).map(|a| dxi * m[a] as f64 * x[a]).sum::<f64>() + w * *k as f64 * t;
            let e = Complex64::from_polar(1.0, phase);
            for a in 0..n {
                out[a] += 2.0 * (c[a] * e).re;
            }
        }
    })
}

/// h^n/Nt Σ |v|^q with |·| the Euclidean norm over components.
pub fn lq_power(field: &GridField, q: f64) -> Result<f64> {
    let values = field.to_real()?;
    let g = field.grid();
    let len = g.component_len();
    let sum: f64 = (0..len)
        .map(|i| (0..field.components()).map(|c| values[c * len + i].powi(2)).sum::<f64>().sqrt().powf(q))
        .sum();
    Ok(sum * g.spacing().powi(g.dim() as i32) / g.n_time() as f64)
}

/// Multipliers of the derivatives in W^{2,1}_q: all ∂^α with |α| ≤ 2 (i ≤ j) and ∂ₜ^β with
/// β ≤ 1, as functions of (ξ, ωk). The identity appears twice.
fn derivative_symbols(n: usize) -> Vec<Box<dyn Fn(&[f64], f64) -> Complex64 + Sync>> {
    let i = Complex64::new(0.0, 1.0);
    let mut out: Vec<Box<dyn Fn(&[f64], f64) -> Complex64 + Sync>> = vec![Box::new(|_, _| Complex64::new(1.0, 0.0))];
    for a in 0..n {
        out.push(Box::new(move |xi, _| i * xi[a]));
        for b in a..n {
            out.push(Box::new(move |xi, _| Complex64::new(-xi[a] * xi[b], 0.0)));
        }
    }
    out.push(Box::new(|_, _| Complex64::new(1.0, 0.0)));
    out.push(Box::new(move |_, wk| i * wk));
    out
}

/// ∂^α u for every multiplier of [`derivative_symbols`], in physical representation.
fn derivative_fields(u: &GridField) -> Result<Vec<GridField>> {
    let g = *u.grid();
    let uh = u.transform_forward()?;
    let spatial = g.spatial_len();
    let len = g.component_len();
    let w = g.params().frequency();
    let scale = u.max_abs() * (1.0 + g.frequency_spacing() * g.max_mode() as f64).powi(2);
    derivative_symbols(g.dim())
        .into_iter()
        .map(|symbol| {
            let mut d = uh.clone();
            for (idx, v) in d.values_mut().iter_mut().enumerate() {
                let i = idx % len;
                let (l, s) = (i / spatial, i % spatial);
                let xi = g.xi(s);
                *v *= symbol(&xi[..g.dim()], w * g.time_mode(l) as f64);
            }
            d.transform_inverse()?.into_real(scale)
        })
        .collect()
}

/// Σ_{|α|≤2} ‖∂^α u‖_q^q + Σ_{β≤1} ‖∂ₜ^β u‖_q^q on the grid.
pub fn w21q_power(u: &GridField, q: f64) -> Result<f64> {
    derivative_fields(u)?.iter().map(|d| lq_power(d, q)).sum()
}

/// h^n Σ_{ξ,k} w(ξ, k)|û|² with the weight of [`w21q_power`] at q = 2.
pub fn w212_parseval(u: &GridField) -> Result<f64> {
    let g = *u.grid();
    let uh = u.transform_forward()?;
    let spatial = g.spatial_len();
    let len = g.component_len();
    let n = g.dim();
    let w = g.params().frequency();
    let mut sum = 0.0;
    for (idx, v) in uh.values().iter().enumerate() {
        let i = idx % len;
        let (l, s) = (i / spatial, i % spatial);
        let xi = g.xi(s);
        let mut weight = 2.0 + (w * g.time_mode(l) as f64).powi(2);
        for a in 0..n {
            weight += xi[a] * xi[a];
            for b in a..n {
                weight += (xi[a] * xi[b]).powi(2);
            }
        }
        sum += weight * v.norm_sqr();
    }
    Ok(sum * g.spacing().powi(n as i32))
}

/// `W^{1/q}/‖f‖_q` for each q and the Parseval mismatch at q = 2, for one forcing on one grid.
fn ratios(grid: &GridSpec, forcing: &Forcing, qs: &[f64]) -> Result<(Vec<f64>, f64)> {
    let f = sample_forcing(grid, forcing);
    let u = convolve_remainder(grid, &f)?;
    let derivs = derivative_fields(&u)?;
    let power = |q: f64| -> Result<f64> { derivs.iter().map(|d| lq_power(d, q)).sum() };
    let parseval = relative_drift(power(2.0)?, w212_parseval(&u)?);
    let values = qs
        .iter()
        .map(|&q| Ok(power(q)?.powf(1.0 / q) / lq_power(&f, q)?.powf(1.0 / q)))
        .collect::<Result<_>>()?;
    Ok((values, parseval))
}

/// Max over seeded random forcings of ‖Γ⊥ ∗ f‖_{W^{2,1}_q}/‖f‖_q on a grid and its refinement;
/// for each q the ratio must not grow by 15% under refinement, and the q = 2 norm must match
/// its Parseval form.
pub fn check_w21q_ratio(params: &Params, design: &W21qDesign) -> Result<VerificationReport> {
    if design.qs.is_empty() || design.qs.iter().any(|&q| !(q > 1.0 && q.is_finite())) {
        return Err(Error::Config(format!("every q must lie in (1, ∞), got {:?}", design.qs)));
    }
    if design.trials == 0 {
        return Err(Error::Config("at least one trial is needed".into()));
    }
    if design.n_time < 3 || design.n_time % 2 == 0 {
        return Err(Error::Config("n_time must be odd and at least 3".into()));
    }
    let coarse = make_grid(design.half_length, design.n_space, design.n_time, *params)?;
    let fine = make_grid(design.half_length, 2 * design.n_space, 2 * design.n_time - 1, *params)?;
    if coarse.max_mode() < FORCING_TIME_BAND as usize || design.n_space < 2 * FORCING_SPACE_BAND as usize + 2 {
        return Err(Error::Config("coarse grid does not resolve the forcing band".into()));
    }
    let mut b = ReportBuilder::new("w21q-ratio");
    b.param("n", params.n() as f64).param("T", params.period());
    b.param("seed", design.seed as f64).param("trials", design.trials as f64);
    b.param("N", design.n_space as f64).param("Nt", design.n_time as f64).param("L", design.half_length);
    b.describe(format!(
        "q in {:?}; random forcings with |m| ≤ {FORCING_SPACE_BAND}, |k| ≤ {FORCING_TIME_BAND}; grids N = {}, Nt = {} and N = {}, Nt = {}",
        design.qs,
        design.n_space,
        design.n_time,
        2 * design.n_space,
        2 * design.n_time - 1
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(design.seed);
    let mut rows = Vec::new();
    for trial in 0..design.trials {
        let forcing = random_forcing(params.n(), &mut rng);
        let (rc, pc) = ratios(&coarse, &forcing, &design.qs)?;
        let (rf, pf) = ratios(&fine, &forcing, &design.qs)?;
        for (i, &q) in design.qs.iter().enumerate() {
            rows.push(vec![trial as f64, q, rc[i], rf[i], pc.max(pf)]);
        }
    }
    for &q in &design.qs {
        let of_q = || rows.iter().filter(move |r| r[1] == q);
        let max_c = of_q().map(|r| r[2]).fold(0.0, f64::max);
        let max_f = of_q().map(|r| r[3]).fold(0.0, f64::max);
        b.constant(&format!("max_ratio_q{q}"), max_c).constant(&format!("max_ratio_refined_q{q}"), max_f);
        b.criterion(&format!("ratio_growth_q{q}"), (max_f - max_c) / max_c, Relation::AtMost(0.15));
    }
    let parseval = rows.iter().map(|r| r[4]).fold(0.0, f64::max);
    b.criterion("parseval_mismatch_q2", parseval, Relation::AtMost(1e-8));
    b.table("ratios", &["trial", "q", "ratio", "ratio_refined", "parseval_mismatch"], rows);
    Ok(b.finish())
}
