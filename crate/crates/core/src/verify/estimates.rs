//! Checks of the per-mode estimates: the ℓ² mode sum of Γₖ, the geometric block sum, the
//! pointwise |k|⁻¹|x|⁻ⁿ bound on ∂ᵢ∂ⱼ(Ψ*Γₖ) and the boundedness of the multiplier M and its
//! derivatives.

use super::fit::{fit_decay_exponent, fit_exponential_rate, geometric_grid, linear_grid};
use super::report::{relative_drift, Relation, ReportBuilder, VerificationReport};
use crate::error::{Error, Result};
use crate::kernels::{conv_second_derivative, helmholtz_radial, Params};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest number of modes summed for one radius of the ℓ² mode sum.
pub const MODE_SUM_CAP: usize = 20_000_000;

/// (Σ_{k≠0} |Γₖ(x)|²)^{1/2} at |x| = r and the number of mode pairs used.
///
/// |Γₖ|² decays like e^{−c√k}, c = 2 Im η₁ r, so the tail after mode k is estimated by
/// |Γₖ|² ∫_k^∞ e^{−c(√u−√k)} du = |Γₖ|² (2√k/c + 2/c²) and summation stops below 1e−14.
pub fn mode_sum(params: &Params, r: f64) -> Result<(f64, usize)> {
    let c = 2.0 * params.eta(1)?.im * r;
    let mut sum = 0.0;
    for k in 1..=MODE_SUM_CAP {
        let g = helmholtz_radial(params, k as i64, r)?.gamma.norm_sqr();
        sum += g;
        let kf = k as f64;
        let tail = g * (2.0 * kf.sqrt() / c + 2.0 / (c * c));
        if tail < 1e-14 * sum {
            return Ok(((2.0 * sum).sqrt(), k));
        }
    }
    Err(Error::Convergence(format!("mode sum at r = {r} not converged after {MODE_SUM_CAP} modes")))
}

/// Radius design for [`check_mode_sum_estimate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeSumDesign {
    /// Radii in [0.5, 8] for the fitted constant and the exponential rate.
    pub radii: Vec<f64>,
    /// Radii below √(T/2π) where the |x|^{1−n} prefactor dominates.
    pub small_radii: Vec<f64>,
}

impl Default for ModeSumDesign {
    fn default() -> Self {
        ModeSumDesign { radii: linear_grid(1.0, 6.0, 21), small_radii: geometric_grid(0.05, 0.25, 9) }
    }
}

/// Inserts midpoints between consecutive radii.
pub fn refine(radii: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * radii.len());
    for w in radii.windows(2) {
        out.push(w[0]);
        out.push(0.5 * (w[0] + w[1]));
    }
    out.extend(radii.last());
    out
}

fn sampled(params: &Params, radii: &[f64]) -> Result<Vec<(f64, f64)>> {
    radii.par_iter().map(|&r| mode_sum(params, r).map(|(v, _)| (r, v))).collect()
}

/// Fits `C = sup v(r)/(r^{1−n} e^{−a r})`, a = ½√(π/T), its stability under radius refinement,
/// the exponential rate over the radius set and the small-radius prefactor exponent.
pub fn check_mode_sum_estimate(params: &Params, design: &ModeSumDesign) -> Result<VerificationReport> {
    if design.radii.iter().any(|&r| !(0.5..=8.0).contains(&r)) {
        return Err(Error::Config("mode-sum radii must lie in [0.5, 8]".into()));
    }
    let n = params.n() as f64;
    let a = 0.5 * (PI / params.period()).sqrt();
    let mut b = ReportBuilder::new("mode-sum");
    b.param("n", n).param("T", params.period()).param("predicted_rate", a);
    b.describe(format!(
        "{} radii in [{}, {}] (refined {}), {} small radii in [{}, {}]",
        design.radii.len(),
        design.radii[0],
        design.radii[design.radii.len() - 1],
        2 * design.radii.len() - 1,
        design.small_radii.len(),
        design.small_radii[0],
        design.small_radii[design.small_radii.len() - 1]
    ));
    let envelope = |r: f64| r.powf(1.0 - n) * (-a * r).exp();
    let coarse = sampled(params, &design.radii)?;
    let fine = sampled(params, &refine(&design.radii))?;
    let sup = |s: &[(f64, f64)]| s.iter().map(|&(r, v)| v / envelope(r)).fold(0.0, f64::max);
    let (c0, c1) = (sup(&coarse), sup(&fine));
    b.constant("C", c0).constant("C_refined", c1);
    b.criterion("C_drift", relative_drift(c0, c1), Relation::AtMost(0.10));
    let rate = fit_exponential_rate(&fine)?;
    b.constant("rate", rate.rate).constant("rate_half_width", rate.rate_half_width);
    b.constant("rate_fit_power", rate.power);
    b.criterion("rate_over_predicted", rate.rate / a, Relation::AtLeast(0.95));
    let small = sampled(params, &design.small_radii)?;
    let fit = fit_decay_exponent(&small)?;
    b.fit("small_radius_prefactor", &fit);
    b.criterion("prefactor_exponent", fit.slope, Relation::Within { target: 1.0 - n, tol: 0.3 });
    // |x|^{n−1} v bounded near the origin, stable when the small-radius set is refined.
    let small_fine = sampled(params, &refine(&design.small_radii))?;
    let sup_small = |s: &[(f64, f64)]| s.iter().map(|&(r, v)| v * r.powf(n - 1.0)).fold(0.0, f64::max);
    let (s0, s1) = (sup_small(&small), sup_small(&small_fine));
    b.constant("C_small", s0).constant("C_small_refined", s1);
    b.criterion("C_small_drift", relative_drift(s0, s1), Relation::AtMost(0.10));
    b.table("mode_sum", &["r", "value"], fine.iter().chain(&small).map(|&(r, v)| vec![r, v]).collect());
    Ok(b.finish())
}

/// S(q) = Σ_{k≥1} k^{(n−3)/2} q^{√k} with an integral bound on the tail, returned as
/// `(S, tail_bound)`.
///
/// For n ∈ {2, 3} the terms decrease in k, so Σ_{k>K} f(k) ≤ ∫_K^∞ f, which after k = u² is
/// 2e^{−βs}(s/β + 1/β²) (n = 3) or 2e^{−βs}/β (n = 2) with β = −log q, s = √K.
pub fn geometric_sum(n: usize, q: f64) -> Result<(f64, f64)> {
    if !(q > 0.0 && q < 1.0) || !(n == 2 || n == 3) {
        return Err(Error::Config(format!("geometric sum needs q in (0, 1) and n in {{2, 3}}, got q = {q}, n = {n}")));
    }
    let beta = -q.ln();
    let expo = (n as f64 - 3.0) / 2.0;
    let mut sum = 0.0;
    let mut k = 1u64;
    loop {
        let kf = k as f64;
        sum += kf.powf(expo) * (-beta * kf.sqrt()).exp();
        let s = kf.sqrt();
        let tail = if n == 3 { 2.0 * (-beta * s).exp() * (s / beta + 1.0 / (beta * beta)) } else { 2.0 * (-beta * s).exp() / beta };
        if tail < 1e-15 * sum {
            return Ok((sum, tail));
        }
        k += 1;
    }
}

/// Bounds S(q)(1 − q)^{n−1}/q uniformly on a q grid and checks the sup is stable when the grid
/// is refined; also records monotonicity in q and the factorial (n−2)! for comparison.
pub fn check_geometric_sum(params: &Params, q_grid: &[f64]) -> Result<VerificationReport> {
    if q_grid.len() < 2 || q_grid.iter().any(|&q| !(q > 0.0 && q <= 0.95)) {
        return Err(Error::Config("q grid must have at least two points in (0, 0.95]".into()));
    }
    let n = params.n();
    let mut b = ReportBuilder::new("geometric-sum");
    b.param("n", n as f64);
    b.describe(format!("{} values of q in [{}, {}] (refined {})", q_grid.len(), q_grid[0], q_grid[q_grid.len() - 1], 2 * q_grid.len() - 1));
    let eval = |grid: &[f64]| -> Result<Vec<(f64, f64, f64)>> {
        grid.par_iter()
            .map(|&q| {
                let (s, tail) = geometric_sum(n, q)?;
                Ok((q, s, tail))
            })
            .collect()
    };
    let coarse = eval(q_grid)?;
    let fine = eval(&refine(q_grid))?;
    let norm = |q: f64, s: f64| s * (1.0 - q).powi(n as i32 - 1) / q;
    let sup = |v: &[(f64, f64, f64)]| v.iter().map(|&(q, s, _)| norm(q, s)).fold(0.0, f64::max);
    let (c0, c1) = (sup(&coarse), sup(&fine));
    b.constant("sup_normalized", c0).constant("sup_normalized_refined", c1);
    b.constant("closing_constant_factorial", 1.0);
    b.criterion("sup_drift", relative_drift(c0, c1), Relation::AtMost(0.10));
    let worst_tail = fine.iter().map(|&(_, s, t)| t / s).fold(0.0, f64::max);
    b.residual("max_relative_tail_bound", worst_tail);
    let mut sorted = fine.clone();
    sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
    let monotone_violations = sorted.windows(2).filter(|w| !(w[1].1 > w[0].1)).count();
    b.criterion("monotonicity_violations", monotone_violations as f64, Relation::AtMost(0.0));
    let (q0, s0, _) = sorted[0];
    b.constant("S_over_q_at_smallest_q", s0 / q0);
    b.table(
        "geometric_sum",
        &["q", "S", "normalized", "tail_bound"],
        sorted.iter().map(|&(q, s, t)| vec![q, s, norm(q, s), t]).collect(),
    );
    Ok(b.finish())
}

/// Unit vector off every coordinate plane, so all (i, j) entries are exercised.
fn generic_direction(n: usize) -> Vec<f64> {
    let v = [1.0, 0.6, 0.3];
    let norm = v[..n].iter().map(|a| a * a).sum::<f64>().sqrt();
    v[..n].iter().map(|a| a / norm).collect()
}

fn max_entry(params: &Params, k: i64, r: f64, dir: &[f64]) -> Result<f64> {
    let x: Vec<f64> = dir.iter().map(|d| d * r).collect();
    Ok(conv_second_derivative(params, k, &x)?.max_abs())
}

/// Sample design for [`check_pointwise_mode_bound`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointwiseDesign {
    pub modes: Vec<i64>,
    pub radii: Vec<f64>,
    /// Mode used for the fixed-k radial slope.
    pub slope_mode: i64,
}

impl Default for PointwiseDesign {
    fn default() -> Self {
        PointwiseDesign { modes: vec![1, 2, 4, 8, 16, 32, 64], radii: linear_grid(1.0, 8.0, 57), slope_mode: 8 }
    }
}

/// Per k, C_k = sup_r rⁿ max_{ij} |∂ᵢ∂ⱼ(Ψ*Γₖ)(r x̂)|; fits the k-exponent of C_k and the radial
/// slope at a fixed mode.
pub fn check_pointwise_mode_bound(params: &Params, design: &PointwiseDesign) -> Result<VerificationReport> {
    if design.modes.iter().any(|&k| !(1..=64).contains(&k)) {
        return Err(Error::Config("modes must lie in [1, 64]".into()));
    }
    if design.radii.iter().any(|&r| r < 0.5) {
        return Err(Error::Config("radii must be at least 0.5".into()));
    }
    let n = params.n();
    let dir = generic_direction(n);
    let mut b = ReportBuilder::new("pointwise-mode-bound");
    b.param("n", n as f64).param("T", params.period()).param("slope_mode", design.slope_mode as f64);
    b.describe(format!(
        "modes {:?}, {} radii in [{}, {}], direction {:?}",
        design.modes,
        design.radii.len(),
        design.radii[0],
        design.radii[design.radii.len() - 1],
        dir
    ));
    let per_k: Vec<(f64, f64)> = design
        .modes
        .par_iter()
        .map(|&k| {
            let mut sup: f64 = 0.0;
            for &r in &design.radii {
                sup = sup.max(r.powi(n as i32) * max_entry(params, k, r, &dir)?);
            }
            Ok((k as f64, sup))
        })
        .collect::<Result<_>>()?;
    let kfit = fit_decay_exponent(&per_k)?;
    b.fit("k_exponent", &kfit);
    b.criterion("k_exponent", kfit.slope, Relation::AtMost(-0.9));
    let scaled: Vec<f64> = per_k.iter().map(|&(k, c)| k * c).collect();
    let (lo, hi) = scaled.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    b.constant("max_k_times_C_k", hi).constant("min_k_times_C_k", lo);
    let halving: Vec<f64> = per_k.windows(2).filter(|w| w[1].0 == 2.0 * w[0].0).map(|w| w[1].1 / w[0].1).collect();
    if let Some(worst) = halving.iter().map(|h| (h - 0.5).abs() / 0.5).reduce(f64::max) {
        b.constant("doubling_ratio_max_deviation", worst);
    }
    let radial: Vec<(f64, f64)> = design
        .radii
        .iter()
        .map(|&r| max_entry(params, design.slope_mode, r, &dir).map(|v| (r, v)))
        .collect::<Result<_>>()?;
    let rfit = fit_decay_exponent(&radial)?;
    b.fit("radial_slope", &rfit);
    b.criterion("radial_slope", rfit.slope, Relation::Within { target: -(n as f64), tol: 0.2 });
    b.table("per_mode_constant", &["k", "C_k"], per_k.iter().map(|&(k, c)| vec![k, c]).collect());
    Ok(b.finish())
}

/// Sample lattice of (ξ, k) for [`check_multiplier_derivative_bounds`]: a cubic ξ lattice with
/// spacing `step` on [−extent, extent]ⁿ plus points geometrically approaching ξ = 0 along a
/// diagonal, and time modes −k_max..=k_max.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplierLattice {
    pub extent: f64,
    pub step: f64,
    pub k_max: i64,
}

impl Default for MultiplierLattice {
    fn default() -> Self {
        MultiplierLattice { extent: 4.0, step: 0.25, k_max: 16 }
    }
}

impl MultiplierLattice {
    pub fn refined(&self) -> Self {
        MultiplierLattice { step: self.step / 2.0, ..self.clone() }
    }

    fn xis(&self, n: usize) -> Vec<Vec<f64>> {
        let m = (self.extent / self.step).round() as i64;
        let axis: Vec<f64> = (-m..=m).map(|i| i as f64 * self.step).collect();
        let mut out: Vec<Vec<f64>> = vec![vec![]];
        for _ in 0..n {
            out = out.into_iter().flat_map(|p| axis.iter().map(move |&a| [p.clone(), vec![a]].concat())).collect();
        }
        for e in 1..=12 {
            let s = 10f64.powi(-e) / (n as f64).sqrt();
            out.push(vec![s; n]);
        }
        out
    }
}

/// Sup norms over the lattice of M, ∇_ξM, ∇²_ξM, λₖM, ξᵢξⱼM and the k-difference of M.
fn multiplier_sups(params: &Params, lattice: &MultiplierLattice) -> [f64; 7] {
    let n = params.n();
    let xis = lattice.xis(n);
    let ks: Vec<i64> = (-lattice.k_max..=lattice.k_max).collect();
    xis.par_iter()
        .map(|xi| {
            let xi2: f64 = xi.iter().map(|a| a * a).sum();
            let mut s = [0.0f64; 7];
            for &k in &ks {
                let m = |k: i64| -> Complex64 {
                    if k == 0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        1.0 / (params.lambda(k) + xi2)
                    }
                };
                let mk = m(k);
                if k == 0 {
                    // Masked row: record any nonzero value it carries.
                    s[6] = s[6].max(mk.norm());
                    continue;
                }
                s[0] = s[0].max(mk.norm());
                for i in 0..n {
                    s[1] = s[1].max((-2.0 * xi[i] * mk * mk).norm());
                    for j in 0..n {
                        let d = if i == j { 1.0 } else { 0.0 };
                        let second = -2.0 * d * mk * mk + 8.0 * xi[i] * xi[j] * mk * mk * mk;
                        s[2] = s[2].max(second.norm());
                        s[4] = s[4].max((xi[i] * xi[j] * mk).norm());
                    }
                }
                s[3] = s[3].max((params.lambda(k) * mk).norm());
                s[5] = s[5].max((m(k + 1) - mk).norm());
            }
            s
        })
        .reduce(|| [0.0; 7], |a, b| std::array::from_fn(|i| a[i].max(b[i])))
}

/// Bounds of M(ξ, k) = (1 − δ(k))/(|ξ|² + λₖ) and of its ξ-derivatives, time-derivative symbol
/// and k-difference; passes iff all are finite, stable under lattice refinement, |M| ≤ T/2π and
/// the k = 0 row vanishes.
pub fn check_multiplier_derivative_bounds(params: &Params, lattice: &MultiplierLattice) -> Result<VerificationReport> {
    if !(lattice.step > 0.0 && lattice.extent >= lattice.step && lattice.k_max >= 1) {
        return Err(Error::Config("multiplier lattice needs step > 0, extent ≥ step and k_max ≥ 1".into()));
    }
    let mut b = ReportBuilder::new("multiplier-bounds");
    b.param("n", params.n() as f64).param("T", params.period());
    b.param("extent", lattice.extent).param("step", lattice.step).param("k_max", lattice.k_max as f64);
    b.describe("cubic ξ lattice plus a diagonal sequence ξ → 0, all |k| ≤ k_max; refined lattice halves the step");
    let coarse = multiplier_sups(params, lattice);
    let fine = multiplier_sups(params, &lattice.refined());
    let names = ["sup_M", "sup_grad_M", "sup_hessian_M", "sup_time_symbol", "sup_riesz_symbol", "sup_k_difference"];
    for (i, name) in names.iter().enumerate() {
        b.constant(name, coarse[i]).constant(&format!("{name}_refined"), fine[i]);
        b.criterion(&format!("{name}_drift"), relative_drift(coarse[i], fine[i]), Relation::AtMost(0.10));
    }
    let bound = params.period() / (2.0 * PI);
    b.criterion("sup_M_over_bound", fine[0] / bound, Relation::AtMost(1.0 + 1e-14));
    b.criterion("steady_row_max", coarse[6].max(fine[6]), Relation::AtMost(0.0));
    Ok(b.finish())
}
