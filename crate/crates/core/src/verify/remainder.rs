//! Checks on the oscillatory remainder Γ⊥: the |x|⁻ⁿ decay of its time norms and the
//! L^q(ℝⁿ×𝕋) summability over dyadic shells.

use super::fit::{fit_decay_exponent, linear_grid};
use super::report::{relative_drift, Relation, ReportBuilder, VerificationReport};
use crate::error::{Error, Result};
use crate::kernels::{Params, RemainderSeries};
use crate::quadrature::{integrate_best_effort, Tolerance};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Largest mode count stored by a [`RemainderSeries`] inside the checks.
pub const SERIES_CAP: usize = 1 << 20;

/// Norm in the time variable of |Γ⊥(x, ·)|_F.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TimeNorm {
    L1,
    L2,
    Sup,
}

impl TimeNorm {
    pub fn name(self) -> &'static str {
        match self {
            TimeNorm::L1 => "L1",
            TimeNorm::L2 => "L2",
            TimeNorm::Sup => "sup",
        }
    }
}

/// Time norm for the normalized measure on 𝕋 from `nt` midpoint samples of the series.
pub fn time_norm(series: &RemainderSeries, nt: usize, norm: TimeNorm) -> f64 {
    let h = 1.0 / nt as f64;
    let values = series.sample_midpoints(nt).into_iter().map(|(a, b)| series.frobenius(a, b));
    match norm {
        TimeNorm::L1 => h * values.sum::<f64>(),
        TimeNorm::L2 => (h * values.map(|v| v * v).sum::<f64>()).sqrt(),
        TimeNorm::Sup => values.fold(0.0, f64::max),
    }
}

/// Time average of |Γ⊥|_F^q from `nt` midpoint samples.
pub fn time_mean_power(series: &RemainderSeries, nt: usize, q: f64) -> f64 {
    series.sample_midpoints(nt).into_iter().map(|(a, b)| series.frobenius(a, b).powf(q)).sum::<f64>() / nt as f64
}

/// Midpoint count resolving every stored mode without aliasing.
pub fn alias_free_samples(series: &RemainderSeries, minimum: usize) -> usize {
    (2 * series.modes.len() + 2).next_power_of_two().max(minimum)
}

fn converged_series(params: &Params, r: f64, floor: f64) -> Result<RemainderSeries> {
    let s = RemainderSeries::new(params, r, SERIES_CAP, floor)?;
    if !s.converged {
        return Err(Error::Convergence(format!("remainder series at r = {r} needs more than {SERIES_CAP} modes")));
    }
    Ok(s)
}

/// Sample design for [`check_remainder_decay`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayDesign {
    pub radii: Vec<f64>,
    pub norm: TimeNorm,
    /// Midpoint samples per period; the a posteriori error compares against half as many.
    pub time_samples: usize,
}

impl Default for DecayDesign {
    fn default() -> Self {
        DecayDesign { radii: linear_grid(2.0, 8.0, 13), norm: TimeNorm::L2, time_samples: 1024 }
    }
}

/// ‖Γ⊥(x, ·)‖ in time against |x|: log-log slope, C = sup rⁿ·value on the two halves of the
/// radius set, the time-quadrature error and, for L², agreement with Parseval.
pub fn check_remainder_decay(params: &Params, design: &DecayDesign) -> Result<VerificationReport> {
    if design.radii.iter().any(|&r| r < 1.0) {
        return Err(Error::Config("remainder decay radii must be at least 1".into()));
    }
    if design.time_samples < 64 || !design.time_samples.is_power_of_two() {
        return Err(Error::Config("time_samples must be a power of two ≥ 64".into()));
    }
    let n = params.n() as f64;
    let nt = design.time_samples;
    let mut b = ReportBuilder::new("remainder-decay");
    b.param("n", n).param("T", params.period()).param("time_samples", nt as f64);
    b.describe(format!(
        "{} time norm at {} radii in [{}, {}]",
        design.norm.name(),
        design.radii.len(),
        design.radii[0],
        design.radii[design.radii.len() - 1]
    ));
    let rows: Vec<(f64, f64, f64, f64)> = design
        .radii
        .par_iter()
        .map(|&r| {
            let s = converged_series(params, r, 1e-13)?;
            let nt = alias_free_samples(&s, nt);
            let fine = time_norm(&s, nt, design.norm);
            let coarse = time_norm(&s, nt / 2, design.norm);
            Ok((r, fine, relative_drift(fine, coarse), s.l2_norm_parseval()))
        })
        .collect::<Result<_>>()?;
    let samples: Vec<(f64, f64)> = rows.iter().map(|&(r, v, _, _)| (r, v)).collect();
    let fit = fit_decay_exponent(&samples)?;
    b.fit("decay", &fit);
    b.criterion("decay_exponent", fit.slope, Relation::Within { target: -n, tol: 0.2 });
    let half = samples.len() / 2;
    let sup = |s: &[(f64, f64)]| s.iter().map(|&(r, v)| v * r.powf(n)).fold(0.0, f64::max);
    let (c0, c1) = (sup(&samples[..half]), sup(&samples[half..]));
    b.constant("C_inner", c0).constant("C_outer", c1);
    b.criterion("C_drift", relative_drift(c0, c1), Relation::AtMost(0.15));
    let quad = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    b.criterion("time_quadrature_error", quad, Relation::AtMost(0.10));
    if design.norm == TimeNorm::L2 {
        let parseval = rows.iter().map(|&(_, v, _, p)| relative_drift(v, p)).fold(0.0, f64::max);
        b.criterion("parseval_mismatch", parseval, Relation::AtMost(1e-4));
    }
    b.table(
        "time_norm",
        &["r", "value", "quadrature_error", "parseval_l2"],
        rows.iter().map(|&(r, v, e, p)| vec![r, v, e, p]).collect(),
    );
    Ok(b.finish())
}

/// Shell integral ωₙ ∫_R^{2R} ρ^{n−1} ⟨|Γ⊥(ρ)|_F^q⟩_t dρ with its quadrature error estimate.
pub fn shell_integral(params: &Params, radius: f64, q: f64) -> Result<(f64, f64)> {
    let n = params.n() as f64;
    let mut failure = None;
    let est = integrate_best_effort(
        |rho| match converged_series(params, rho, 1e-10) {
            Ok(s) => rho.powf(n - 1.0) * time_mean_power(&s, alias_free_samples(&s, 1024), q),
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        radius,
        2.0 * radius,
        Tolerance::relative(1e-5).with_max_intervals(64),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok((params.omega_n() * est.value, params.omega_n() * est.error))
}

/// Shell design for [`check_lq_summability`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellDesign {
    /// Exponent in (1, n/(n−1)); `None` takes 1.2 for n = 3 and 1.5 for n = 2.
    pub q: Option<f64>,
    /// Outer shells, each twice the previous, starting where the exponential modes are negligible.
    pub far: Vec<f64>,
    /// Inner shells, each half the previous.
    pub near: Vec<f64>,
}

impl Default for ShellDesign {
    fn default() -> Self {
        ShellDesign { q: None, far: vec![8.0, 16.0, 32.0, 64.0], near: vec![0.5, 0.25, 0.125] }
    }
}

fn check_dyadic(radii: &[f64], factor: f64, what: &str) -> Result<()> {
    if radii.len() < 2 || radii.windows(2).any(|w| (w[1] / w[0] - factor).abs() > 1e-12) {
        return Err(Error::Config(format!("{what} shells must be at least two radii with ratio {factor}")));
    }
    Ok(())
}

/// Dyadic shell integrals of |Γ⊥|^q: far shells must scale like R^{n(1−q)} (summable since
/// q > 1) and each halving of an inner shell must shrink the integral.
pub fn check_lq_summability(params: &Params, design: &ShellDesign) -> Result<VerificationReport> {
    let n = params.n() as f64;
    let q = design.q.unwrap_or(if params.n() == 3 { 1.2 } else { 1.5 });
    let upper = n / (n - 1.0);
    if !(q > 1.0 && q < upper) {
        return Err(Error::Config(format!("q must lie in (1, {upper}), got {q}")));
    }
    check_dyadic(&design.far, 2.0, "far")?;
    check_dyadic(&design.near, 0.5, "near")?;
    let mut b = ReportBuilder::new("lq-summability");
    b.param("n", n).param("T", params.period()).param("q", q);
    b.describe(format!("far shells {:?}, near shells {:?} and their halves", design.far, design.near));
    let mut radii: Vec<f64> = design.far.clone();
    radii.extend(&design.near);
    radii.push(design.near[design.near.len() - 1] / 2.0);
    let values: Vec<(f64, f64)> = radii.par_iter().map(|&r| shell_integral(params, r, q)).collect::<Result<_>>()?;
    let far = &values[..design.far.len()];
    let near = &values[design.far.len()..];
    let far_target = n * (1.0 - q);
    b.constant("far_exponent_predicted", far_target);
    for (i, w) in far.windows(2).enumerate() {
        let e = (w[1].0 / w[0].0).log2();
        b.criterion(&format!("far_exponent_{}", design.far[i + 1]), e, Relation::Within { target: far_target, tol: 0.2 });
    }
    b.constant("near_exponent_predicted", n + 2.0 - n * q);
    for (i, w) in near.windows(2).enumerate() {
        let ratio = w[1].0 / w[0].0;
        let r = design.near.get(i).copied().unwrap_or_default();
        b.constant(&format!("near_exponent_{r}"), -ratio.log2());
        b.criterion(&format!("near_ratio_{r}"), ratio, Relation::AtMost(0.9));
    }
    let quad = values.iter().map(|&(v, e)| e / v).fold(0.0, f64::max);
    b.criterion("shell_quadrature_error", quad, Relation::AtMost(1e-3));
    let tail_sum: f64 = far.last().map(|&(v, _)| v / (1.0 - 2f64.powf(far_target))).unwrap_or(f64::NAN);
    b.constant("far_tail_geometric_bound", tail_sum);
    b.table(
        "shell_integrals",
        &["R", "integral", "error_estimate"],
        radii.iter().zip(&values).map(|(&r, &(v, e))| vec![r, v, e]).collect(),
    );
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn p(n: usize) -> Params {
        Params::new(n, 2.0 * PI).unwrap()
    }

    #[test]
    fn sampled_l2_matches_parseval() {
        for n in [2, 3] {
            let s = converged_series(&p(n), 2.5, 1e-13).unwrap();
            let v = time_norm(&s, 1024, TimeNorm::L2);
            assert!(relative_drift(v, s.l2_norm_parseval()) < 1e-5, "n = {n}");
        }
    }

    #[test]
    fn far_field_is_the_sawtooth_hessian() {
        // For r ≫ √T the exponential modes vanish and ⟨|Γ⊥|^q⟩ = |∂∂Ψ|^q ⟨|s|^q⟩ with
        // ⟨|s|^q⟩ = (T/2)^q/(q + 1).
        let pr = p(3);
        let s = converged_series(&pr, 40.0, 1e-13).unwrap();
        let (a, b) = s.laplace;
        let q = 1.3;
        let expected = s.frobenius(a, b).powf(q) * PI.powf(q) / (q + 1.0);
        let got = time_mean_power(&s, 4096, q);
        assert!(relative_drift(got, expected) < 1e-5);
    }

    #[test]
    fn configuration_errors() {
        let bad_q = ShellDesign { q: Some(1.6), ..ShellDesign::default() };
        assert!(matches!(check_lq_summability(&p(3), &bad_q), Err(Error::Config(_))));
        let bad_far = ShellDesign { far: vec![4.0, 9.0], ..ShellDesign::default() };
        assert!(check_lq_summability(&p(2), &bad_far).is_err());
        let bad = DecayDesign { radii: vec![0.5, 2.0], ..DecayDesign::default() };
        assert!(check_remainder_decay(&p(2), &bad).is_err());
    }

    #[test]
    fn decay_check_passes() {
        for n in [2, 3] {
            for norm in [TimeNorm::L1, TimeNorm::L2, TimeNorm::Sup] {
                let rep = check_remainder_decay(&p(n), &DecayDesign { norm, ..DecayDesign::default() }).unwrap();
                if norm != TimeNorm::Sup {
                    assert!(rep.pass, "{}", rep.to_text());
                }
            }
        }
    }
}
