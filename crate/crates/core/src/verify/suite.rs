//! Named registry of every check, driven by one serializable configuration.

use super::estimates::{
    check_geometric_sum, check_mode_sum_estimate, check_multiplier_derivative_bounds, check_pointwise_mode_bound,
    ModeSumDesign, MultiplierLattice, PointwiseDesign,
};
use super::fit::linear_grid;
use super::remainder::{check_lq_summability, check_remainder_decay, DecayDesign, ShellDesign};
use super::report::VerificationReport;
use super::symbol::{check_symbol_transform, default_symbol_cases, SymbolCase};
use super::w21q::{check_w21q_ratio, W21qDesign};
use crate::error::{Error, Result};
use crate::kernels::Params;
use crate::specfun::{check_hankel_bounds, HankelOrder, HankelSampleSet};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Every check name accepted by [`run_check`], in suite order.
pub const CHECKS: [&str; 9] = [
    "hankel-bounds",
    "mode-sum",
    "geometric-sum",
    "pointwise-mode-bound",
    "remainder-decay",
    "lq-summability",
    "w21q-ratio",
    "multiplier-bounds",
    "symbol-transform",
];

pub fn available_checks() -> &'static [&'static str] {
    &CHECKS
}

/// Configuration of the whole suite; every field has a default, so `{}` is a valid config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub n: usize,
    pub period: f64,
    /// Seed of every randomized check.
    pub seed: u64,
    /// Defaults to the Helmholtz order n/2 − 1.
    pub hankel_order: Option<f64>,
    pub hankel: HankelSampleSet,
    pub mode_sum: ModeSumDesign,
    pub geometric_q: Vec<f64>,
    pub pointwise: PointwiseDesign,
    pub decay: DecayDesign,
    pub shells: ShellDesign,
    /// Dimension of the W^{2,1}_q check, which runs on full space-time grids.
    pub w21q_n: Option<usize>,
    pub w21q: W21qDesign,
    pub multiplier: MultiplierLattice,
    /// Defaults to the per-dimension cases of [`default_symbol_cases`].
    pub symbol_cases: Option<Vec<SymbolCase>>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            n: 3,
            period: 2.0 * PI,
            seed: 20_240_601,
            hankel_order: None,
            hankel: HankelSampleSet::default(),
            mode_sum: ModeSumDesign::default(),
            geometric_q: linear_grid(0.05, 0.95, 19),
            pointwise: PointwiseDesign::default(),
            decay: DecayDesign::default(),
            shells: ShellDesign::default(),
            w21q_n: Some(2),
            w21q: W21qDesign::default(),
            multiplier: MultiplierLattice::default(),
            symbol_cases: None,
        }
    }
}

impl SuiteConfig {
    pub fn params(&self) -> Result<Params> {
        Params::new(self.n, self.period)
    }
}

/// Runs one named check; unknown names and invalid designs are configuration errors.
pub fn run_check(name: &str, config: &SuiteConfig) -> Result<VerificationReport> {
    let params = config.params()?;
    match name {
        "hankel-bounds" => {
            let order = match config.hankel_order {
                Some(nu) => HankelOrder::from_value(nu).map_err(|e| Error::Config(e.to_string()))?,
                None => HankelOrder::for_dimension(config.n)?,
            };
            Ok(check_hankel_bounds(order, &config.hankel))
        }
        "mode-sum" => check_mode_sum_estimate(&params, &config.mode_sum),
        "geometric-sum" => check_geometric_sum(&params, &config.geometric_q),
        "pointwise-mode-bound" => check_pointwise_mode_bound(&params, &config.pointwise),
        "remainder-decay" => check_remainder_decay(&params, &config.decay),
        "lq-summability" => check_lq_summability(&params, &config.shells),
        "w21q-ratio" => {
            let p = Params::new(config.w21q_n.unwrap_or(config.n), config.period)?;
            check_w21q_ratio(&p, &W21qDesign { seed: config.seed, ..config.w21q.clone() })
        }
        "multiplier-bounds" => check_multiplier_derivative_bounds(&params, &config.multiplier),
        "symbol-transform" => {
            let cases = config.symbol_cases.clone().unwrap_or_else(|| default_symbol_cases(config.n));
            check_symbol_transform(&params, &cases)
        }
        other => Err(Error::Config(format!("unknown check '{other}'; available: {}", CHECKS.join(", ")))),
    }
}
