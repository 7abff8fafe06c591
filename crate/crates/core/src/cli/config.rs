//! Run configuration: a JSON file mirrors [`RunConfig`], command-line flags override it.

use crate::error::{Error, Result};
use crate::kernels::Params;
use crate::verify::SuiteConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubcommandName {
    Eval,
    Solve,
    Verify,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsConfig {
    pub n: usize,
    #[serde(rename = "T")]
    pub period: f64,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        ParamsConfig { n: 3, period: 2.0 * PI }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "L")]
    pub half_length: f64,
    #[serde(rename = "N")]
    pub n_space: usize,
    #[serde(rename = "Nt")]
    pub n_time: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { half_length: PI, n_space: 32, n_time: 9 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Directory for `solve` and `verify` outputs.
    pub dir: Option<PathBuf>,
    /// CSV file of `eval`; standard output when absent.
    pub file: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckSelection {
    pub all: bool,
    pub names: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    /// Steady Stokeslet velocity and pressure.
    Steady,
    /// Oscillating remainder Γ⊥(x, t); its pressure row is zero.
    Remainder,
    /// Single time mode Gₖ(x) (real and imaginary parts) with its pressure row.
    Mode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub kernel: KernelKind,
    /// Segments `(a,b)..(c,d):M`.
    pub lines: Vec<String>,
    /// Circles `R:M` in the x₁x₂-plane.
    pub rings: Vec<String>,
    /// Explicit lists `(a,b);(c,d)`.
    pub points: Vec<String>,
    pub t: f64,
    /// Mode index of the `mode` kernel.
    pub k: i64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { kernel: KernelKind::Steady, lines: Vec::new(), rings: Vec::new(), points: Vec::new(), t: 0.0, k: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveConfig {
    /// `manufactured`, `gaussian-bump`, or the path of a field container.
    pub forcing: String,
    /// Support radius of the Gaussian bump; `L/4` when absent.
    pub bump_radius: Option<f64>,
    pub cross_check: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig { forcing: "manufactured".into(), bump_radius: None, cross_check: false }
    }
}

/// Everything a run depends on; its canonical JSON is hashed into every output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub subcommand: Option<SubcommandName>,
    pub params: ParamsConfig,
    pub grid: GridConfig,
    /// Mode truncation K; adaptive summation when absent.
    #[serde(rename = "K")]
    pub truncation: Option<usize>,
    pub output: OutputConfig,
    pub checks: CheckSelection,
    /// Criterion bound overrides, keyed `criterion` or `check:criterion`.
    pub tolerances: BTreeMap<String, f64>,
    pub seed: u64,
    pub eval: EvalConfig,
    pub solve: SolveConfig,
    /// Sample designs of the checks; its `n`, `period` and `seed` are taken from `params` and `seed`.
    pub suite: SuiteConfig,
    /// Keep measured runtimes in report files (they are zeroed otherwise, keeping files reproducible).
    pub timings: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            subcommand: None,
            params: ParamsConfig::default(),
            grid: GridConfig::default(),
            truncation: None,
            output: OutputConfig::default(),
            checks: CheckSelection::default(),
            tolerances: BTreeMap::new(),
            seed: DEFAULT_SEED,
            eval: EvalConfig::default(),
            solve: SolveConfig::default(),
            suite: SuiteConfig::default(),
            timings: false,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("invalid config {}: {e}", path.display())))
    }

    pub fn params(&self) -> Result<Params> {
        Params::new(self.params.n, self.params.period)
    }

    /// Pins the subcommand, rejecting a file written for another one, and validates params.
    pub fn finalize(&mut self, sub: SubcommandName) -> Result<()> {
        if let Some(s) = self.subcommand {
            if s != sub {
                return Err(Error::Config(format!("config is for subcommand {s:?}, not {sub:?}")));
            }
        }
        self.subcommand = Some(sub);
        self.params()?;
        if self.truncation == Some(0) {
            return Err(Error::Config("K must be at least 1".into()));
        }
        self.suite.n = self.params.n;
        self.suite.period = self.params.period;
        self.suite.seed = self.seed;
        Ok(())
    }

    /// SHA-256 of the canonical JSON serialization with the output locations cleared, in hex.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output = OutputConfig::default();
        sha256_hex(serde_json::to_string(&c).expect("config serializes").as_bytes())
    }
}

/// Version, config hash and seed, embedded in every output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    #[serde(rename = "config_sha256")]
    pub config_hash: String,
    pub seed: u64,
}

impl Provenance {
    pub fn of(config: &RunConfig) -> Self {
        Provenance { version: VERSION.to_string(), config_hash: config.hash(), seed: config.seed }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_the_default_and_round_trips() {
        let c: RunConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(c, RunConfig::default());
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
    }

    #[test]
    fn field_names_follow_the_config_schema() {
        let c: RunConfig =
            serde_json::from_str(r#"{"params": {"n": 2, "T": 3.0}, "grid": {"L": 2.0, "N": 16, "Nt": 5}, "K": 8}"#)
                .unwrap();
        assert_eq!((c.params.n, c.params.period, c.grid.n_space, c.truncation), (2, 3.0, 16, Some(8)));
        assert!(serde_json::from_str::<RunConfig>(r#"{"grid": {"M": 3}}"#).is_err());
    }

    #[test]
    fn finalize_validates_and_pins() {
        let mut c = RunConfig { subcommand: Some(SubcommandName::Eval), ..RunConfig::default() };
        assert!(c.clone().finalize(SubcommandName::Solve).is_err());
        c.finalize(SubcommandName::Eval).unwrap();
        let mut bad = RunConfig::default();
        bad.params.n = 4;
        assert!(matches!(bad.finalize(SubcommandName::Eval), Err(Error::Config(_))));
        let mut h = RunConfig::default();
        let before = h.hash();
        h.seed += 1;
        assert_ne!(before, h.hash());
    }
}
