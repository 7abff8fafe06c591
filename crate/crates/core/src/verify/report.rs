use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

/// Acceptance relation of a recorded number against a declared tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Relation {
    AtMost(f64),
    AtLeast(f64),
    Within { target: f64, tol: f64 },
}

impl Relation {
    pub fn holds(&self, v: f64) -> bool {
        if !v.is_finite() {
            return false;
        }
        match *self {
            Relation::AtMost(b) => v <= b,
            Relation::AtLeast(b) => v >= b,
            Relation::Within { target, tol } => (v - target).abs() <= tol,
        }
    }

    fn describe(&self) -> String {
        match *self {
            Relation::AtMost(b) => format!("<= {b:.6e}"),
            Relation::AtLeast(b) => format!(">= {b:.6e}"),
            Relation::Within { target, tol } => format!("= {target:.6} ± {tol:.3}"),
        }
    }
}

/// A named number together with the relation it must satisfy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub name: String,
    /// `None` records a non-finite measurement, which never passes.
    pub value: Option<f64>,
    pub relation: Relation,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    pub name: String,
    pub slope: f64,
    pub slope_half_width: f64,
    pub intercept: f64,
    pub max_rel_deviation: f64,
    pub samples: usize,
}

/// A numeric table (for example `(r, value)` rows) kept for plotting and audit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|v| match v {
                    Some(x) => format!("{x:.16e}"),
                    None => "nan".to_string(),
                })
                .collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Samples {
    pub description: String,
    pub tables: Vec<Table>,
}

/// Structured outcome of one verification check.
///
/// `pass` is true iff `criteria` is non-empty and every criterion holds, so it can be
/// re-derived from the serialized numbers with [`VerificationReport::rederive_pass`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub params: BTreeMap<String, f64>,
    pub samples: Samples,
    pub fits: Vec<FitRecord>,
    pub constants: BTreeMap<String, Option<f64>>,
    pub residuals: BTreeMap<String, Option<f64>>,
    pub criteria: Vec<Criterion>,
    pub pass: bool,
    pub runtime_s: f64,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl VerificationReport {
    pub fn rederive_pass(&self) -> bool {
        !self.criteria.is_empty()
            && self.criteria.iter().all(|c| c.value.is_some_and(|v| c.relation.holds(v)))
    }

    /// Replaces the bound (or the half-width of a `Within`) of the named criterion and
    /// re-derives the pass flags. Returns whether the criterion exists.
    pub fn override_tolerance(&mut self, name: &str, bound: f64) -> bool {
        let Some(c) = self.criteria.iter_mut().find(|c| c.name == name) else {
            return false;
        };
        c.relation = match c.relation {
            Relation::AtMost(_) => Relation::AtMost(bound),
            Relation::AtLeast(_) => Relation::AtLeast(bound),
            Relation::Within { target, .. } => Relation::Within { target, tol: bound },
        };
        c.pass = c.value.is_some_and(|v| c.relation.holds(v));
        self.pass = self.rederive_pass();
        true
    }

    pub fn constant(&self, name: &str) -> Option<f64> {
        self.constants.get(name).copied().flatten()
    }

    pub fn criterion(&self, name: &str) -> Option<&Criterion> {
        self.criteria.iter().find(|c| c.name == name)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "check {}: {}", self.check, if self.pass { "PASS" } else { "FAIL" });
        let _ = writeln!(s, "  samples: {}", self.samples.description);
        for (k, v) in &self.params {
            let _ = writeln!(s, "  param {k} = {v}");
        }
        for f in &self.fits {
            let _ = writeln!(
                s,
                "  fit {}: slope {:.6} ± {:.2e}, intercept {:.6}, max rel dev {:.2e} ({} samples)",
                f.name, f.slope, f.slope_half_width, f.intercept, f.max_rel_deviation, f.samples
            );
        }
        for (k, v) in &self.constants {
            let _ = writeln!(s, "  constant {k} = {}", fmt_opt(*v));
        }
        for (k, v) in &self.residuals {
            let _ = writeln!(s, "  residual {k} = {}", fmt_opt(*v));
        }
        for c in &self.criteria {
            let _ = writeln!(
                s,
                "  [{}] {} = {} (required {})",
                if c.pass { "ok" } else { "FAIL" },
                c.name,
                fmt_opt(c.value),
                c.relation.describe()
            );
        }
        let _ = writeln!(s, "  runtime {:.3} s", self.runtime_s);
        s
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.6e}"),
        None => "non-finite".to_string(),
    }
}

/// Incrementally assembles a [`VerificationReport`]; the runtime clock starts at `new`.
pub struct ReportBuilder {
    report: VerificationReport,
    start: Instant,
}

impl ReportBuilder {
    pub fn new(check: &str) -> Self {
        ReportBuilder {
            report: VerificationReport {
                check: check.to_string(),
                params: BTreeMap::new(),
                samples: Samples { description: String::new(), tables: Vec::new() },
                fits: Vec::new(),
                constants: BTreeMap::new(),
                residuals: BTreeMap::new(),
                criteria: Vec::new(),
                pass: false,
                runtime_s: 0.0,
            },
            start: Instant::now(),
        }
    }

    pub fn param(&mut self, name: &str, v: f64) -> &mut Self {
        self.report.params.insert(name.to_string(), v);
        self
    }

    pub fn describe(&mut self, text: impl Into<String>) -> &mut Self {
        self.report.samples.description = text.into();
        self
    }

    pub fn table(&mut self, name: &str, columns: &[&str], rows: Vec<Vec<f64>>) -> &mut Self {
        self.report.samples.tables.push(Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: rows.into_iter().map(|r| r.into_iter().map(finite).collect()).collect(),
        });
        self
    }

    pub fn fit(&mut self, name: &str, fit: &super::fit::DecayFit) -> &mut Self {
        self.report.fits.push(FitRecord {
            name: name.to_string(),
            slope: fit.slope,
            slope_half_width: fit.slope_half_width,
            intercept: fit.intercept,
            max_rel_deviation: fit.max_rel_deviation,
            samples: fit.radii.len(),
        });
        self
    }

    pub fn constant(&mut self, name: &str, v: f64) -> &mut Self {
        self.report.constants.insert(name.to_string(), finite(v));
        self
    }

    pub fn residual(&mut self, name: &str, v: f64) -> &mut Self {
        self.report.residuals.insert(name.to_string(), finite(v));
        self
    }

    pub fn criterion(&mut self, name: &str, value: f64, relation: Relation) -> &mut Self {
        let pass = relation.holds(value);
        self.report.criteria.push(Criterion { name: name.to_string(), value: finite(value), relation, pass });
        self
    }

    /// Records a failed criterion for a step that could not produce a number.
    pub fn failure(&mut self, name: &str, reason: &str) -> &mut Self {
        self.report.samples.description.push_str(&format!(" [{name}: {reason}]"));
        self.report.criteria.push(Criterion {
            name: name.to_string(),
            value: None,
            relation: Relation::AtLeast(0.0),
            pass: false,
        });
        self
    }

    pub fn finish(mut self) -> VerificationReport {
        self.report.pass = self.report.rederive_pass();
        self.report.runtime_s = self.start.elapsed().as_secs_f64();
        self.report
    }
}

/// Relative drift `|a − b| / max(|a|, |b|)` between two fitted constants.
pub fn relative_drift(a: f64, b: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m == 0.0 {
        0.0
    } else {
        (a - b).abs() / m
    }
}
