//! `verify`: runs the selected checks; a failing or erroring check does not stop the others.

use super::config::{CheckSelection, Provenance, RunConfig};
use super::{exit_code, output_dir, write_json};
use crate::error::{Error, Result};
use crate::spectral::io::write_csv;
use crate::verify::fit::linear_grid;
use crate::verify::{available_checks, run_check, VerificationReport};
use serde::Serialize;
use std::collections::BTreeSet;

/// `a:b:m` as m equispaced radii from a to b inclusive.
pub fn parse_radii(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::Config(format!("radii '{spec}' must be a:b:m with 0 < a < b and m ≥ 2"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let m: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if !(a > 0.0 && b > a && b.is_finite()) || m < 2 {
        return Err(bad());
    }
    Ok(linear_grid(a, b, m))
}

/// Check names in suite order; unknown names and empty selections are configuration errors.
pub fn selected_checks(sel: &CheckSelection) -> Result<Vec<String>> {
    let available = available_checks();
    if let Some(bad) = sel.names.iter().find(|n| !available.contains(&n.as_str())) {
        return Err(Error::Config(format!("unknown check '{bad}'; available checks: {}", available.join(", "))));
    }
    if sel.all {
        return Ok(available.iter().map(|s| s.to_string()).collect());
    }
    if sel.names.is_empty() {
        return Err(Error::Config(format!(
            "no checks selected; use --all or --check NAME (available: {})",
            available.join(", ")
        )));
    }
    Ok(available.iter().filter(|a| sel.names.iter().any(|n| n == *a)).map(|s| s.to_string()).collect())
}

#[derive(Serialize)]
struct Stamped<'a> {
    #[serde(flatten)]
    provenance: &'a Provenance,
    #[serde(flatten)]
    report: &'a VerificationReport,
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    #[serde(flatten)]
    provenance: &'a Provenance,
    check: &'a str,
    error: String,
    pass: bool,
}

#[derive(Serialize)]
struct Entry {
    check: String,
    pass: bool,
    file: String,
    error: Option<String>,
}

#[derive(Serialize)]
struct Aggregate<'a> {
    #[serde(flatten)]
    provenance: &'a Provenance,
    checks: Vec<Entry>,
    unused_tolerances: Vec<String>,
    pass: bool,
}

/// Applies the overrides addressed to `check`; returns the keys that matched.
fn apply_overrides(config: &RunConfig, report: &mut VerificationReport) -> Vec<String> {
    let mut used = Vec::new();
    for (key, &bound) in &config.tolerances {
        let name = match key.split_once(':') {
            Some((c, name)) if c == report.check => name,
            Some(_) => continue,
            None => key.as_str(),
        };
        if report.override_tolerance(name, bound) {
            used.push(key.clone());
        }
    }
    used
}

pub fn run(config: &RunConfig) -> Result<i32> {
    let names = selected_checks(&config.checks)?;
    let dir = output_dir(config, "tpstokes-verify")?;
    let prov = Provenance::of(config);
    let mut entries = Vec::new();
    let mut used = BTreeSet::new();
    let mut code = 0;
    for name in &names {
        let file = format!("{name}.json");
        match run_check(name, &config.suite) {
            Ok(mut rep) => {
                used.extend(apply_overrides(config, &mut rep));
                if !config.timings {
                    rep.runtime_s = 0.0;
                }
                write_json(&dir.join(&file), &Stamped { provenance: &prov, report: &rep })?;
                for t in &rep.samples.tables {
                    let mut buf = Vec::new();
                    let pre = vec![
                        ("version".to_string(), prov.version.clone()),
                        ("config_sha256".to_string(), prov.config_hash.clone()),
                        ("seed".to_string(), prov.seed.to_string()),
                    ];
                    write_csv(&mut buf, &pre, &t.columns, &t.rows)?;
                    let path = dir.join(format!("{name}.{}.csv", t.name));
                    std::fs::write(&path, buf).map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))?;
                }
                super::emit(&rep.to_text());
                if !rep.pass {
                    code = code.max(3);
                }
                entries.push(Entry { check: name.clone(), pass: rep.pass, file, error: None });
            }
            Err(e) => {
                super::emit(&format!("check {name}: ERROR {e}\n"));
                code = code.max(exit_code(&e));
                let rec = ErrorRecord { provenance: &prov, check: name, error: e.to_string(), pass: false };
                write_json(&dir.join(&file), &rec)?;
                entries.push(Entry { check: name.clone(), pass: false, file, error: Some(e.to_string()) });
            }
        }
    }
    let unused: Vec<String> = config.tolerances.keys().filter(|k| !used.contains(*k)).cloned().collect();
    for k in &unused {
        eprintln!("tpstokes: warning: tolerance override '{k}' matched no criterion");
    }
    let pass = entries.iter().all(|e| e.pass);
    let passed = entries.iter().filter(|e| e.pass).count();
    let total = entries.len();
    write_json(&dir.join("aggregate.json"), &Aggregate { provenance: &prov, checks: entries, unused_tolerances: unused, pass })?;
    super::emit(&format!("aggregate: {passed}/{total} checks passed, {}\n", if pass { "PASS" } else { "FAIL" }));
    Ok(code)
}
