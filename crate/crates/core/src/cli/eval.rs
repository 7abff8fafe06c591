//! `eval`: kernel values on a point set as CSV.

use super::config::{KernelKind, Provenance, RunConfig};
use super::points::{parse_line, parse_list, parse_ring};
use crate::error::{Error, Result};
use crate::kernels::{mode_stokeslet, remainder_kernel, steady_stokeslet_pressure, steady_stokeslet_velocity, Truncation};
use crate::spectral::io::{format_number, write_csv};

/// Every point of the configured sets: lines, then rings, then lists.
pub fn point_set(config: &RunConfig) -> Result<Vec<Vec<f64>>> {
    let n = config.params.n;
    let mut pts = Vec::new();
    for s in &config.eval.lines {
        pts.extend(parse_line(s, n)?);
    }
    for s in &config.eval.rings {
        pts.extend(parse_ring(s, n)?);
    }
    for s in &config.eval.points {
        pts.extend(parse_list(s, n)?);
    }
    if pts.is_empty() {
        return Err(Error::Config("no evaluation points; use --line, --ring or --points".into()));
    }
    Ok(pts)
}

fn columns(n: usize, kind: KernelKind) -> Vec<String> {
    let mut c: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    c.push("t".into());
    for i in 1..=n {
        for j in 1..=n {
            match kind {
                KernelKind::Mode => {
                    c.push(format!("v{i}{j}_re"));
                    c.push(format!("v{i}{j}_im"));
                }
                _ => c.push(format!("v{i}{j}")),
            }
        }
    }
    c.extend((1..=n).map(|i| format!("p{i}")));
    c
}

/// One CSV row: position, time, velocity block row-major, pressure row.
fn row(config: &RunConfig, x: &[f64], warnings: &mut usize) -> Result<Vec<Option<f64>>> {
    let params = config.params()?;
    let n = params.n();
    let t = config.eval.t;
    let mut out: Vec<Option<f64>> = x.iter().map(|&v| Some(v)).collect();
    out.push(Some(t));
    match config.eval.kernel {
        KernelKind::Steady => {
            let v = steady_stokeslet_velocity(&params, x)?;
            out.extend(v.to_vec().into_iter().map(Some));
            out.extend(steady_stokeslet_pressure(&params, x)?.into_iter().map(Some));
        }
        KernelKind::Remainder => {
            let truncation = match config.truncation {
                Some(k) => Truncation::Fixed(k),
                None => Truncation::default(),
            };
            let s = remainder_kernel(&params, x, t, truncation)?;
            if s.warning.is_some() {
                *warnings += 1;
            }
            out.extend(s.value.to_vec().into_iter().map(Some));
            out.extend(std::iter::repeat(Some(0.0)).take(n));
        }
        KernelKind::Mode => {
            let g = mode_stokeslet(&params, config.eval.k, x)?;
            for v in g.to_vec() {
                out.push(Some(v.re));
                out.push(Some(v.im));
            }
            // The pressure of every time mode is the steady pressure kernel.
            out.extend(steady_stokeslet_pressure(&params, x)?.into_iter().map(Some));
        }
    }
    Ok(out)
}

pub fn run(config: &RunConfig) -> Result<i32> {
    let pts = point_set(config)?;
    let kind = config.eval.kernel;
    if kind == KernelKind::Mode && config.eval.k == 0 {
        return Err(Error::Config("the mode kernel needs k ≠ 0".into()));
    }
    let mut warnings = 0;
    let rows: Vec<Vec<Option<f64>>> = pts.iter().map(|x| row(config, x, &mut warnings)).collect::<Result<_>>()?;
    let prov = Provenance::of(config);
    let kernel = serde_json::to_value(kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    let header = format!(
        "# tpstokes {} params n={} T={} kernel={kernel} t={} k={} K={} seed={} config_sha256={}\n",
        prov.version,
        config.params.n,
        format_number(config.params.period),
        format_number(config.eval.t),
        config.eval.k,
        config.truncation.map_or("adaptive".to_string(), |k| k.to_string()),
        prov.seed,
        prov.config_hash
    );
    let mut buf = header.into_bytes();
    write_csv(&mut buf, &[], &columns(config.params.n, kind), &rows)?;
    match &config.output.file {
        Some(path) => {
            std::fs::write(path, &buf).map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))?
        }
        None => super::emit(&String::from_utf8_lossy(&buf)),
    }
    if warnings > 0 {
        eprintln!("tpstokes: warning: adaptive remainder summation hit its mode cap at {warnings} points");
    }
    Ok(0)
}
