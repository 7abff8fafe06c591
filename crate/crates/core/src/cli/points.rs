//! Point-set syntax of `eval`: segments `(a,b)..(c,d):M`, circles `R:M` and lists `(a,b);(c,d)`.

use crate::error::{Error, Result};
use std::f64::consts::PI;

fn config(msg: String) -> Error {
    Error::Config(msg)
}

/// Parses `(x₁, …, xₙ)` with exactly `n` finite components.
pub fn parse_point(s: &str, n: usize) -> Result<Vec<f64>> {
    let t = s.trim();
    let inner = t
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| config(format!("point '{t}' must be written (x1,...,xn)")))?;
    let coords: Vec<f64> = inner
        .split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|_| config(format!("bad coordinate '{}' in '{t}'", c.trim()))))
        .collect::<Result<_>>()?;
    if coords.len() != n {
        return Err(config(format!("point '{t}' has {} coordinates, expected {n}", coords.len())));
    }
    if coords.iter().any(|c| !c.is_finite()) {
        return Err(config(format!("point '{t}' is not finite")));
    }
    Ok(coords)
}

fn parse_count(s: &str, what: &str) -> Result<usize> {
    match s.trim().parse::<usize>() {
        Ok(m) if m >= 1 => Ok(m),
        _ => Err(config(format!("{what} needs a positive point count, got '{}'", s.trim()))),
    }
}

/// `M` equispaced points from `a` to `b` inclusive (`a` alone when M = 1).
pub fn parse_line(s: &str, n: usize) -> Result<Vec<Vec<f64>>> {
    let (seg, count) = s.rsplit_once(':').ok_or_else(|| config(format!("line '{s}' must be (a)..(b):M")))?;
    let (a, b) = seg.split_once("..").ok_or_else(|| config(format!("line '{s}' must be (a)..(b):M")))?;
    let (a, b) = (parse_point(a, n)?, parse_point(b, n)?);
    let m = parse_count(count, "line")?;
    Ok((0..m)
        .map(|j| {
            let s = if m == 1 { 0.0 } else { j as f64 / (m - 1) as f64 };
            a.iter().zip(&b).map(|(p, q)| p + s * (q - p)).collect()
        })
        .collect())
}

/// `M` points at angles 2πj/M on the circle of radius R in the x₁x₂-plane.
pub fn parse_ring(s: &str, n: usize) -> Result<Vec<Vec<f64>>> {
    let (r, count) = s.split_once(':').ok_or_else(|| config(format!("ring '{s}' must be R:M")))?;
    let r: f64 = r.trim().parse().map_err(|_| config(format!("bad ring radius in '{s}'")))?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(config(format!("ring radius must be positive, got {r}")));
    }
    let m = parse_count(count, "ring")?;
    Ok((0..m)
        .map(|j| {
            let a = 2.0 * PI * j as f64 / m as f64;
            let mut x = vec![0.0; n];
            x[0] = r * a.cos();
            x[1] = r * a.sin();
            x
        })
        .collect())
}

/// Semicolon-separated points.
pub fn parse_list(s: &str, n: usize) -> Result<Vec<Vec<f64>>> {
    s.split(';').filter(|p| !p.trim().is_empty()).map(|p| parse_point(p, n)).collect()
}
