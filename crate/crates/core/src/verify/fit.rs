use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Minimum number of samples for any regression.
pub const MIN_SAMPLES: usize = 6;

/// Least-squares power law `v ≈ e^intercept · r^slope`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    /// Two standard errors of the slope.
    pub slope_half_width: f64,
    /// max |v / fit − 1| over the samples.
    pub max_rel_deviation: f64,
}

impl DecayFit {
    pub fn predict(&self, r: f64) -> f64 {
        (self.intercept + self.slope * r.ln()).exp()
    }
}

/// Least-squares model `v ≈ e^c · r^power · e^{−rate·r}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub rate: f64,
    pub power: f64,
    pub log_prefactor: f64,
    /// Two standard errors of the rate.
    pub rate_half_width: f64,
    pub max_rel_deviation: f64,
}

fn validate(samples: &[(f64, f64)]) -> Result<()> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::Fit(format!("need at least {MIN_SAMPLES} samples, got {}", samples.len())));
    }
    for w in samples.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(Error::Fit("radii must be strictly increasing".into()));
        }
    }
    for &(r, v) in samples {
        if !(r > 0.0 && v > 0.0 && r.is_finite() && v.is_finite()) {
            return Err(Error::Fit(format!("non-positive or non-finite sample ({r}, {v})")));
        }
    }
    Ok(())
}

/// Ordinary least squares on the columns of `x`; returns coefficients and their standard errors.
fn least_squares(x: &[Vec<f64>], y: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = y.len();
    let p = x[0].len();
    let mut a = vec![vec![0.0; p]; p];
    let mut b = vec![0.0; p];
    for (row, &yi) in x.iter().zip(y) {
        for i in 0..p {
            b[i] += row[i] * yi;
            for j in 0..p {
                a[i][j] += row[i] * row[j];
            }
        }
    }
    let inv = invert(&a).ok_or_else(|| Error::Fit("singular normal equations".into()))?;
    let coef: Vec<f64> = (0..p).map(|i| (0..p).map(|j| inv[i][j] * b[j]).sum()).collect();
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(row, &yi)| {
            let f: f64 = row.iter().zip(&coef).map(|(u, c)| u * c).sum();
            (yi - f).powi(2)
        })
        .sum();
    let sigma2 = if m > p { rss / (m - p) as f64 } else { 0.0 };
    let se = (0..p).map(|i| (sigma2 * inv[i][i]).max(0.0).sqrt()).collect();
    Ok((coef, se))
}

fn invert(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let p = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..p).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..p {
        let piv = (col..p).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        let d = m[col][col];
        for v in m[col].iter_mut() {
            *v /= d;
        }
        for i in 0..p {
            if i != col {
                let f = m[i][col];
                if f != 0.0 {
                    for j in 0..2 * p {
                        m[i][j] -= f * m[col][j];
                    }
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[p..].to_vec()).collect())
}

/// Log-log least-squares fit of `(r, v)` samples.
pub fn fit_decay_exponent(samples: &[(f64, f64)]) -> Result<DecayFit> {
    validate(samples)?;
    let x: Vec<Vec<f64>> = samples.iter().map(|&(r, _)| vec![1.0, r.ln()]).collect();
    let y: Vec<f64> = samples.iter().map(|&(_, v)| v.ln()).collect();
    let (c, se) = least_squares(&x, &y)?;
    let mut fit = DecayFit {
        radii: samples.iter().map(|s| s.0).collect(),
        values: samples.iter().map(|s| s.1).collect(),
        slope: c[1],
        intercept: c[0],
        slope_half_width: 2.0 * se[1],
        max_rel_deviation: 0.0,
    };
    fit.max_rel_deviation =
        samples.iter().map(|&(r, v)| (v / fit.predict(r) - 1.0).abs()).fold(0.0, f64::max);
    Ok(fit)
}

/// Three-parameter fit separating an exponential rate from a power-law prefactor.
pub fn fit_exponential_rate(samples: &[(f64, f64)]) -> Result<RateFit> {
    validate(samples)?;
    let x: Vec<Vec<f64>> = samples.iter().map(|&(r, _)| vec![1.0, r.ln(), -r]).collect();
    let y: Vec<f64> = samples.iter().map(|&(_, v)| v.ln()).collect();
    let (c, se) = least_squares(&x, &y)?;
    let dev = samples
        .iter()
        .map(|&(r, v)| (v / (c[0] + c[1] * r.ln() - c[2] * r).exp() - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(RateFit {
        radii: samples.iter().map(|s| s.0).collect(),
        values: samples.iter().map(|s| s.1).collect(),
        rate: c[2],
        power: c[1],
        log_prefactor: c[0],
        rate_half_width: 2.0 * se[2],
        max_rel_deviation: dev,
    })
}

/// `count` points geometrically spaced on `[a, b]`, endpoints included.
pub fn geometric_grid(a: f64, b: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && a > 0.0 && b > a);
    let ratio = (b / a).ln() / (count - 1) as f64;
    (0..count).map(|i| if i + 1 == count { b } else { a * (ratio * i as f64).exp() }).collect()
}

/// `count` points evenly spaced on `[a, b]`, endpoints included.
pub fn linear_grid(a: f64, b: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && b > a);
    (0..count).map(|i| if i + 1 == count { b } else { a + (b - a) * i as f64 / (count - 1) as f64 }).collect()
}
