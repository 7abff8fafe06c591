//! Built-in forcings: superpositions of solenoidal plane waves with known solutions, and a
//! compactly supported Gaussian pulse.

use super::field::GridField;
use super::grid::GridSpec;
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Re[a e^{i(ξ₀·x + ωk t)}] with ξ₀ = (π/L)·wave and a·wave = 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneWave {
    pub wave: Vec<i64>,
    pub k: i64,
    pub amplitude: Vec<f64>,
}

/// A few solenoidal waves with distinct space and time frequencies, all resolved on a
/// 32-point axis with at least 3 time modes per side.
pub fn default_plane_waves(n: usize) -> Vec<PlaneWave> {
    let w = |wave: &[i64], k: i64, amplitude: &[f64]| PlaneWave { wave: wave.to_vec(), k, amplitude: amplitude.to_vec() };
    if n == 2 {
        vec![w(&[2, 1], 1, &[1.0, -2.0]), w(&[-3, 5], -3, &[0.5, 0.3]), w(&[0, 4], 0, &[0.7, 0.0])]
    } else {
        vec![
            w(&[1, 2, -1], 1, &[1.0, 0.0, 1.0]),
            w(&[3, 0, 2], -2, &[0.4, 0.25, -0.6]),
            w(&[0, -5, 1], 3, &[0.2, 0.1, 0.5]),
            w(&[2, 2, 0], 0, &[0.3, -0.3, 0.8]),
        ]
    }
}

fn validate_wave(grid: &GridSpec, w: &PlaneWave) -> Result<()> {
    let n = grid.dim();
    if w.wave.len() != n || w.amplitude.len() != n {
        return Err(Error::Config(format!("plane wave must have {n} wave and amplitude components")));
    }
    let half = (grid.n_space() / 2) as i64;
    if w.wave.iter().any(|m| m.abs() >= half) || w.k.unsigned_abs() as usize > grid.max_mode() {
        return Err(Error::Config(format!("plane wave {:?}, k = {} is not resolved by the grid", w.wave, w.k)));
    }
    if w.wave.iter().all(|&m| m == 0) {
        return Err(Error::Config("plane wave must have a nonzero wave vector".into()));
    }
    let dot: f64 = w.wave.iter().zip(&w.amplitude).map(|(m, a)| *m as f64 * a).sum();
    let size: f64 = w.amplitude.iter().map(|a| a.abs()).sum();
    if dot.abs() > 1e-14 * size.max(f64::MIN_POSITIVE) {
        return Err(Error::Config(format!("plane wave amplitude is not orthogonal to {:?}", w.wave)));
    }
    Ok(())
}

/// Forcing Σ Re[a e^{i(ξ₀·x + ωkt)}] and its exact solution u = Σ Re[a e^{…}/(|ξ₀|² + iωk)], p = 0.
pub fn plane_wave_forcing(grid: &GridSpec, waves: &[PlaneWave]) -> Result<(GridField, GridField)> {
    for w in waves {
        validate_wave(grid, w)?;
    }
    let n = grid.dim();
    let dxi = grid.frequency_spacing();
    let omega = grid.params().frequency();
    let phase = |w: &PlaneWave, x: &[f64], t: f64| -> f64 {
        w.wave.iter().zip(x).map(|(m, xa)| *m as f64 * dxi * xa).sum::<f64>() + omega * w.k as f64 * t
    };
    let f = GridField::from_fn(grid, n, |x, t, out| {
        out.iter_mut().for_each(|o| *o = 0.0);
        for w in waves {
            let c = phase(w, x, t).cos();
            for a in 0..n {
                out[a] += w.amplitude[a] * c;
            }
        }
    });
    let u = GridField::from_fn(grid, n, |x, t, out| {
        out.iter_mut().for_each(|o| *o = 0.0);
        for w in waves {
            let xi2: f64 = w.wave.iter().map(|m| (*m as f64 * dxi).powi(2)).sum();
            let e = Complex64::from_polar(1.0, phase(w, x, t)) / Complex64::new(xi2, omega * w.k as f64);
            for a in 0..n {
                out[a] += w.amplitude[a] * e.re;
            }
        }
    });
    Ok((f, u))
}

/// Odd-in-x pulse supported in |x| < radius: a rotational part, a compressive part that
/// generates pressure, and distinct time profiles per component. Zero spatial mean.
pub fn gaussian_bump_pulse(grid: &GridSpec, radius: f64) -> Result<GridField> {
    if !(radius > 0.0 && radius <= grid.half_length() / 4.0) {
        return Err(Error::Config(format!(
            "bump radius must lie in (0, L/4] = (0, {}], got {radius}",
            grid.half_length() / 4.0
        )));
    }
    let n = grid.dim();
    let omega = grid.params().frequency();
    let width = radius / 6.0;
    Ok(GridField::from_fn(grid, n, |x, t, out| {
        let r2: f64 = x.iter().map(|a| a * a).sum();
        let b = if r2 < radius * radius { (-r2 / (2.0 * width * width)).exp() } else { 0.0 };
        let s = omega * t;
        out[0] = (-x[1] + 0.5 * x[0]) * b * (1.0 + s.cos());
        out[1] = x[0] * b * (0.5 + (2.0 * s).sin());
        if n == 3 {
            out[2] = (x[2] - x[1]) * b * s.cos();
        }
    }))
}
