//! `solve`: multiplier solve on a periodic grid, residual summary and optional cross-check.

use super::config::{sha256_hex, Provenance, RunConfig};
use super::{output_dir, write_json};
use crate::error::{Error, Result};
use crate::spectral::io::{read_field, write_field};
use crate::spectral::{
    apply_tp_stokes_operator, default_plane_waves, divergence, gaussian_bump_pulse, make_grid, plane_wave_forcing,
    solve_by_representation, solve_tp_stokes, GridField, GridSpec,
};
use serde::Serialize;
use std::path::Path;

#[derive(Serialize)]
struct FileRecord {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct CrossCheck {
    truncation: usize,
    velocity_relative_l2: f64,
    /// Relative to ‖p‖, or to ‖f‖ when ‖p‖ ≤ 1e-12‖f‖.
    pressure_relative_l2: f64,
}

#[derive(Serialize)]
struct GridRecord {
    n: usize,
    #[serde(rename = "T")]
    period: f64,
    #[serde(rename = "L")]
    half_length: f64,
    #[serde(rename = "N")]
    n_space: usize,
    #[serde(rename = "Nt")]
    n_time: usize,
}

#[derive(Serialize)]
struct Summary {
    #[serde(flatten)]
    provenance: Provenance,
    forcing: String,
    forcing_sha256: Option<String>,
    grid: GridRecord,
    /// ‖(∂ₜ − Δ)u + ∇p − f‖ / ‖f‖ in discrete L².
    residual: f64,
    /// ‖div u‖ / ‖u‖ in discrete L² (absolute when u = 0).
    divergence: f64,
    /// Relative L² distance to the closed-form solution of the manufactured forcing.
    exact_error: Option<f64>,
    cross_check: Option<CrossCheck>,
    files: Vec<FileRecord>,
}

/// Relative discrete L² distance; absolute when the reference vanishes.
fn relative_l2(a: &GridField, b: &GridField) -> f64 {
    let num: f64 = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.values().iter().map(|y| y.norm_sqr()).sum();
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

fn load_forcing(config: &RunConfig) -> Result<(GridSpec, GridField, Option<GridField>, Option<String>)> {
    let params = config.params()?;
    let g = config.grid;
    match config.solve.forcing.as_str() {
        "manufactured" => {
            let grid = make_grid(g.half_length, g.n_space, g.n_time, params)?;
            let (f, u) = plane_wave_forcing(&grid, &default_plane_waves(params.n()))?;
            Ok((grid, f, Some(u), None))
        }
        "gaussian-bump" => {
            let grid = make_grid(g.half_length, g.n_space, g.n_time, params)?;
            let radius = config.solve.bump_radius.unwrap_or(g.half_length / 4.0);
            Ok((grid, gaussian_bump_pulse(&grid, radius)?, None, None))
        }
        path => {
            let bytes = std::fs::read(path).map_err(|e| Error::Io(format!("cannot read forcing {path}: {e}")))?;
            let f = read_field(bytes.as_slice())?;
            let grid = *f.grid();
            if grid.dim() != params.n() || grid.params().period() != params.period() {
                return Err(Error::Config(format!(
                    "forcing file is for n = {}, T = {}, configured n = {}, T = {}",
                    grid.dim(),
                    grid.params().period(),
                    params.n(),
                    params.period()
                )));
            }
            Ok((grid, f, None, Some(sha256_hex(&bytes))))
        }
    }
}

fn write_container(dir: &Path, name: &str, field: &GridField) -> Result<FileRecord> {
    let mut buf = Vec::new();
    write_field(&mut buf, field)?;
    let path = dir.join(name);
    std::fs::write(&path, &buf).map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(FileRecord { path: name.to_string(), sha256: sha256_hex(&buf) })
}

pub fn run(config: &RunConfig) -> Result<i32> {
    let (grid, f, exact, forcing_sha256) = load_forcing(config)?;
    let (u, p) = solve_tp_stokes(&grid, &f)?;
    let residual = relative_l2(&apply_tp_stokes_operator(&grid, &u, &p)?, &f);
    let div = divergence(&grid, &u)?;
    let u_norm = u.l2_norm();
    let divergence = if u_norm == 0.0 { div.l2_norm() } else { div.l2_norm() / u_norm };
    let cross_check = if config.solve.cross_check {
        let k = config.truncation.unwrap_or(grid.max_mode());
        let (ur, pr) = solve_by_representation(&grid, &f, k)?;
        let dp = pr.values().iter().zip(p.values()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        let reference = if p.l2_norm() > 1e-12 * f.l2_norm() { p.l2_norm() } else { f.l2_norm() };
        Some(CrossCheck {
            truncation: k,
            velocity_relative_l2: relative_l2(&ur, &u),
            pressure_relative_l2: dp / reference,
        })
    } else {
        None
    };
    let dir = output_dir(config, "tpstokes-solve")?;
    let files = vec![write_container(&dir, "u.tpsg", &u)?, write_container(&dir, "p.tpsg", &p)?];
    let summary = Summary {
        provenance: Provenance::of(config),
        forcing: config.solve.forcing.clone(),
        forcing_sha256,
        grid: GridRecord {
            n: grid.dim(),
            period: grid.params().period(),
            half_length: grid.half_length(),
            n_space: grid.n_space(),
            n_time: grid.n_time(),
        },
        residual,
        divergence,
        exact_error: exact.as_ref().map(|e| relative_l2(&u, e)),
        cross_check,
        files,
    };
    write_json(&dir.join("summary.json"), &summary)?;
    super::emit(&format!("{}\n", serde_json::to_string_pretty(&summary).map_err(|e| Error::Io(e.to_string()))?));
    Ok(0)
}
