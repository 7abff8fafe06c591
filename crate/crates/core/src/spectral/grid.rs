use crate::error::{Error, Result};
use crate::kernels::Params;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Periodic box [−L, L)ⁿ with N points per axis times Nt equispaced samples of one period.
///
/// Spatial points are x_j = −L + (2L/N) j and spatial frequencies ξ = (π/L) m with
/// m ∈ {−N/2, …, N/2 − 1}; time samples are t_l = T l / Nt and time modes k ∈ {−K, …, K},
/// Nt = 2K + 1. Flat spatial indices run with axis 0 slowest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    params: Params,
    half_length: f64,
    n_space: usize,
    n_time: usize,
}

pub fn make_grid(half_length: f64, n_space: usize, n_time: usize, params: Params) -> Result<GridSpec> {
    if !(half_length > 0.0 && half_length.is_finite()) {
        return Err(Error::Config(format!("box half-length must be positive, got {half_length}")));
    }
    if n_space < 8 || !n_space.is_power_of_two() {
        return Err(Error::Config(format!("points per axis must be a power of two ≥ 8, got {n_space}")));
    }
    if n_time < 3 || n_time % 2 == 0 {
        return Err(Error::Config(format!("time samples must be odd and ≥ 3, got {n_time}")));
    }
    let total = n_space.checked_pow(params.n() as u32).and_then(|s| s.checked_mul(n_time));
    if total.is_none() {
        return Err(Error::Config("grid too large".into()));
    }
    Ok(GridSpec { params, half_length, n_space, n_time })
}

impl GridSpec {
    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.params.n()
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn n_space(&self) -> usize {
        self.n_space
    }

    pub fn n_time(&self) -> usize {
        self.n_time
    }

    /// Highest time mode K = (Nt − 1)/2.
    pub fn max_mode(&self) -> usize {
        (self.n_time - 1) / 2
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_length / self.n_space as f64
    }

    /// Frequency spacing π/L.
    pub fn frequency_spacing(&self) -> f64 {
        PI / self.half_length
    }

    /// Nⁿ.
    pub fn spatial_len(&self) -> usize {
        self.n_space.pow(self.dim() as u32)
    }

    /// Nt · Nⁿ values per component.
    pub fn component_len(&self) -> usize {
        self.spatial_len() * self.n_time
    }

    /// Per-axis indices of a flat spatial index (unused axes are 0).
    pub fn multi_index(&self, s: usize) -> [usize; 3] {
        let nn = self.n_space;
        let mut out = [0; 3];
        let mut rest = s;
        for axis in (0..self.dim()).rev() {
            out[axis] = rest % nn;
            rest /= nn;
        }
        out
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.n_space + i)
    }

    /// Signed wavenumber of an array index: m for m < N/2, m − N otherwise.
    pub fn wavenumber(&self, m: usize) -> i64 {
        let nn = self.n_space as i64;
        let m = m as i64;
        if m < nn / 2 {
            m
        } else {
            m - nn
        }
    }

    /// Array index of a signed wavenumber, if it lies on the grid.
    pub fn wavenumber_index(&self, m: i64) -> Option<usize> {
        let half = self.n_space as i64 / 2;
        (-half..half).contains(&m).then(|| m.rem_euclid(self.n_space as i64) as usize)
    }

    /// Time mode of a time index: l for l ≤ K, l − Nt otherwise.
    pub fn time_mode(&self, l: usize) -> i64 {
        if l <= self.max_mode() {
            l as i64
        } else {
            l as i64 - self.n_time as i64
        }
    }

    pub fn time_index(&self, k: i64) -> Option<usize> {
        let kk = self.max_mode() as i64;
        (-kk..=kk).contains(&k).then(|| k.rem_euclid(self.n_time as i64) as usize)
    }

    pub fn position(&self, s: usize) -> [f64; 3] {
        let idx = self.multi_index(s);
        let mut x = [0.0; 3];
        for a in 0..self.dim() {
            x[a] = -self.half_length + self.spacing() * idx[a] as f64;
        }
        x
    }

    pub fn xi(&self, s: usize) -> [f64; 3] {
        let idx = self.multi_index(s);
        let mut xi = [0.0; 3];
        for a in 0..self.dim() {
            xi[a] = self.frequency_spacing() * self.wavenumber(idx[a]) as f64;
        }
        xi
    }

    pub fn time(&self, l: usize) -> f64 {
        self.params.period() * l as f64 / self.n_time as f64
    }

    /// Whether some component of the frequency sits at −N/2, which has no conjugate partner.
    pub fn is_nyquist(&self, s: usize) -> bool {
        let idx = self.multi_index(s);
        (0..self.dim()).any(|a| idx[a] == self.n_space / 2)
    }
}
