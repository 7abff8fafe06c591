use super::grid::GridSpec;
use crate::error::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Relative imaginary residue tolerated when a physical field is declared real.
pub const REALNESS_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    Physical,
    Spectral,
}

/// Vector field on a grid, stored as (component, time, space) with flat spatial indices.
///
/// Spectral coefficients are `f̂(ξ, k) = N^{−n/2} Σ_j (1/Nt) Σ_l f(x_j, t_l) e^{−i(ξ·x_j + ωk t_l)}`,
/// so that `f(x, t) = N^{−n/2} Σ_ξ Σ_k f̂(ξ, k) e^{i(ξ·x + ωk t)}` on the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    grid: GridSpec,
    components: usize,
    representation: Representation,
    values: Vec<Complex64>,
}

impl GridField {
    pub fn zeros(grid: &GridSpec, components: usize, representation: Representation) -> Self {
        GridField {
            grid: *grid,
            components,
            representation,
            values: vec![Complex64::new(0.0, 0.0); components * grid.component_len()],
        }
    }

    pub fn from_complex(
        grid: &GridSpec,
        components: usize,
        representation: Representation,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        if components == 0 || values.len() != components * grid.component_len() {
            return Err(Error::Shape(format!(
                "{} values do not fill {components} components of {} samples",
                values.len(),
                grid.component_len()
            )));
        }
        Ok(GridField { grid: *grid, components, representation, values })
    }

    pub fn from_real(grid: &GridSpec, components: usize, values: &[f64]) -> Result<Self> {
        let values = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        Self::from_complex(grid, components, Representation::Physical, values)
    }

    /// Samples `f(x, t, out)` at every grid point.
    pub fn from_fn(grid: &GridSpec, components: usize, f: impl Fn(&[f64], f64, &mut [f64]) + Sync) -> Self {
        let n = grid.dim();
        let len = grid.component_len();
        let spatial = grid.spatial_len();
        let samples: Vec<Vec<f64>> = (0..len)
            .into_par_iter()
            .map(|i| {
                let (l, s) = (i / spatial, i % spatial);
                let x = grid.position(s);
                let mut out = vec![0.0; components];
                f(&x[..n], grid.time(l), &mut out);
                out
            })
            .collect();
        let mut field = Self::zeros(grid, components, Representation::Physical);
        for (i, v) in samples.iter().enumerate() {
            for c in 0..components {
                field.values[c * len + i] = Complex64::new(v[c], 0.0);
            }
        }
        field
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn index(&self, component: usize, l: usize, s: usize) -> usize {
        (component * self.grid.n_time() + l) * self.grid.spatial_len() + s
    }

    pub fn get(&self, component: usize, l: usize, s: usize) -> Complex64 {
        self.values[self.index(component, l, s)]
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let len = self.grid.component_len();
        &self.values[c * len..(c + 1) * len]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// max |Im| relative to max |v| (0 for the zero field).
    pub fn imaginary_residue(&self) -> f64 {
        let m = self.max_abs();
        if m == 0.0 {
            return 0.0;
        }
        self.values.iter().fold(0.0f64, |a, v| a.max(v.im.abs())) / m
    }

    /// Real parts after checking the imaginary residue.
    pub fn to_real(&self) -> Result<Vec<f64>> {
        if self.representation != Representation::Physical {
            return Err(Error::Shape("only physical fields have real values".into()));
        }
        let residue = self.imaginary_residue();
        if residue > REALNESS_TOLERANCE {
            return Err(Error::Convergence(format!("physical field has imaginary residue {residue:e}")));
        }
        Ok(self.values.iter().map(|v| v.re).collect())
    }

    /// Drops the imaginary part after checking it is round-off relative to the larger of the
    /// field's own size and `reference` (the size of the data it was computed from).
    pub(crate) fn into_real(mut self, reference: f64) -> Result<Self> {
        let scale = self.max_abs().max(reference);
        let residue = self.values.iter().fold(0.0f64, |a, v| a.max(v.im.abs()));
        if residue > REALNESS_TOLERANCE * scale {
            return Err(Error::Convergence(format!("physical field has imaginary residue {residue:e} at scale {scale:e}")));
        }
        for v in self.values.iter_mut() {
            v.im = 0.0;
        }
        Ok(self)
    }

    /// Discrete L² norm over box × 𝕋 with normalized time measure; the same number in
    /// either representation.
    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        let h = self.grid.spacing().powi(self.grid.dim() as i32);
        match self.representation {
            Representation::Physical => (h * sum / self.grid.n_time() as f64).sqrt(),
            Representation::Spectral => (h * sum).sqrt(),
        }
    }

    pub fn transform_forward(&self) -> Result<GridField> {
        if self.representation != Representation::Physical {
            return Err(Error::Shape("forward transform needs a physical field".into()));
        }
        let mut out = self.clone();
        spatial_transform(&self.grid, &mut out.values, false);
        time_transform(&self.grid, &mut out.values, false);
        out.representation = Representation::Spectral;
        Ok(out)
    }

    pub fn transform_inverse(&self) -> Result<GridField> {
        if self.representation != Representation::Spectral {
            return Err(Error::Shape("inverse transform needs a spectral field".into()));
        }
        let mut out = self.clone();
        time_transform(&self.grid, &mut out.values, true);
        spatial_transform(&self.grid, &mut out.values, true);
        out.representation = Representation::Physical;
        Ok(out)
    }
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut planner = FftPlanner::new();
    if inverse {
        planner.plan_fft_inverse(len)
    } else {
        planner.plan_fft_forward(len)
    }
}

/// Unitary n-dimensional spatial DFT of every length-Nⁿ slice, with the (−1)^{Σm} phase of the
/// box origin at −L.
pub(crate) fn spatial_transform(grid: &GridSpec, data: &mut [Complex64], inverse: bool) {
    let nn = grid.n_space();
    let dim = grid.dim();
    let spatial = grid.spatial_len();
    let fft = plan(nn, inverse);
    let scale = (spatial as f64).sqrt().recip();
    let sign: Vec<f64> = (0..spatial)
        .map(|s| if grid.multi_index(s)[..dim].iter().sum::<usize>() % 2 == 0 { scale } else { -scale })
        .collect();
    data.par_chunks_mut(spatial).for_each(|slice| {
        if inverse {
            slice.iter_mut().zip(&sign).for_each(|(v, s)| *v *= s);
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); nn];
        for axis in 0..dim {
            let stride = nn.pow((dim - 1 - axis) as u32);
            if stride == 1 {
                fft.process(slice);
                continue;
            }
            let block = stride * nn;
            for outer in (0..spatial).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for (i, b) in buf.iter_mut().enumerate() {
                        *b = slice[base + i * stride];
                    }
                    fft.process(&mut buf);
                    for (i, b) in buf.iter().enumerate() {
                        slice[base + i * stride] = *b;
                    }
                }
            }
        }
        if !inverse {
            slice.iter_mut().zip(&sign).for_each(|(v, s)| *v *= s);
        }
    });
}

/// Time DFT along every (component, space) line: forward (1/Nt)Σ, inverse Σ.
pub(crate) fn time_transform(grid: &GridSpec, data: &mut [Complex64], inverse: bool) {
    let nt = grid.n_time();
    let spatial = grid.spatial_len();
    let fft = plan(nt, inverse);
    let scale = if inverse { 1.0 } else { 1.0 / nt as f64 };
    data.par_chunks_mut(nt * spatial).for_each(|comp| {
        let mut buf = vec![Complex64::new(0.0, 0.0); nt];
        for s in 0..spatial {
            for (l, b) in buf.iter_mut().enumerate() {
                *b = comp[l * spatial + s];
            }
            fft.process(&mut buf);
            for (l, b) in buf.iter().enumerate() {
                comp[l * spatial + s] = *b * scale;
            }
        }
    });
}
