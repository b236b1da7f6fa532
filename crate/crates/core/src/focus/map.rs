use nalgebra::Vector3;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{BeamParams, FocusedBeam};
use crate::error::{Error, Result};
use crate::materials::HostMedium;

/// Regular transverse sampling at a fixed axial plane.
///
/// Pixel `i` sits at `x = (i - nx/2) * pitch` (integer division), so the
/// origin is always a sample point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransverseGrid {
    pub nx: usize,
    pub ny: usize,
    pub pitch_nm: f64,
    #[serde(default)]
    pub z_nm: f64,
}

impl TransverseGrid {
    pub fn square(n: usize, pitch_nm: f64) -> Self {
        Self { nx: n, ny: n, pitch_nm, z_nm: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::domain("grid must have at least one pixel per axis"));
        }
        if !(self.pitch_nm > 0.0 && self.pitch_nm.is_finite()) {
            return Err(Error::domain(format!("grid pitch must be positive, got {}", self.pitch_nm)));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - (self.nx / 2) as f64) * self.pitch_nm
    }

    pub fn y(&self, j: usize) -> f64 {
        (j as f64 - (self.ny / 2) as f64) * self.pitch_nm
    }

    /// Position of the pixel with row-major index `idx`.
    pub fn position(&self, idx: usize) -> Vector3<f64> {
        Vector3::new(self.x(idx % self.nx), self.y(idx / self.nx), self.z_nm)
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        let (x0, x1) = (self.x(0), self.x(self.nx - 1));
        let (y0, y1) = (self.y(0), self.y(self.ny - 1));
        x >= x0 && x <= x1 && y >= y0 && y <= y1
    }
}

/// Sampled complex vector field of a focused beam.
#[derive(Debug, Clone)]
pub struct FocalField {
    pub grid: TransverseGrid,
    pub values: Vec<Vector3<Complex64>>,
    pub params: BeamParams,
    pub host_index: f64,
}

impl FocalField {
    pub fn sample(beam: &FocusedBeam, grid: &TransverseGrid) -> Result<Self> {
        grid.validate()?;
        let limit = beam.params().wavelength_nm / (8.0 * beam.host().refractive_index);
        if grid.pitch_nm > limit {
            return Err(Error::domain(format!(
                "field grid pitch {} nm exceeds λ/(8 n_h) = {limit:.2} nm",
                grid.pitch_nm
            )));
        }
        let values: Vec<_> = (0..grid.len())
            .into_par_iter()
            .map(|i| beam.field(grid.position(i)))
            .collect();
        if values.iter().any(|v| !v.iter().all(|c| c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::Numerical("non-finite focal field sample".into()));
        }
        Ok(Self {
            grid: *grid,
            values,
            params: *beam.params(),
            host_index: beam.host().refractive_index,
        })
    }

    /// Bilinear interpolation at an in-plane position.
    pub fn interpolate(&self, x: f64, y: f64) -> Result<Vector3<Complex64>> {
        let g = &self.grid;
        if !g.contains(x, y) {
            return Err(Error::OutsideGrid { x_nm: x, y_nm: y });
        }
        let fx = (x - g.x(0)) / g.pitch_nm;
        let fy = (y - g.y(0)) / g.pitch_nm;
        let i = (fx.floor() as usize).min(g.nx.saturating_sub(2));
        let j = (fy.floor() as usize).min(g.ny.saturating_sub(2));
        let tx = if g.nx > 1 { fx - i as f64 } else { 0.0 };
        let ty = if g.ny > 1 { fy - j as f64 } else { 0.0 };
        let at = |ii: usize, jj: usize| self.values[jj.min(g.ny - 1) * g.nx + ii.min(g.nx - 1)];
        Ok(at(i, j) * Complex64::from((1.0 - tx) * (1.0 - ty))
            + at(i + 1, j) * Complex64::from(tx * (1.0 - ty))
            + at(i, j + 1) * Complex64::from((1.0 - tx) * ty)
            + at(i + 1, j + 1) * Complex64::from(tx * ty))
    }

    pub fn intensity(&self) -> IntensityMap {
        IntensityMap {
            grid: self.grid,
            values: self.values.iter().map(|e| e.norm_squared()).collect(),
        }
    }
}

/// Scalar map on a transverse grid, row-major (`values[j * nx + i]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntensityMap {
    pub grid: TransverseGrid,
    pub values: Vec<f64>,
}

impl IntensityMap {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.grid.nx + i]
    }
}

/// Samples the field and returns it together with `|E|²`.
pub fn focal_intensity_map(
    beam: &BeamParams,
    host: &HostMedium,
    grid: &TransverseGrid,
) -> Result<(FocalField, IntensityMap)> {
    let focused = FocusedBeam::new(beam, host)?;
    let field = FocalField::sample(&focused, grid)?;
    let map = field.intensity();
    Ok((field, map))
}

/// Grid axis along which a cross-section is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapAxis {
    X,
    Y,
}

/// FWHM (nm) of the dominant peak along `axis`, through the maximum pixel.
pub fn spot_fwhm(map: &IntensityMap, axis: MapAxis) -> Result<f64> {
    let g = &map.grid;
    let (imax, _) = map
        .values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::domain("empty map"))?;
    let (i0, j0) = (imax % g.nx, imax / g.nx);
    let (pos, vals): (Vec<f64>, Vec<f64>) = match axis {
        MapAxis::X => (0..g.nx).map(|i| (g.x(i), map.at(i, j0))).unzip(),
        MapAxis::Y => (0..g.ny).map(|j| (g.y(j), map.at(i0, j))).unzip(),
    };
    profile_fwhm(&pos, &vals)
}

/// FWHM of a sampled 1-D profile with a single dominant maximum, using linear
/// interpolation between the samples bracketing half maximum. The baseline is
/// zero.
pub fn profile_fwhm(positions: &[f64], values: &[f64]) -> Result<f64> {
    if positions.len() != values.len() || values.len() < 3 {
        return Err(Error::domain("profile needs at least three samples"));
    }
    let (ip, &peak) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    if !(peak > 0.0) {
        return Err(Error::domain("profile has no positive peak"));
    }
    let half = 0.5 * peak;
    let boundary = || Error::domain("peak is not bracketed by half-maximum samples inside the grid");
    let left = (1..=ip).rev().find(|&j| values[j - 1] < half).ok_or_else(boundary)?;
    let right = (ip..values.len() - 1).find(|&j| values[j + 1] < half).ok_or_else(boundary)?;
    let lerp = |a: usize, b: usize| {
        positions[a] + (half - values[a]) * (positions[b] - positions[a]) / (values[b] - values[a])
    };
    Ok(lerp(right, right + 1) - lerp(left - 1, left))
}
