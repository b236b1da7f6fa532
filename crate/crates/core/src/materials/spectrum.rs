//! Cross sections and plasmon spectra.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::permittivity::HostMedium;
use super::spheroid::{polarizability, PolarizationAxis, PolarizabilityTensor, SpheroidParticle};
use crate::error::{Error, Result};

/// Extinction, scattering and absorption cross sections in nm².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossSections {
    pub wavelength_nm: f64,
    pub ext: f64,
    pub sca: f64,
    pub abs: f64,
}

const ABSORPTION_FLOOR: f64 = 1e-9;

/// Cross sections of a single dipole polarizability (nm³) at wavenumber `k`.
pub fn cross_sections_of(alpha: Complex64, k: f64, wavelength_nm: f64) -> Result<CrossSections> {
    let ext = k * alpha.im;
    let sca = k.powi(4) * alpha.norm_sqr() / (6.0 * PI);
    let mut abs = ext - sca;
    if abs < -ABSORPTION_FLOOR * ext.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::Consistency(format!(
            "negative absorption {abs:e} nm² (ext {ext:e}) at {wavelength_nm} nm"
        )));
    }
    if abs < 0.0 {
        abs = 0.0;
    }
    Ok(CrossSections {
        wavelength_nm,
        ext: sca + abs,
        sca,
        abs,
    })
}

/// Cross sections for illumination polarized along one principal axis.
pub fn cross_sections(
    alpha: &PolarizabilityTensor,
    k: f64,
    axis: PolarizationAxis,
) -> Result<CrossSections> {
    cross_sections_of(alpha.along(axis), k, alpha.wavelength_nm)
}

/// Inclusive, evenly spaced wavelength sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavelengthRange {
    pub start_nm: f64,
    pub end_nm: f64,
    pub points: usize,
}

impl WavelengthRange {
    pub fn new(start_nm: f64, end_nm: f64, points: usize) -> Self {
        Self { start_nm, end_nm, points }
    }

    pub fn wavelengths(&self) -> Result<Vec<f64>> {
        if self.points == 0 || !(self.end_nm >= self.start_nm) {
            return Err(Error::domain(format!(
                "empty wavelength range [{}, {}] with {} points",
                self.start_nm, self.end_nm, self.points
            )));
        }
        if self.points == 1 {
            return Ok(vec![self.start_nm]);
        }
        if self.end_nm == self.start_nm {
            return Err(Error::domain("wavelength range has zero width"));
        }
        let step = (self.end_nm - self.start_nm) / (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|i| self.start_nm + step * i as f64)
            .collect())
    }
}

/// Dense sweep of corrected-dipole cross sections.
pub fn plasmon_spectrum(
    particle: &SpheroidParticle,
    host: &HostMedium,
    range: &WavelengthRange,
    axis: PolarizationAxis,
) -> Result<Vec<CrossSections>> {
    range
        .wavelengths()?
        .into_iter()
        .map(|l| {
            let alpha = polarizability(particle, host, l)?;
            cross_sections(&alpha, alpha.k, axis)
        })
        .collect()
}

/// Which cross section a spectral statistic refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Extinction,
    Scattering,
    Absorption,
}

impl Quantity {
    pub fn of(self, c: &CrossSections) -> f64 {
        match self {
            Quantity::Extinction => c.ext,
            Quantity::Scattering => c.sca,
            Quantity::Absorption => c.abs,
        }
    }
}

/// Peak wavelength and value, refined by a parabola through the three samples
/// around the discrete maximum.
pub fn spectral_peak(spectrum: &[CrossSections], q: Quantity) -> Option<(f64, f64)> {
    let (i, _) = spectrum
        .iter()
        .enumerate()
        .max_by(|a, b| q.of(a.1).total_cmp(&q.of(b.1)))?;
    let x = spectrum[i].wavelength_nm;
    let y = q.of(&spectrum[i]);
    if i == 0 || i + 1 == spectrum.len() {
        return Some((x, y));
    }
    let (x0, y0) = (spectrum[i - 1].wavelength_nm, q.of(&spectrum[i - 1]));
    let (x2, y2) = (spectrum[i + 1].wavelength_nm, q.of(&spectrum[i + 1]));
    let h = 0.5 * (x2 - x0);
    let curv = y0 - 2.0 * y + y2;
    if curv >= 0.0 {
        return Some((x, y));
    }
    let shift = 0.5 * h * (y0 - y2) / curv;
    let peak = y - 0.25 * (y0 - y2) * shift / h;
    Some((x + shift, peak))
}

/// Full width at half maximum of a spectral band (nm), or `None` when the band
/// is not bracketed by the sweep.
pub fn spectral_fwhm(spectrum: &[CrossSections], q: Quantity) -> Option<f64> {
    let (i, c) = spectrum
        .iter()
        .enumerate()
        .max_by(|a, b| q.of(a.1).total_cmp(&q.of(b.1)))?;
    let half = 0.5 * q.of(c);
    let cross = |j: usize, k: usize| {
        let (xa, ya) = (spectrum[j].wavelength_nm, q.of(&spectrum[j]));
        let (xb, yb) = (spectrum[k].wavelength_nm, q.of(&spectrum[k]));
        xa + (half - ya) * (xb - xa) / (yb - ya)
    };
    let left = (1..=i).rev().find(|&j| q.of(&spectrum[j - 1]) < half)?;
    let right = (i..spectrum.len() - 1).find(|&j| q.of(&spectrum[j + 1]) < half)?;
    Some(cross(right, right + 1) - cross(left - 1, left))
}
