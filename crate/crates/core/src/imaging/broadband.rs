use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::scan::{raster_scan_with, Imager, ScanGrid, ScanImage};
use super::{Channel, DetectionGeometry, Detector, Scatterer, SignalDecomposition};
use crate::error::{Error, Result};
use crate::focus::{BeamParams, FocusedBeam};
use crate::materials::{polarizability, HostMedium, SpheroidParticle};

/// Emission spectrum of the source as weighted vacuum wavelengths.
/// Weights are normalized to sum to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct SourceSpectrum {
    lines: Vec<(f64, f64)>,
}

impl TryFrom<Vec<(f64, f64)>> for SourceSpectrum {
    type Error = Error;

    fn try_from(lines: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(lines)
    }
}

impl From<SourceSpectrum> for Vec<(f64, f64)> {
    fn from(s: SourceSpectrum) -> Self {
        s.lines
    }
}

impl SourceSpectrum {
    pub fn new(lines: Vec<(f64, f64)>) -> Result<Self> {
        if lines.is_empty() {
            return Err(Error::domain("source spectrum is empty"));
        }
        if lines.iter().any(|&(l, w)| !(l > 0.0 && w >= 0.0 && w.is_finite())) {
            return Err(Error::domain("spectrum needs positive wavelengths and non-negative weights"));
        }
        let total: f64 = lines.iter().map(|l| l.1).sum();
        if !(total > 0.0) {
            return Err(Error::domain("spectrum weights sum to zero"));
        }
        Ok(Self {
            lines: lines.into_iter().map(|(l, w)| (l, w / total)).collect(),
        })
    }

    /// Single narrow line.
    pub fn delta(wavelength_nm: f64) -> Self {
        Self { lines: vec![(wavelength_nm, 1.0)] }
    }

    /// Gaussian band sampled at `points` wavelengths over ±1.5 FWHM.
    pub fn gaussian(center_nm: f64, fwhm_nm: f64, points: usize) -> Result<Self> {
        if points == 0 || !(fwhm_nm > 0.0) {
            return Err(Error::domain("gaussian spectrum needs points > 0 and fwhm > 0"));
        }
        let sigma = fwhm_nm / (2.0 * (2.0 * 2f64.ln()).sqrt());
        let lines = (0..points)
            .map(|i| {
                let t = if points == 1 { 0.0 } else { i as f64 / (points - 1) as f64 - 0.5 };
                let l = center_nm + 3.0 * fwhm_nm * t;
                (l, (-(l - center_nm).powi(2) / (2.0 * sigma * sigma)).exp())
            })
            .collect();
        Self::new(lines)
    }

    pub fn lines(&self) -> &[(f64, f64)] {
        &self.lines
    }

    pub fn mean_wavelength(&self) -> f64 {
        self.lines.iter().map(|(l, w)| l * w).sum()
    }
}

/// Weighted set of monochromatic detectors.
pub struct Broadband {
    parts: Vec<(f64, Detector, Scatterer)>,
    channel: Channel,
    background: f64,
}

impl Broadband {
    pub fn new(
        beam: &BeamParams,
        host: &HostMedium,
        particle: &SpheroidParticle,
        spectrum: &SourceSpectrum,
        detection: &DetectionGeometry,
    ) -> Result<Self> {
        let mut parts = Vec::with_capacity(spectrum.lines().len());
        for &(l, w) in spectrum.lines() {
            let b = BeamParams { wavelength_nm: l, ..*beam };
            let focused = FocusedBeam::new(&b, host)?;
            let det = Detector::new(&focused, detection)?;
            let alpha = polarizability(particle, host, l)?;
            parts.push((w, det, Scatterer::new(&alpha, particle)));
        }
        let background = parts[0].1.background();
        Ok(Self { parts, channel: detection.channel, background })
    }
}

impl Imager for Broadband {
    fn decomposition(&self, position: Vector3<f64>) -> SignalDecomposition {
        let mut acc = SignalDecomposition {
            ref_term: 0.0,
            sca_term: 0.0,
            interference_term: 0.0,
            phase: 0.0,
            mode_overlap: 0.0,
        };
        for (w, det, sc) in &self.parts {
            let d = det.signal(sc, position);
            acc.ref_term += w * d.ref_term;
            acc.sca_term += w * d.sca_term;
            acc.interference_term += w * d.interference_term;
            acc.phase += w * d.phase;
            acc.mode_overlap += w * d.mode_overlap;
        }
        acc
    }

    fn background(&self) -> f64 {
        self.background
    }

    fn channel(&self) -> Channel {
        self.channel
    }
}

/// Raster scan under broadband illumination: each pixel is the
/// weight-averaged normalized monochromatic signal.
pub fn broadband_scan(
    beam: &BeamParams,
    host: &HostMedium,
    particle: &SpheroidParticle,
    spectrum: &SourceSpectrum,
    detection: &DetectionGeometry,
    grid: &ScanGrid,
) -> Result<ScanImage> {
    let imager = Broadband::new(beam, host, particle, spectrum, detection)?;
    raster_scan_with(&imager, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::raster_scan;

    #[test]
    fn spectrum_validation_and_normalization() {
        assert!(SourceSpectrum::new(vec![]).is_err());
        assert!(SourceSpectrum::new(vec![(500.0, 0.0)]).is_err());
        let s = SourceSpectrum::new(vec![(500.0, 2.0), (600.0, 6.0)]).unwrap();
        assert_eq!(s.lines(), &[(500.0, 0.25), (600.0, 0.75)]);
        assert!((s.mean_wavelength() - 575.0).abs() < 1e-12);
        let g = SourceSpectrum::gaussian(590.0, 50.0, 21).unwrap();
        assert!((g.mean_wavelength() - 590.0).abs() < 1e-9);
    }

    #[test]
    fn delta_spectrum_matches_monochromatic_scan() {
        let host = HostMedium::index_matched_oil();
        let beam = BeamParams::default();
        let particle = SpheroidParticle::silver_from_diameters(94.0, 46.0, [1.0, 0.0]).unwrap();
        let det = DetectionGeometry::transmission(1.4);
        let grid = ScanGrid::square(7, 80.0);
        let bb = broadband_scan(&beam, &host, &particle, &SourceSpectrum::delta(589.0), &det, &grid).unwrap();
        let focused = FocusedBeam::new(&beam, &host).unwrap();
        let alpha = polarizability(&particle, &host, 589.0).unwrap();
        let mono = raster_scan(
            &Detector::new(&focused, &det).unwrap(),
            &Scatterer::new(&alpha, &particle),
            &grid,
        )
        .unwrap();
        assert_eq!(bb.pixels, mono.pixels);
    }
}
