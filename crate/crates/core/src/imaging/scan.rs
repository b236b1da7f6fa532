use nalgebra::Vector3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Channel, Detector, Scatterer, SignalDecomposition};
use crate::error::{Error, Result};
use crate::focus::{profile_fwhm, MapAxis, TransverseGrid};

/// Border pixels must sit within this distance of the declared background.
pub const BACKGROUND_TOLERANCE: f64 = 1e-3;

/// Raster of particle positions relative to the focus; same pixel layout as
/// [`TransverseGrid`], with `z_nm` acting as defocus.
pub type ScanGrid = TransverseGrid;

/// Noiseless, normalized detector image of a raster scan.
///
/// Pixels are in units of the no-particle power collected by the objective:
/// the transmission background is 1 and the reflection background is the
/// residual reflection power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanImage {
    pub grid: ScanGrid,
    pub channel: Channel,
    pub background: f64,
    /// Row-major, `pixels[j * nx + i]`.
    pub pixels: Vec<f64>,
    #[serde(skip)]
    pub decomposition: Vec<SignalDecomposition>,
}

impl ScanImage {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.pixels[j * self.grid.nx + i]
    }

    /// Reflection image divided by its background (transmission unchanged).
    pub fn renormalized(&self) -> Vec<f64> {
        match self.channel {
            Channel::Transmission => self.pixels.clone(),
            Channel::Reflection => self.pixels.iter().map(|p| p / self.background).collect(),
        }
    }

    /// Signed deviation from background, positive where the particle shows:
    /// the dip for transmission, the excess for reflection.
    pub fn response(&self) -> Vec<f64> {
        self.pixels
            .iter()
            .map(|&p| match self.channel {
                Channel::Transmission => self.background - p,
                Channel::Reflection => p - self.background,
            })
            .collect()
    }

    /// Median of the outermost ring of pixels.
    pub fn border_level(&self) -> f64 {
        let g = &self.grid;
        let mut v: Vec<f64> = (0..g.len())
            .filter(|&idx| {
                let (i, j) = (idx % g.nx, idx / g.nx);
                i == 0 || j == 0 || i + 1 == g.nx || j + 1 == g.ny
            })
            .map(|idx| self.pixels[idx])
            .collect();
        v.sort_by(f64::total_cmp);
        v[v.len() / 2]
    }

    /// 2-column cross-section through the strongest response pixel.
    pub fn cross_section(&self, axis: MapAxis) -> Vec<(f64, f64)> {
        let g = &self.grid;
        let resp = self.response();
        let (imax, _) = resp
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty image");
        let (i0, j0) = (imax % g.nx, imax / g.nx);
        match axis {
            MapAxis::X => (0..g.nx).map(|i| (g.x(i), self.at(i, j0))).collect(),
            MapAxis::Y => (0..g.ny).map(|j| (g.y(j), self.at(i0, j))).collect(),
        }
    }
}

/// Anything that produces a detector signal for a particle position.
pub trait Imager: Sync {
    fn decomposition(&self, position: Vector3<f64>) -> SignalDecomposition;
    fn background(&self) -> f64;
    fn channel(&self) -> Channel;
}

/// A single-wavelength detector with its particle.
#[derive(Debug, Clone, Copy)]
pub struct Monochromatic<'a> {
    pub detector: &'a Detector,
    pub scatterer: &'a Scatterer,
}

impl Imager for Monochromatic<'_> {
    fn decomposition(&self, position: Vector3<f64>) -> SignalDecomposition {
        self.detector.signal(self.scatterer, position)
    }

    fn background(&self) -> f64 {
        self.detector.background()
    }

    fn channel(&self) -> Channel {
        self.detector.geometry().channel
    }
}

/// Detector signal at every raster position; pixels are evaluated in parallel
/// and stored in grid order.
pub fn raster_scan(detector: &Detector, scatterer: &Scatterer, grid: &ScanGrid) -> Result<ScanImage> {
    raster_scan_with(&Monochromatic { detector, scatterer }, grid)
}

pub fn raster_scan_with(imager: &impl Imager, grid: &ScanGrid) -> Result<ScanImage> {
    grid.validate()?;
    let decomposition: Vec<SignalDecomposition> = (0..grid.len())
        .into_par_iter()
        .map(|idx| imager.decomposition(grid.position(idx)))
        .collect();
    let pixels: Vec<f64> = decomposition.iter().map(SignalDecomposition::signal).collect();
    if pixels.iter().any(|p| !p.is_finite()) {
        return Err(Error::Numerical("non-finite detector signal in scan".into()));
    }
    Ok(ScanImage {
        grid: *grid,
        channel: imager.channel(),
        background: imager.background(),
        pixels,
        decomposition,
    })
}

/// Image contrast: `1 - min` for transmission, `max - background` for
/// reflection. Both are in units of the collected no-particle power.
pub fn image_contrast(image: &ScanImage) -> Result<f64> {
    let border = image.border_level();
    if !((border - image.background).abs() <= BACKGROUND_TOLERANCE) {
        return Err(Error::domain(format!(
            "image background {border:.6} does not match normalization {:.6}",
            image.background
        )));
    }
    let resp = image.response();
    Ok(resp.iter().cloned().fold(0.0, f64::max))
}

/// FWHM (nm) of the particle response along `axis`.
pub fn image_fwhm(image: &ScanImage, axis: MapAxis) -> Result<f64> {
    let g = &image.grid;
    let resp = image.response();
    let (imax, _) = resp
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::domain("empty image"))?;
    let (i0, j0) = (imax % g.nx, imax / g.nx);
    let (pos, vals): (Vec<f64>, Vec<f64>) = match axis {
        MapAxis::X => (0..g.nx).map(|i| (g.x(i), resp[j0 * g.nx + i])).unzip(),
        MapAxis::Y => (0..g.ny).map(|j| (g.y(j), resp[j * g.nx + i0])).unzip(),
    };
    profile_fwhm(&pos, &vals)
}

/// Detector signal along one line through the focus.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanLine {
    pub positions: Vec<f64>,
    pub signal: Vec<f64>,
    pub background: f64,
    pub channel: Channel,
}

impl ScanLine {
    pub fn response(&self) -> Vec<f64> {
        self.signal
            .iter()
            .map(|&p| match self.channel {
                Channel::Transmission => self.background - p,
                Channel::Reflection => p - self.background,
            })
            .collect()
    }

    pub fn contrast(&self) -> f64 {
        self.response().into_iter().fold(0.0, f64::max)
    }

    pub fn fwhm(&self) -> Result<f64> {
        profile_fwhm(&self.positions, &self.response())
    }
}

/// Fine 1-D scan along `axis` over `[-half_span, half_span]`.
pub fn scan_line(
    detector: &Detector,
    scatterer: &Scatterer,
    axis: MapAxis,
    half_span_nm: f64,
    step_nm: f64,
) -> Result<ScanLine> {
    scan_line_with(&Monochromatic { detector, scatterer }, axis, half_span_nm, step_nm)
}

pub fn scan_line_with(
    imager: &impl Imager,
    axis: MapAxis,
    half_span_nm: f64,
    step_nm: f64,
) -> Result<ScanLine> {
    if !(step_nm > 0.0 && half_span_nm > step_nm) {
        return Err(Error::domain("scan line needs 0 < step < half span"));
    }
    let n = (half_span_nm / step_nm).round() as i64;
    let positions: Vec<f64> = (-n..=n).map(|i| i as f64 * step_nm).collect();
    let signal = positions
        .par_iter()
        .map(|&s| {
            let r = match axis {
                MapAxis::X => Vector3::new(s, 0.0, 0.0),
                MapAxis::Y => Vector3::new(0.0, s, 0.0),
            };
            imager.decomposition(r).signal()
        })
        .collect();
    Ok(ScanLine {
        positions,
        signal,
        background: imager.background(),
        channel: imager.channel(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::focus::{BeamParams, FocusedBeam};
    use crate::imaging::DetectionGeometry;
    use crate::materials::{polarizability, HostMedium, SpheroidParticle};

    fn detector(det: DetectionGeometry) -> (Detector, Scatterer) {
        let host = HostMedium::index_matched_oil();
        let beam = FocusedBeam::new(&BeamParams::default(), &host).unwrap();
        let particle = SpheroidParticle::silver_from_diameters(94.0, 46.0, [1.0, 0.0]).unwrap();
        let alpha = polarizability(&particle, &host, 589.0).unwrap();
        (Detector::new(&beam, &det).unwrap(), Scatterer::new(&alpha, &particle))
    }

    #[test]
    fn flat_image_without_particle() {
        let (d, _) = detector(DetectionGeometry::transmission(1.4));
        let img = raster_scan(&d, &Scatterer::none(), &ScanGrid::square(9, 100.0)).unwrap();
        assert!(img.pixels.iter().all(|&p| p == 1.0));
        assert_eq!(image_contrast(&img).unwrap(), 0.0);
    }

    #[test]
    fn centered_particle_image_is_mirror_symmetric() {
        for det in [DetectionGeometry::transmission(1.4), DetectionGeometry::reflection(1.4)] {
            let (d, sc) = detector(det);
            let g = ScanGrid::square(15, 60.0);
            let img = raster_scan(&d, &sc, &g).unwrap();
            let n = g.nx;
            let mut worst: f64 = 0.0;
            for j in 0..n {
                for i in 0..n {
                    worst = worst
                        .max((img.at(i, j) - img.at(n - 1 - i, j)).abs())
                        .max((img.at(i, j) - img.at(i, n - 1 - j)).abs());
                }
            }
            assert!(worst < 1e-6, "{worst}");
        }
    }

    #[test]
    fn contrast_requires_normalized_background() {
        let (d, sc) = detector(DetectionGeometry::transmission(1.4));
        // scan too small to reach the background
        let img = raster_scan(&d, &sc, &ScanGrid::square(5, 40.0)).unwrap();
        assert!(image_contrast(&img).is_err());
    }

    #[test]
    fn line_and_image_agree() {
        let (d, sc) = detector(DetectionGeometry::reflection(1.4));
        let line = scan_line(&d, &sc, MapAxis::Y, 600.0, 20.0).unwrap();
        let img = raster_scan(&d, &sc, &ScanGrid { nx: 3, ny: 61, pitch_nm: 20.0, z_nm: 0.0 }).unwrap();
        for (k, &v) in line.signal.iter().enumerate() {
            assert!((img.at(1, k) - v).abs() < 1e-14);
        }
    }
}
