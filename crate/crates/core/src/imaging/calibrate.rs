use serde::{Deserialize, Serialize};

use super::broadband::{Broadband, SourceSpectrum};
use super::scan::scan_line_with;
use super::DetectionGeometry;
use crate::error::{Error, Result};
use crate::focus::{BeamParams, MapAxis};
use crate::materials::{HostMedium, SpheroidParticle};

/// Fill factor that reproduces a target image width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub fill_factor: f64,
    pub achieved_fwhm_nm: f64,
    pub target_fwhm_nm: f64,
    pub iterations: usize,
}

/// FWHM of the particle response along a fine line scan through the focus.
pub fn line_fwhm(
    beam: &BeamParams,
    host: &HostMedium,
    particle: &SpheroidParticle,
    spectrum: &SourceSpectrum,
    detection: &DetectionGeometry,
    axis: MapAxis,
) -> Result<f64> {
    let imager = Broadband::new(beam, host, particle, spectrum, detection)?;
    let half_span = 2.5 * spectrum.mean_wavelength() / host.refractive_index;
    scan_line_with(&imager, axis, half_span, 2.5)?.fwhm()
}

/// Bisects the fill factor on `[lo, hi]` until the image FWHM along `axis`
/// is within `tol_nm` of `target_fwhm_nm`. The width decreases with the fill
/// factor, so the target must lie between the widths at the bracket ends.
#[allow(clippy::too_many_arguments)]
pub fn calibrate_fill_factor(
    beam: &BeamParams,
    host: &HostMedium,
    particle: &SpheroidParticle,
    spectrum: &SourceSpectrum,
    detection: &DetectionGeometry,
    axis: MapAxis,
    target_fwhm_nm: f64,
    bracket: (f64, f64),
    tol_nm: f64,
) -> Result<Calibration> {
    let width = |f0: f64| {
        let b = BeamParams { fill_factor: f0, ..*beam };
        line_fwhm(&b, host, particle, spectrum, detection, axis)
    };
    let (mut lo, mut hi) = bracket;
    if !(lo > 0.0 && hi > lo && tol_nm > 0.0) {
        return Err(Error::domain("calibration needs 0 < lo < hi and tol > 0"));
    }
    let (w_lo, w_hi) = (width(lo)?, width(hi)?);
    if !(w_hi <= target_fwhm_nm && target_fwhm_nm <= w_lo) {
        return Err(Error::domain(format!(
            "target FWHM {target_fwhm_nm} nm outside [{w_hi:.1}, {w_lo:.1}] nm reachable in the bracket"
        )));
    }
    for it in 1..=60 {
        let mid = 0.5 * (lo + hi);
        let w = width(mid)?;
        if (w - target_fwhm_nm).abs() <= tol_nm {
            return Ok(Calibration {
                fill_factor: mid,
                achieved_fwhm_nm: w,
                target_fwhm_nm,
                iterations: it,
            });
        }
        if w > target_fwhm_nm {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Numerical("fill-factor bisection did not converge".into()))
}
