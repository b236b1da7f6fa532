use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::{Channel, DetectionGeometry, Detector, Scatterer};
use crate::error::{Error, Result};
use crate::focus::FocusedBeam;

/// Photon-to-plasmon conversion figures for a particle at the focus.
///
/// All powers are fractions of the total incident power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConversionEfficiency {
    /// Transmission dip `1 - T`, the measurable lower bound.
    pub lower_bound: f64,
    pub p_sca: f64,
    pub p_abs: f64,
    pub p_ext: f64,
    /// Scattered power that re-enters the transmission objective.
    pub p_sca_collected: f64,
    pub p_sca_uncollected: f64,
    pub illumination_half_angle: f64,
    pub collection_half_angle: f64,
}

impl ConversionEfficiency {
    /// `p_sca + p_abs`: probability that an incident photon excites the plasmon.
    pub fn conversion(&self) -> f64 {
        self.p_sca + self.p_abs
    }

    /// `(1 - T) - (p_sca,uncollected + p_abs)`; zero when the collection cone
    /// contains the whole illumination cone.
    pub fn energy_residual(&self) -> f64 {
        self.lower_bound - (self.p_sca_uncollected + self.p_abs)
    }
}

/// Conversion efficiency and transmission dip for a particle at the focus.
pub fn conversion_efficiency(
    beam: &FocusedBeam,
    scatterer: &Scatterer,
    detection: &DetectionGeometry,
) -> Result<ConversionEfficiency> {
    if detection.channel != Channel::Transmission {
        return Err(Error::domain("conversion efficiency is read from the transmission channel"));
    }
    let det = Detector::new(beam, detection)?;
    let k = beam.k();
    let e = beam.field(Vector3::zeros());
    let p = scatterer.alpha * e;
    let total = beam.total_power();
    let ext = k * p.dot(&e.conjugate()).im;
    let sca = k.powi(4) * p.norm_squared() / (6.0 * PI);
    let sca_coll = det.collected_scattering(&p);
    let t = det.signal(scatterer, Vector3::zeros()).signal();
    let p_sca = sca / total;
    let p_ext = ext / total;
    let p_sca_collected = sca_coll / total;
    Ok(ConversionEfficiency {
        lower_bound: 1.0 - t,
        p_sca,
        p_abs: p_ext - p_sca,
        p_ext,
        p_sca_collected,
        p_sca_uncollected: p_sca - p_sca_collected,
        illumination_half_angle: beam.half_angle(),
        collection_half_angle: det.collection_angle(),
    })
}

/// Width of a finite particle image from the point-dipole width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizeCorrection {
    pub corrected_nm: f64,
    pub delta_nm: f64,
}

/// `√(fwhm² + extent²)` and its difference from `fwhm`.
pub fn finite_size_correction(fwhm_point_dipole_nm: f64, particle_extent_nm: f64) -> Result<SizeCorrection> {
    if !(fwhm_point_dipole_nm >= 0.0 && particle_extent_nm >= 0.0) {
        return Err(Error::domain("widths must be non-negative"));
    }
    let corrected_nm = fwhm_point_dipole_nm.hypot(particle_extent_nm);
    Ok(SizeCorrection {
        corrected_nm,
        delta_nm: corrected_nm - fwhm_point_dipole_nm,
    })
}
