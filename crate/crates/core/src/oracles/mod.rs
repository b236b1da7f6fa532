//! Slow, independent reference calculations.
//!
//! Nothing in here calls into the code it checks: the Mie series, the direct
//! pupil quadrature and the adaptive depolarization integral use their own
//! numerics. [`verification_reports`] runs them against the production code.

mod depolarization;
mod mie;
mod scalar_focus;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::focus::{profile_fwhm, BeamParams, FocusedBeam};
use crate::materials::{
    cross_sections, depolarization_factors, polarizability, HostMedium, PermittivityTable,
    PolarizationAxis, SpheroidParticle,
};

pub use depolarization::depolarization_integral;
pub use mie::{mie_dipole_cross_sections, mie_sphere_cross_sections, MieCrossSections, MAX_SIZE_PARAMETER};
pub use scalar_focus::{half_profile_fwhm, scalar_focus_profile, PupilSampling, MAX_SCALAR_NA};

/// One oracle-versus-candidate comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub quantity: String,
    pub oracle: f64,
    pub candidate: f64,
    pub relative_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl OracleReport {
    pub fn new(quantity: impl Into<String>, oracle: f64, candidate: f64, tolerance: f64) -> Self {
        let relative_error = if oracle == candidate {
            0.0
        } else {
            ((candidate - oracle) / oracle).abs()
        };
        Self {
            quantity: quantity.into(),
            oracle,
            candidate,
            relative_error,
            tolerance,
            pass: relative_error <= tolerance,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("plain struct serializes")
    }
}

/// Vectorial and scalar focal-spot FWHM perpendicular to the polarization.
pub fn low_na_fwhm_pair(na: f64, wavelength_nm: f64, host: &HostMedium, fill_factor: f64) -> Result<(f64, f64)> {
    let step = wavelength_nm / na / 400.0;
    let n = 400;
    let half: Vec<f64> = (0..n).map(|i| i as f64 * step).collect();
    let oracle = scalar_focus_profile(
        na,
        wavelength_nm,
        host.refractive_index,
        Some(fill_factor),
        &half,
        0.0,
        PupilSampling::default(),
    )?;
    let oracle_w = half_profile_fwhm(&half, &oracle)?;
    let beam = FocusedBeam::new(
        &BeamParams { wavelength_nm, na_focus: na, fill_factor, ..BeamParams::default() },
        host,
    )?;
    let full: Vec<f64> = (-(n as i64) + 1..n as i64).map(|i| i as f64 * step).collect();
    let vals: Vec<f64> = full
        .iter()
        .map(|&y| beam.field(Vector3::new(0.0, y, 0.0)).norm_squared())
        .collect();
    Ok((oracle_w, profile_fwhm(&full, &vals)?))
}

/// Oracle comparisons exposed by the hidden `verify` subcommand.
pub fn verification_reports() -> Result<Vec<OracleReport>> {
    let mut out = Vec::new();
    let (lo, so) = depolarization_integral(47.0, 23.0)?;
    let (lc, sc) = depolarization_factors(47.0, 23.0)?;
    out.push(OracleReport::new("depolarization L_long a=47 b=23", lo, lc, 1e-9));
    out.push(OracleReport::new("depolarization L_short a=47 b=23", so, sc, 1e-9));

    let host = HostMedium::index_matched_oil();
    let silver = PermittivityTable::silver();
    let sphere = SpheroidParticle::new(30.0, 30.0, [1.0, 0.0], silver.clone())?;
    for wl in (500..=650).step_by(25) {
        let wl = wl as f64;
        let eps = silver.permittivity(wl)?;
        let mie = mie_sphere_cross_sections(30.0, eps, host.refractive_index, wl)?;
        let alpha = polarizability(&sphere, &host, wl)?;
        let cand = cross_sections(&alpha, alpha.k, PolarizationAxis::Long)?;
        out.push(OracleReport::new(format!("sigma_ext 60 nm sphere {wl} nm"), mie.ext, cand.ext, 0.15));
    }

    let (ow, cw) = low_na_fwhm_pair(0.1, 589.0, &host, 0.7)?;
    out.push(OracleReport::new("focal FWHM NA=0.1", ow, cw, 0.02));
    Ok(out)
}
