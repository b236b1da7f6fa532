//! Interferometric detector signals, raster scans and derived figures of merit.
//!
//! Far fields are expressed as the coefficient of `exp(ikr)/r` on a sphere in
//! the host medium, so the power through a solid angle is `∫|E∞|² dΩ`. The
//! focused beam `E(r) = ∫ A(s) exp(ik s·r) dΩ` has forward far field
//! `-(2πi/k) A(s)`, and a dipole `P = α·E` at `r_p` radiates
//! `(k²/4π) (I - ssᵀ) P exp(-ik s·r_p)`. The overlap of the two over a
//! collection cone of half angle β collapses to `(ik/2) P·E_β(r_p)*`, where
//! `E_β` is the beam restricted to plane waves inside the cone. The Gouy phase
//! and the scattering phase therefore come out of the same expansion.

mod broadband;
mod calibrate;
mod efficiency;
mod scan;

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::focus::{FocalField, FocusedBeam};
use crate::materials::{PolarizabilityTensor, SpheroidParticle};

pub use broadband::{broadband_scan, Broadband, SourceSpectrum};
pub use calibrate::{calibrate_fill_factor, line_fwhm, Calibration};
pub use efficiency::{conversion_efficiency, finite_size_correction, ConversionEfficiency, SizeCorrection};
pub use scan::{
    image_contrast, image_fwhm, raster_scan, raster_scan_with, scan_line, scan_line_with, Imager,
    Monochromatic, ScanGrid, ScanImage, ScanLine,
    BACKGROUND_TOLERANCE,
};

/// Detection channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Transmission,
    Reflection,
}

/// Residual reflection of the illumination that serves as the reflection
/// reference, given as power fraction and phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResidualReflection {
    pub power: f64,
    #[serde(default)]
    pub phase_rad: f64,
}

impl Default for ResidualReflection {
    fn default() -> Self {
        Self { power: 1e-3, phase_rad: 0.0 }
    }
}

impl ResidualReflection {
    pub fn amplitude(&self) -> Complex64 {
        Complex64::from_polar(self.power.sqrt(), self.phase_rad)
    }
}

/// Collection optics for one detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionGeometry {
    pub channel: Channel,
    pub na_collect: f64,
    #[serde(default)]
    pub residual_reflection: ResidualReflection,
}

impl DetectionGeometry {
    pub fn transmission(na_collect: f64) -> Self {
        Self {
            channel: Channel::Transmission,
            na_collect,
            residual_reflection: ResidualReflection::default(),
        }
    }

    pub fn reflection(na_collect: f64) -> Self {
        Self {
            channel: Channel::Reflection,
            na_collect,
            residual_reflection: ResidualReflection::default(),
        }
    }

    /// Collection half-angle β in a host of index `n_host`.
    pub fn half_angle(&self, n_host: f64) -> Result<f64> {
        if !(self.na_collect > 0.0 && self.na_collect <= n_host) {
            return Err(Error::domain(format!(
                "collection NA must lie in (0, {n_host}], got {}",
                self.na_collect
            )));
        }
        if !(self.residual_reflection.power >= 0.0 && self.residual_reflection.power.is_finite()) {
            return Err(Error::domain("residual reflection power must be >= 0"));
        }
        Ok((self.na_collect / n_host).asin())
    }
}

/// The three terms of `|E_ref + E_sca|² = |E_ref|² + |E_sca|² - 2|E_ref||E_sca| sin φ`,
/// each as collected power normalized to the collected no-particle power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalDecomposition {
    pub ref_term: f64,
    pub sca_term: f64,
    pub interference_term: f64,
    /// Phase φ of the scattered wave relative to the reference (rad).
    pub phase: f64,
    /// `|∫E_ref*·E_sca| / √(∫|E_ref|² ∫|E_sca|²)`: spatial mode overlap on the
    /// detector, 1 for plane-wave-like fields.
    pub mode_overlap: f64,
}

impl SignalDecomposition {
    pub fn signal(&self) -> f64 {
        self.ref_term + self.sca_term + self.interference_term
    }
}

/// Lab-frame polarizability tensor of an oriented particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scatterer {
    pub alpha: Matrix3<Complex64>,
}

impl Scatterer {
    pub fn new(alpha: &PolarizabilityTensor, particle: &SpheroidParticle) -> Self {
        Self { alpha: alpha.lab_frame(particle.orientation()) }
    }

    pub fn none() -> Self {
        Self { alpha: Matrix3::zeros() }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { alpha: self.alpha * Complex64::from(factor) }
    }
}

/// Dipole induced by a sampled focal field at an in-plane particle position.
pub fn induced_dipole(
    field: &FocalField,
    scatterer: &Scatterer,
    position: [f64; 2],
) -> Result<Vector3<Complex64>> {
    let e = field.interpolate(position[0], position[1])?;
    Ok(scatterer.alpha * e)
}

/// `∫_cone |(I - ssᵀ) P|² dΩ` over a cone of half angle `beta` around ±z.
fn cone_dipole_power(p: &Vector3<Complex64>, beta: f64) -> f64 {
    let c = beta.cos();
    let pt = p.x.norm_sqr() + p.y.norm_sqr();
    let pz = p.z.norm_sqr();
    let all = pt + pz;
    all * 2.0 * PI * (1.0 - c)
        - PI * pt * (2.0 / 3.0 - c + c * c * c / 3.0)
        - 2.0 * PI * pz * (1.0 - c * c * c) / 3.0
}

/// Precomputed detector model for one beam and one collection geometry.
#[derive(Debug, Clone)]
pub struct Detector {
    beam: FocusedBeam,
    collected: FocusedBeam,
    geometry: DetectionGeometry,
    beta: f64,
    reference_power: f64,
}

impl Detector {
    pub fn new(beam: &FocusedBeam, geometry: &DetectionGeometry) -> Result<Self> {
        let beta = geometry.half_angle(beam.host().refractive_index)?;
        let collected = beam.restricted(beta);
        let reference_power = beam.power_within(beta);
        if !(reference_power > 0.0) {
            return Err(Error::domain("beam carries no power into the collection cone"));
        }
        Ok(Self {
            beam: beam.clone(),
            collected,
            geometry: *geometry,
            beta,
            reference_power,
        })
    }

    pub fn beam(&self) -> &FocusedBeam {
        &self.beam
    }

    pub fn geometry(&self) -> &DetectionGeometry {
        &self.geometry
    }

    /// Collection half-angle β.
    pub fn collection_angle(&self) -> f64 {
        self.beta
    }

    /// Incident power entering the collection cone (the normalization).
    pub fn reference_power(&self) -> f64 {
        self.reference_power
    }

    /// Background level of a normalized image far from the particle.
    pub fn background(&self) -> f64 {
        match self.geometry.channel {
            Channel::Transmission => 1.0,
            Channel::Reflection => self.geometry.residual_reflection.power,
        }
    }

    /// Scattered power collected in the cone, for dipole `p`.
    pub fn collected_scattering(&self, p: &Vector3<Complex64>) -> f64 {
        let k = self.beam.k();
        (k * k / (4.0 * PI)).powi(2) * cone_dipole_power(p, self.beta)
    }

    /// Normalized detector signal and its decomposition for a particle at
    /// `position` (nm, relative to the geometric focus).
    pub fn signal(&self, scatterer: &Scatterer, position: Vector3<f64>) -> SignalDecomposition {
        let k = self.beam.k();
        let e = self.beam.field(position);
        let p = scatterer.alpha * e;
        let sca = self.collected_scattering(&p);
        let half_ik = Complex64::new(0.0, 0.5 * k);
        let (reference, overlap) = match self.geometry.channel {
            Channel::Transmission => {
                let eb = self.collected.field(position);
                (self.reference_power, half_ik * p.dot(&eb.conjugate()))
            }
            Channel::Reflection => {
                let r = self.geometry.residual_reflection.amplitude();
                let mirror = Vector3::new(position.x, position.y, -position.z);
                let eb = self.collected.field(mirror);
                let mp = Vector3::new(p.x, p.y, -p.z);
                (
                    self.geometry.residual_reflection.power * self.reference_power,
                    half_ik * r.conj() * mp.dot(&eb.conjugate()),
                )
            }
        };
        let norm = self.reference_power;
        let denom = (reference * sca).sqrt();
        SignalDecomposition {
            ref_term: reference / norm,
            sca_term: sca / norm,
            interference_term: 2.0 * overlap.re / norm,
            phase: wrap_phase(overlap.arg() - 0.5 * PI),
            mode_overlap: if denom > 0.0 { overlap.norm() / denom } else { 0.0 },
        }
    }
}

fn wrap_phase(p: f64) -> f64 {
    let w = (p + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

/// Detector signal for a particle at `position`.
pub fn detector_signal(
    beam: &FocusedBeam,
    scatterer: &Scatterer,
    position: Vector3<f64>,
    detection: &DetectionGeometry,
) -> Result<(f64, SignalDecomposition)> {
    let d = Detector::new(beam, detection)?.signal(scatterer, position);
    Ok((d.signal(), d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::focus::BeamParams;
    use crate::materials::{polarizability, HostMedium};
    use crate::quadrature::GaussLegendre;

    fn setup() -> (FocusedBeam, Scatterer) {
        let host = HostMedium::index_matched_oil();
        let beam = FocusedBeam::new(&BeamParams::default(), &host).unwrap();
        let particle = SpheroidParticle::silver_from_diameters(94.0, 46.0, [1.0, 0.0]).unwrap();
        let alpha = polarizability(&particle, &host, 589.0).unwrap();
        (beam, Scatterer::new(&alpha, &particle))
    }

    #[test]
    fn cone_power_matches_direct_quadrature() {
        let p = Vector3::new(
            Complex64::new(1.0, 0.5),
            Complex64::new(-0.3, 0.2),
            Complex64::new(0.1, -0.7),
        );
        let beta = 1.1;
        let rule = GaussLegendre::new(60);
        let direct = rule.integrate(0.0, beta, |t| {
            rule.integrate(0.0, 2.0 * PI, |f| {
                let s = Vector3::new(t.sin() * f.cos(), t.sin() * f.sin(), t.cos())
                    .map(Complex64::from);
                let proj = p - s * s.dot(&p);
                proj.norm_squared() * t.sin()
            })
        });
        assert!((cone_dipole_power(&p, beta) - direct).abs() < 1e-12 * direct);
        let full = cone_dipole_power(&p, PI);
        assert!((full - 8.0 * PI / 3.0 * p.norm_squared()).abs() < 1e-12 * full);
    }

    #[test]
    fn no_particle_gives_reference_levels() {
        let (beam, _) = setup();
        let none = Scatterer::none();
        let t = Detector::new(&beam, &DetectionGeometry::transmission(1.4)).unwrap();
        assert_eq!(t.signal(&none, Vector3::zeros()).signal(), 1.0);
        let r = Detector::new(&beam, &DetectionGeometry::reflection(1.4)).unwrap();
        assert_eq!(r.signal(&none, Vector3::zeros()).signal(), 1e-3);
    }

    #[test]
    fn terms_sum_to_signal() {
        let (beam, sc) = setup();
        for det in [DetectionGeometry::transmission(1.4), DetectionGeometry::reflection(1.2)] {
            let d = Detector::new(&beam, &det).unwrap();
            for pos in [Vector3::zeros(), Vector3::new(120.0, -60.0, 0.0)] {
                let s = d.signal(&sc, pos);
                let total = s.ref_term + s.sca_term + s.interference_term;
                assert!((s.signal() - total).abs() <= 1e-12 * total.abs());
                let eq1 = -2.0 * (s.ref_term * s.sca_term).sqrt() * s.mode_overlap * s.phase.sin();
                assert!((eq1 - s.interference_term).abs() < 1e-9 * s.ref_term.max(s.sca_term));
                assert!(s.mode_overlap <= 1.0 + 1e-9);
            }
        }
    }

    #[test]
    fn zero_collection_na_is_a_domain_error() {
        let (beam, _) = setup();
        assert!(Detector::new(&beam, &DetectionGeometry::transmission(0.0)).is_err());
        assert!(Detector::new(&beam, &DetectionGeometry::transmission(1.6)).is_err());
    }

    #[test]
    fn induced_dipole_follows_field() {
        let (beam, sc) = setup();
        let grid = crate::focus::TransverseGrid::square(21, 20.0);
        let field = FocalField::sample(&beam, &grid).unwrap();
        let p0 = induced_dipole(&field, &sc, [0.0, 0.0]).unwrap();
        assert!(p0.y.norm() < 1e-6 * p0.x.norm() && p0.z.norm() < 1e-6 * p0.x.norm());
        assert_eq!(induced_dipole(&field, &Scatterer::none(), [0.0, 0.0]).unwrap(), Vector3::zeros());
        assert!(induced_dipole(&field, &sc, [500.0, 0.0]).is_err());
    }

    #[test]
    fn phase_wrapping() {
        assert_eq!(wrap_phase(-PI), PI);
        assert!((wrap_phase(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
    }
}
