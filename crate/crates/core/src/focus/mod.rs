//! Vectorial focusing of a linearly polarized Gaussian beam by an aplanatic
//! high-NA objective.
//!
//! The focal field is written as a superposition of plane waves,
//! `E(r) = ∫ A(s) exp(i k s·r) dΩ`, over the illumination cone `θ ≤ α`. With
//! the azimuthal integral done analytically, each field sample reduces to
//! three one-dimensional integrals over θ (orders 0, 1, 2 in Bessel
//! functions), evaluated with Gauss–Legendre quadrature.

mod map;

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::materials::HostMedium;
use crate::quadrature::GaussLegendre;

pub use map::{
    focal_intensity_map, profile_fwhm, spot_fwhm, FocalField, IntensityMap, MapAxis,
    TransverseGrid,
};

/// Default number of Gauss–Legendre nodes over the polar angle.
pub const DEFAULT_QUADRATURE_ORDER: usize = 64;
/// Default Gaussian fill factor (beam waist / pupil radius).
pub const DEFAULT_FILL_FACTOR: f64 = 0.7;
/// Relative error certified by [`focal_field_point`].
pub const CERTIFIED_TOLERANCE: f64 = 1e-6;
/// Field evaluations are supported within this many vacuum wavelengths of focus.
pub const VALIDITY_RADIUS_WAVELENGTHS: f64 = 25.0;

/// Focusing geometry of the illumination beam.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BeamParams {
    /// Vacuum wavelength (nm).
    pub wavelength_nm: f64,
    pub na_focus: f64,
    /// Gaussian waist over pupil radius.
    pub fill_factor: f64,
    /// In-plane polarization direction (normalized on use).
    pub polarization: [f64; 2],
    /// Incident power scale; field amplitudes scale with its square root.
    pub power_norm: f64,
    pub quadrature_order: usize,
}

impl Default for BeamParams {
    fn default() -> Self {
        Self {
            wavelength_nm: 589.0,
            na_focus: 1.4,
            fill_factor: DEFAULT_FILL_FACTOR,
            polarization: [1.0, 0.0],
            power_norm: 1.0,
            quadrature_order: DEFAULT_QUADRATURE_ORDER,
        }
    }
}

impl BeamParams {
    pub fn validate(&self, host: &HostMedium) -> Result<()> {
        let n = host.refractive_index;
        if !(self.wavelength_nm > 0.0 && self.wavelength_nm.is_finite()) {
            return Err(Error::domain(format!("wavelength must be positive, got {}", self.wavelength_nm)));
        }
        if !(self.na_focus > 0.0 && self.na_focus < n) {
            return Err(Error::domain(format!(
                "focusing NA must lie in (0, n_host={n}), got {}",
                self.na_focus
            )));
        }
        if !(self.fill_factor > 0.0) {
            return Err(Error::domain(format!("fill factor must be positive, got {}", self.fill_factor)));
        }
        let pn = self.polarization[0].hypot(self.polarization[1]);
        if !(pn > 0.0 && pn.is_finite()) {
            return Err(Error::domain("polarization must be a non-zero transverse vector"));
        }
        if !(self.power_norm >= 0.0 && self.power_norm.is_finite()) {
            return Err(Error::domain(format!("power_norm must be >= 0, got {}", self.power_norm)));
        }
        if self.quadrature_order < 2 {
            return Err(Error::domain("quadrature order must be at least 2"));
        }
        Ok(())
    }

    /// Illumination half-angle in the host.
    pub fn half_angle(&self, host: &HostMedium) -> f64 {
        (self.na_focus / host.refractive_index).asin()
    }

    /// Unit polarization vector (x, y).
    pub fn polarization_unit(&self) -> [f64; 2] {
        let n = self.polarization[0].hypot(self.polarization[1]);
        [self.polarization[0] / n, self.polarization[1] / n]
    }
}

/// Pupil weight `exp(-sin²θ / (f0² sin²α)) √cosθ` at polar angle `theta`.
pub fn pupil_apodization(beam: &BeamParams, host: &HostMedium, theta: f64) -> Result<f64> {
    let alpha = beam.half_angle(host);
    if !(0.0..=alpha).contains(&theta) {
        return Err(Error::domain(format!(
            "pupil angle {theta} rad outside [0, {alpha}] rad"
        )));
    }
    Ok(apodization(theta, alpha.sin(), beam.fill_factor))
}

fn apodization(theta: f64, sin_alpha: f64, fill: f64) -> f64 {
    let s = theta.sin() / (fill * sin_alpha);
    (-s * s).exp() * theta.cos().sqrt()
}

#[derive(Debug, Clone, Copy)]
struct PupilNode {
    /// quadrature weight × apodization × sinθ
    w: f64,
    cos: f64,
    sin: f64,
}

/// A focused beam prepared for repeated field evaluation.
///
/// Field samples at points farther from focus use more nodes than the base
/// order so that the oscillating integrands stay resolved.
#[derive(Debug)]
pub struct FocusedBeam {
    params: BeamParams,
    host: HostMedium,
    k: f64,
    alpha: f64,
    cutoff: f64,
    amplitude: f64,
    pol: [f64; 2],
    base: Arc<Vec<PupilNode>>,
    extra: Mutex<HashMap<usize, Arc<Vec<PupilNode>>>>,
}

impl Clone for FocusedBeam {
    fn clone(&self) -> Self {
        Self {
            params: self.params,
            host: self.host,
            k: self.k,
            alpha: self.alpha,
            cutoff: self.cutoff,
            amplitude: self.amplitude,
            pol: self.pol,
            base: self.base.clone(),
            extra: Mutex::new(HashMap::new()),
        }
    }
}

impl FocusedBeam {
    pub fn new(params: &BeamParams, host: &HostMedium) -> Result<Self> {
        params.validate(host)?;
        let alpha = params.half_angle(host);
        Ok(Self::build(*params, *host, alpha, alpha))
    }

    fn build(params: BeamParams, host: HostMedium, alpha: f64, cutoff: f64) -> Self {
        let mut beam = Self {
            params,
            host,
            k: host.wavenumber(params.wavelength_nm),
            alpha,
            cutoff,
            amplitude: params.power_norm.sqrt(),
            pol: params.polarization_unit(),
            base: Arc::new(Vec::new()),
            extra: Mutex::new(HashMap::new()),
        };
        beam.base = Arc::new(beam.nodes(params.quadrature_order));
        beam
    }

    /// The same beam with its plane-wave content restricted to `θ ≤ theta_max`.
    ///
    /// This is the part of the beam that passes through a cone of that half
    /// angle; the pupil apodization is unchanged.
    pub fn restricted(&self, theta_max: f64) -> Self {
        let cutoff = theta_max.clamp(0.0, self.alpha);
        if cutoff == self.cutoff {
            return self.clone();
        }
        Self::build(self.params, self.host, self.alpha, cutoff)
    }

    pub fn params(&self) -> &BeamParams {
        &self.params
    }

    pub fn host(&self) -> &HostMedium {
        &self.host
    }

    /// Wavenumber in the host (rad/nm).
    pub fn k(&self) -> f64 {
        self.k
    }

    /// Illumination half-angle α.
    pub fn half_angle(&self) -> f64 {
        self.alpha
    }

    /// Largest plane-wave angle present (α unless restricted).
    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    fn nodes(&self, order: usize) -> Vec<PupilNode> {
        let sin_alpha = self.alpha.sin();
        GaussLegendre::new(order)
            .on_interval(0.0, self.cutoff)
            .map(|(t, w)| PupilNode {
                w: w * apodization(t, sin_alpha, self.params.fill_factor) * t.sin(),
                cos: t.cos(),
                sin: t.sin(),
            })
            .collect()
    }

    fn order_for(&self, rho: f64, z: f64) -> usize {
        let span = self.k * (rho * self.cutoff.sin() + z.abs() * (1.0 - self.cutoff.cos()));
        let needed = (0.75 * span).ceil() as usize + 32;
        if needed <= self.params.quadrature_order {
            self.params.quadrature_order
        } else {
            needed.div_ceil(16) * 16
        }
    }

    fn rule(&self, order: usize) -> Arc<Vec<PupilNode>> {
        if order == self.params.quadrature_order {
            return self.base.clone();
        }
        let mut cache = self.extra.lock().expect("node cache poisoned");
        cache
            .entry(order)
            .or_insert_with(|| Arc::new(self.nodes(order)))
            .clone()
    }

    /// Complex field at `r` (nm, focus at the origin).
    pub fn field(&self, r: Vector3<f64>) -> Vector3<Complex64> {
        let rho = r.x.hypot(r.y);
        let order = self.order_for(rho, r.z);
        self.field_with(&self.rule(order), r)
    }

    /// Field at `r` using an explicit quadrature order.
    pub fn field_with_order(&self, r: Vector3<f64>, order: usize) -> Vector3<Complex64> {
        let nodes = self.rule(order);
        self.field_with(&nodes, r)
    }

    fn field_with(&self, nodes: &[PupilNode], r: Vector3<f64>) -> Vector3<Complex64> {
        let [cp, sp] = self.pol;
        // frame with x' along the polarization
        let xl = cp * r.x + sp * r.y;
        let yl = -sp * r.x + cp * r.y;
        let rho = xl.hypot(yl);
        let (cphi, sphi) = if rho > 0.0 { (xl / rho, yl / rho) } else { (1.0, 0.0) };
        let (c2, s2) = (cphi * cphi - sphi * sphi, 2.0 * sphi * cphi);

        let mut i0 = Complex64::new(0.0, 0.0);
        let mut i1 = Complex64::new(0.0, 0.0);
        let mut i2 = Complex64::new(0.0, 0.0);
        for n in nodes {
            let x = self.k * rho * n.sin;
            let phase = Complex64::from_polar(n.w, self.k * r.z * n.cos);
            let (j0, j1, j2) = if x == 0.0 {
                (1.0, 0.0, 0.0)
            } else {
                (libm::j0(x), libm::j1(x), libm::jn(2, x))
            };
            i0 += phase * ((1.0 + n.cos) * j0);
            i1 += phase * (n.sin * j1);
            i2 += phase * ((1.0 - n.cos) * j2);
        }
        let scale = PI * self.amplitude;
        let ex = (i0 + i2 * c2) * scale;
        let ey = i2 * (s2 * scale);
        let ez = Complex64::new(0.0, -2.0 * scale) * i1 * cphi;
        Vector3::new(cp * ex - sp * ey, sp * ex + cp * ey, ez)
    }

    /// Field at `r` computed at the base order and at twice the base order;
    /// fails when the two differ by more than [`CERTIFIED_TOLERANCE`].
    pub fn certified_field(&self, r: Vector3<f64>) -> Result<Vector3<Complex64>> {
        let limit = VALIDITY_RADIUS_WAVELENGTHS * self.params.wavelength_nm;
        if r.norm() > limit {
            return Err(Error::domain(format!(
                "field point {:.0} nm from focus exceeds the {limit:.0} nm validity radius",
                r.norm()
            )));
        }
        let rho = r.x.hypot(r.y);
        let order = self.order_for(rho, r.z);
        let coarse = self.field_with(&self.rule(order), r);
        let fine = self.field_with(&self.rule(2 * order), r);
        let scale = fine.norm().max(1e-3 * self.focus_amplitude());
        let err = (fine - coarse).norm();
        if !(err <= CERTIFIED_TOLERANCE * scale) {
            return Err(Error::Numerical(format!(
                "focal-field quadrature not converged at r=({:.1}, {:.1}, {:.1}) nm: \
                 order {order} vs {} differ by {err:.3e} (scale {scale:.3e})",
                r.x,
                r.y,
                r.z,
                2 * order
            )));
        }
        Ok(fine)
    }

    /// |E| at the geometric focus.
    pub fn focus_amplitude(&self) -> f64 {
        let i0: f64 = self.base.iter().map(|n| n.w * (1.0 + n.cos)).sum();
        PI * self.amplitude * i0
    }

    /// Power carried by plane waves with `θ ≤ theta_max`, in units where the
    /// far-field flux is `∫|E∞|² dΩ`.
    ///
    /// Uses the closed form of `∫ exp(-2 sin²θ / (f0² sin²α)) cosθ sinθ dθ`.
    pub fn power_within(&self, theta_max: f64) -> f64 {
        let t = theta_max.clamp(0.0, self.cutoff);
        let s2 = (self.params.fill_factor * self.alpha.sin()).powi(2);
        let radial = 0.25 * s2 * (1.0 - (-2.0 * t.sin().powi(2) / s2).exp());
        (2.0 * PI / self.k).powi(2) * 2.0 * PI * radial * self.params.power_norm
    }

    /// Total incident power.
    pub fn total_power(&self) -> f64 {
        self.power_within(self.cutoff)
    }

    /// Power over peak intensity: the effective focal area (nm²).
    pub fn effective_area(&self) -> f64 {
        self.total_power() / self.focus_amplitude().powi(2)
    }
}

/// Certified field of a focused beam at `r` (nm).
pub fn focal_field_point(
    beam: &BeamParams,
    host: &HostMedium,
    r: Vector3<f64>,
) -> Result<Vector3<Complex64>> {
    FocusedBeam::new(beam, host)?.certified_field(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn host() -> HostMedium {
        HostMedium::index_matched_oil()
    }

    fn beam(na: f64, fill: f64) -> BeamParams {
        BeamParams { na_focus: na, fill_factor: fill, ..BeamParams::default() }
    }

    #[test]
    fn apodization_values() {
        let b = beam(1.4, 1.0);
        let a = b.half_angle(&host());
        assert_eq!(pupil_apodization(&b, &host(), 0.0).unwrap(), 1.0);
        let edge = pupil_apodization(&b, &host(), a).unwrap();
        assert!((edge - (-1.0f64).exp() * a.cos().sqrt()).abs() < 1e-15);
        let wide = beam(1.4, 1e9);
        let w = pupil_apodization(&wide, &host(), 0.8).unwrap();
        assert!((w - 0.8f64.cos().sqrt()).abs() < 1e-12);
        assert!(pupil_apodization(&b, &host(), a + 1e-3).is_err());
        assert!(pupil_apodization(&b, &host(), -0.1).is_err());
    }

    #[test]
    fn field_at_focus_is_along_polarization() {
        for pol in [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]] {
            let b = BeamParams { polarization: pol, ..beam(1.4, 0.7) };
            let e = focal_field_point(&b, &host(), Vector3::zeros()).unwrap();
            let p = b.polarization_unit();
            let along = e.x * p[0] + e.y * p[1];
            let across = -e.x * p[1] + e.y * p[0];
            assert!(across.norm() <= 1e-6 * along.norm());
            assert!(e.z.norm() <= 1e-6 * along.norm());
        }
    }

    #[test]
    fn field_scales_with_root_power() {
        let h = host();
        let r = Vector3::new(120.0, -40.0, 30.0);
        let e1 = FocusedBeam::new(&beam(1.4, 0.7), &h).unwrap().field(r);
        let b2 = BeamParams { power_norm: 4.0, ..beam(1.4, 0.7) };
        let e2 = FocusedBeam::new(&b2, &h).unwrap().field(r);
        assert!((e2 - e1 * Complex64::from(2.0)).norm() < 1e-12 * e1.norm());
    }

    #[test]
    fn doubling_order_changes_little() {
        let f = FocusedBeam::new(&beam(1.4, 0.7), &host()).unwrap();
        for r in [
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(150.0, 80.0, 0.0),
            Vector3::new(-400.0, 600.0, 200.0),
            Vector3::new(900.0, 0.0, -300.0),
        ] {
            let a = f.field(r);
            let b = f.field_with_order(r, 2 * f.order_for(r.x.hypot(r.y), r.z));
            let scale = b.norm().max(1e-3 * f.focus_amplitude());
            assert!((a - b).norm() < 1e-6 * scale, "{r:?}");
        }
    }

    #[test]
    fn field_is_continuous() {
        let f = FocusedBeam::new(&beam(1.4, 0.7), &host()).unwrap();
        let a = f.field(Vector3::new(100.0, 50.0, 0.0));
        let b = f.field(Vector3::new(100.0 + 1e-6, 50.0, 0.0));
        assert!((a - b).norm() < 1e-6 * a.norm());
        // across the order switch-over radius too
        let c = f.field(Vector3::new(1000.0, 0.0, 0.0));
        let d = f.field(Vector3::new(1000.0 + 1e-3, 0.0, 0.0));
        assert!((c - d).norm() < 1e-4 * f.focus_amplitude());
    }

    #[test]
    fn power_closed_form_matches_quadrature() {
        let f = FocusedBeam::new(&beam(1.4, 0.7), &host()).unwrap();
        let s = (0.7 * f.half_angle().sin()).powi(2);
        let rule = GaussLegendre::new(200);
        let q = rule.integrate(0.0, f.half_angle(), |t| {
            (-2.0 * t.sin().powi(2) / s).exp() * t.cos() * t.sin()
        });
        let want = (2.0 * PI / f.k()).powi(2) * 2.0 * PI * q;
        assert!((f.total_power() - want).abs() < 1e-12 * want);
    }

    #[test]
    fn restriction_keeps_apodization() {
        let f = FocusedBeam::new(&beam(1.4, 0.7), &host()).unwrap();
        let same = f.restricted(2.0);
        assert_eq!(same.cutoff(), f.cutoff());
        let r = Vector3::new(80.0, 10.0, 0.0);
        assert!((same.field(r) - f.field(r)).norm() == 0.0);
        let half = f.restricted(0.5 * f.half_angle());
        assert!(half.total_power() < f.total_power());
        assert!(half.focus_amplitude() < f.focus_amplitude());
    }

    #[test]
    fn invalid_beams_are_rejected() {
        assert!(FocusedBeam::new(&beam(1.6, 0.7), &host()).is_err());
        assert!(FocusedBeam::new(&beam(1.4, 0.0), &host()).is_err());
        let b = BeamParams { polarization: [0.0, 0.0], ..beam(1.4, 0.7) };
        assert!(FocusedBeam::new(&b, &host()).is_err());
    }

    #[test]
    fn far_points_are_outside_validity() {
        let err = focal_field_point(&beam(1.4, 0.7), &host(), Vector3::new(1e5, 0.0, 0.0));
        assert!(matches!(err, Err(Error::Domain(_))));
    }
}
