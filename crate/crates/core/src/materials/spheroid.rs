//! Prolate spheroid geometry, depolarization factors and dipole polarizability.
//!
//! Polarizabilities carry units of volume (nm³): the induced dipole is
//! `p = ε0 ε_h α E`, so that `σ_ext = k Im α` and `σ_sca = k⁴ |α|² / 6π`.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use super::permittivity::{HostMedium, PermittivityTable};
use crate::error::{Error, Result};

/// Prolate spheroid with its long axis lying in the substrate plane.
#[derive(Debug, Clone)]
pub struct SpheroidParticle {
    semi_axis_long: f64,
    semi_axis_short: f64,
    orientation: Vector3<f64>,
    material: Arc<PermittivityTable>,
}

impl SpheroidParticle {
    /// `orientation` is the in-plane direction (x, y) of the long axis; it is
    /// normalized here.
    pub fn new(
        semi_axis_long: f64,
        semi_axis_short: f64,
        orientation: [f64; 2],
        material: Arc<PermittivityTable>,
    ) -> Result<Self> {
        check_axes(semi_axis_long, semi_axis_short)?;
        let n = orientation[0].hypot(orientation[1]);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::domain("particle orientation must be a non-zero vector"));
        }
        Ok(Self {
            semi_axis_long,
            semi_axis_short,
            orientation: Vector3::new(orientation[0] / n, orientation[1] / n, 0.0),
            material,
        })
    }

    /// Silver spheroid from full axis lengths (diameters) in nm.
    pub fn silver_from_diameters(long_nm: f64, short_nm: f64, orientation: [f64; 2]) -> Result<Self> {
        Self::new(0.5 * long_nm, 0.5 * short_nm, orientation, PermittivityTable::silver())
    }

    pub fn semi_axis_long(&self) -> f64 {
        self.semi_axis_long
    }

    pub fn semi_axis_short(&self) -> f64 {
        self.semi_axis_short
    }

    /// Unit vector along the long axis (z component is always zero).
    pub fn orientation(&self) -> Vector3<f64> {
        self.orientation
    }

    pub fn material(&self) -> &Arc<PermittivityTable> {
        &self.material
    }

    pub fn volume(&self) -> f64 {
        4.0 / 3.0 * PI * self.semi_axis_long * self.semi_axis_short * self.semi_axis_short
    }

    /// Full extent along an in-plane direction (nm); used for finite-size
    /// corrections of scan widths.
    pub fn extent_along(&self, direction: [f64; 2]) -> f64 {
        let n = direction[0].hypot(direction[1]);
        let c = (direction[0] * self.orientation.x + direction[1] * self.orientation.y) / n;
        let s2 = (1.0 - c * c).max(0.0);
        // support width of the ellipse cross-section in that direction
        2.0 * (self.semi_axis_long.powi(2) * c * c + self.semi_axis_short.powi(2) * s2).sqrt()
    }
}

fn check_axes(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::domain(format!(
            "spheroid semi-axes must be positive, got a={a}, b={b}"
        )));
    }
    if a < b {
        return Err(Error::domain(format!(
            "prolate spheroid needs long semi-axis >= short semi-axis, got a={a}, b={b}"
        )));
    }
    Ok(())
}

/// Depolarization factors `(L_long, L_short)` of a prolate spheroid with
/// semi-axes `a >= b = c`.
pub fn depolarization_factors(a: f64, b: f64) -> Result<(f64, f64)> {
    check_axes(a, b)?;
    let e2 = 1.0 - (b / a).powi(2);
    let l_long = if e2 < 2.5e-3 {
        // series in e²: 1/3 - Σ_{n≥1} (1/(2n+1) - 1/(2n+3)) e^{2n}
        let mut sum = 1.0 / 3.0;
        let mut p = 1.0;
        for n in 1..40 {
            p *= e2;
            let nf = n as f64;
            let term = (1.0 / (2.0 * nf + 1.0) - 1.0 / (2.0 * nf + 3.0)) * p;
            sum -= term;
            if term < 1e-18 {
                break;
            }
        }
        sum
    } else {
        let e = e2.sqrt();
        (1.0 - e2) / e2 * (e.atanh() / e - 1.0)
    };
    Ok((l_long, 0.5 * (1.0 - l_long)))
}

/// Which principal axis of the spheroid the incident field drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolarizationAxis {
    Long,
    Short,
}

/// Diagonal polarizability in the particle frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizabilityTensor {
    pub wavelength_nm: f64,
    pub alpha_long: Complex64,
    pub alpha_short: Complex64,
    /// Wavenumber in the host, rad/nm.
    pub k: f64,
}

impl PolarizabilityTensor {
    pub fn zero(wavelength_nm: f64, k: f64) -> Self {
        Self {
            wavelength_nm,
            alpha_long: Complex64::new(0.0, 0.0),
            alpha_short: Complex64::new(0.0, 0.0),
            k,
        }
    }

    pub fn along(&self, axis: PolarizationAxis) -> Complex64 {
        match axis {
            PolarizationAxis::Long => self.alpha_long,
            PolarizationAxis::Short => self.alpha_short,
        }
    }

    /// Multiplies both entries by a real factor.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            alpha_long: self.alpha_long * factor,
            alpha_short: self.alpha_short * factor,
            ..*self
        }
    }

    /// Lab-frame tensor `α_s I + (α_l - α_s) u uᵀ` for a long axis `u`.
    pub fn lab_frame(&self, long_axis: Vector3<f64>) -> Matrix3<Complex64> {
        let u = long_axis.normalize().map(|c| Complex64::new(c, 0.0));
        Matrix3::identity() * self.alpha_short + u * u.transpose() * (self.alpha_long - self.alpha_short)
    }
}

/// Per-axis quasistatic polarizability for a given particle permittivity.
pub fn quasistatic_from_permittivity(
    a: f64,
    b: f64,
    eps: Complex64,
    eps_host: f64,
) -> Result<(Complex64, Complex64)> {
    let (l_long, l_short) = depolarization_factors(a, b)?;
    let volume = 4.0 / 3.0 * PI * a * b * b;
    let d = eps - eps_host;
    let one = |l: f64| volume * d / (eps_host + l * d);
    Ok((one(l_long), one(l_short)))
}

/// Uncorrected (electrostatic) polarizability at a vacuum wavelength.
pub fn quasistatic_polarizability(
    particle: &SpheroidParticle,
    host: &HostMedium,
    wavelength_nm: f64,
) -> Result<PolarizabilityTensor> {
    let eps = particle.material.permittivity(wavelength_nm)?;
    let (alpha_long, alpha_short) = quasistatic_from_permittivity(
        particle.semi_axis_long,
        particle.semi_axis_short,
        eps,
        host.permittivity(),
    )?;
    Ok(PolarizabilityTensor {
        wavelength_nm,
        alpha_long,
        alpha_short,
        k: host.wavenumber(wavelength_nm),
    })
}

/// Weight of the dynamic-depolarization term relative to the textbook
/// `k²/(4π a)` form. The full-strength term over-shifts a 60 nm silver sphere
/// against the Mie series by up to 120% on 500-650 nm; weights between 0.62
/// and 0.71 stay within 15%, with the best agreement near 0.64.
pub const DYNAMIC_DEPOLARIZATION_WEIGHT: f64 = 0.7;

/// Single-axis dynamic-depolarization and radiative-reaction correction:
/// `α = α0 / (1 - w k² α0 / (4π a_j) - i k³ α0 / 6π)` with `a_j` the
/// semi-axis along the driven direction and `w` the
/// [`DYNAMIC_DEPOLARIZATION_WEIGHT`].
pub fn corrected_axis(alpha0: Complex64, k: f64, semi_axis: f64) -> Complex64 {
    if alpha0 == Complex64::new(0.0, 0.0) {
        return alpha0;
    }
    let denom = Complex64::new(1.0, 0.0)
        - alpha0 * (DYNAMIC_DEPOLARIZATION_WEIGHT * k * k / (4.0 * PI * semi_axis))
        - Complex64::new(0.0, k * k * k / (6.0 * PI)) * alpha0;
    alpha0 / denom
}

/// Applies the long-wavelength corrections to a quasistatic tensor.
///
/// The `k → 0` limit returns `alpha0` unchanged. The radiative term makes the
/// optical theorem exact: a lossless particle has zero absorption.
pub fn corrected_polarizability(
    alpha0: &PolarizabilityTensor,
    k: f64,
    particle: &SpheroidParticle,
) -> Result<PolarizabilityTensor> {
    if !(k >= 0.0 && k.is_finite()) {
        return Err(Error::domain(format!("wavenumber must be >= 0, got {k}")));
    }
    Ok(PolarizabilityTensor {
        wavelength_nm: alpha0.wavelength_nm,
        alpha_long: corrected_axis(alpha0.alpha_long, k, particle.semi_axis_long),
        alpha_short: corrected_axis(alpha0.alpha_short, k, particle.semi_axis_short),
        k,
    })
}

/// Quasistatic + corrected polarizability in one call.
pub fn polarizability(
    particle: &SpheroidParticle,
    host: &HostMedium,
    wavelength_nm: f64,
) -> Result<PolarizabilityTensor> {
    let a0 = quasistatic_polarizability(particle, host, wavelength_nm)?;
    corrected_polarizability(&a0, a0.k, particle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sphere_factors_are_one_third() {
        let (l, s) = depolarization_factors(20.0, 20.0).unwrap();
        assert!((l - 1.0 / 3.0).abs() < 1e-15);
        assert!((s - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn needle_limit() {
        let (l, s) = depolarization_factors(1e6, 1.0).unwrap();
        assert!(l < 1e-9);
        assert!((s - 0.5).abs() < 1e-9);
    }

    #[test]
    fn series_and_closed_form_agree_at_switch() {
        // e² = 2.5e-3 on both sides of the branch
        let b = (1.0f64 - 2.5e-3).sqrt();
        let below = depolarization_factors(1.0, b + 1e-12).unwrap().0;
        let above = depolarization_factors(1.0, b - 1e-12).unwrap().0;
        assert!((below - above).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_axes() {
        assert!(depolarization_factors(0.0, 0.0).is_err());
        assert!(depolarization_factors(10.0, -1.0).is_err());
        assert!(depolarization_factors(10.0, 20.0).is_err());
    }

    proptest! {
        #[test]
        fn factors_sum_to_one_and_are_ordered(b in 0.5f64..100.0, ratio in 1.0f64..50.0) {
            let (l, s) = depolarization_factors(b * ratio, b).unwrap();
            prop_assert!((l + 2.0 * s - 1.0).abs() < 1e-15);
            prop_assert!(l > 0.0 && l <= 1.0 / 3.0 + 1e-15);
            prop_assert!((1.0 / 3.0 - 1e-15..1.0).contains(&s));
        }
    }

    #[test]
    fn index_matched_particle_is_invisible() {
        let (l, s) = quasistatic_from_permittivity(47.0, 23.0, Complex64::new(2.22, 0.0), 2.22).unwrap();
        assert_eq!(l, Complex64::new(0.0, 0.0));
        assert_eq!(s, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn sphere_reduces_to_clausius_mossotti() {
        let eps = Complex64::new(-8.0, 0.3);
        let eh = 2.22;
        let r = 30.0;
        let (l, s) = quasistatic_from_permittivity(r, r, eps, eh).unwrap();
        let cm = 4.0 * PI * r.powi(3) * (eps - eh) / (eps + 2.0 * eh);
        assert!((l - cm).norm() < 1e-9 * cm.norm());
        assert!((s - cm).norm() < 1e-9 * cm.norm());
    }

    #[test]
    fn static_limit_of_correction() {
        let p = SpheroidParticle::silver_from_diameters(94.0, 46.0, [1.0, 0.0]).unwrap();
        let host = HostMedium::index_matched_oil();
        let a0 = quasistatic_polarizability(&p, &host, 589.0).unwrap();
        let c = corrected_polarizability(&a0, 0.0, &p).unwrap();
        assert!((c.alpha_long - a0.alpha_long).norm() <= 1e-12 * a0.alpha_long.norm());
        // relative deviation scales ~k² across two decades of k
        let dev = |k: f64| {
            let c = corrected_polarizability(&a0, k, &p).unwrap();
            (c.alpha_long - a0.alpha_long).norm() / a0.alpha_long.norm()
        };
        let (d1, d2) = (dev(1e-4), dev(1e-6));
        assert!(d2 < 1e-6 && d1 < 1e-2);
        let slope = (d1 / d2).log10() / 2.0;
        assert!((slope - 2.0).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn lab_tensor_is_diagonal_for_aligned_axis() {
        let t = PolarizabilityTensor {
            wavelength_nm: 589.0,
            alpha_long: Complex64::new(1.0, 2.0),
            alpha_short: Complex64::new(0.5, 0.1),
            k: 0.01,
        };
        let m = t.lab_frame(Vector3::new(1.0, 0.0, 0.0));
        assert_eq!(m[(0, 0)], t.alpha_long);
        assert_eq!(m[(1, 1)], t.alpha_short);
        assert_eq!(m[(2, 2)], t.alpha_short);
        assert_eq!(m[(0, 1)], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn extent_along_axes() {
        let p = SpheroidParticle::silver_from_diameters(94.0, 46.0, [1.0, 0.0]).unwrap();
        assert!((p.extent_along([1.0, 0.0]) - 94.0).abs() < 1e-12);
        assert!((p.extent_along([0.0, 1.0]) - 46.0).abs() < 1e-12);
    }
}
