use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest numerical aperture the scalar model is trusted for.
pub const MAX_SCALAR_NA: f64 = 0.3;

/// Sampling of the direct pupil quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PupilSampling {
    /// Simpson intervals in the polar angle (even).
    pub theta: usize,
    /// Trapezoid points in azimuth.
    pub phi: usize,
}

impl Default for PupilSampling {
    fn default() -> Self {
        Self { theta: 400, phi: 64 }
    }
}

/// `|U(x, 0, z)|²` of the scalar Debye integral
/// `U = ∫∫ g(θ) exp(ik(x sinθ cosφ + z cosθ)) sinθ dφ dθ` with
/// `g = exp(-sin²θ / (f0² sin²α)) √cosθ`, summed directly over the pupil.
/// `fill_factor = None` means uniform illumination.
pub fn scalar_focus_profile(
    na: f64,
    wavelength_nm: f64,
    host_index: f64,
    fill_factor: Option<f64>,
    x_nm: &[f64],
    z_nm: f64,
    sampling: PupilSampling,
) -> Result<Vec<f64>> {
    if !(na > 0.0 && na <= MAX_SCALAR_NA && na < host_index) {
        return Err(Error::domain(format!("scalar focus needs 0 < NA <= {MAX_SCALAR_NA}")));
    }
    if sampling.theta < 2 || sampling.theta % 2 == 1 || sampling.phi < 4 {
        return Err(Error::domain("pupil sampling needs an even theta count >= 2 and phi >= 4"));
    }
    let k = 2.0 * PI * host_index / wavelength_nm;
    let alpha = (na / host_index).asin();
    let s_alpha = alpha.sin();
    let g = |t: f64| {
        let gauss = fill_factor.map_or(1.0, |f0| (-(t.sin() / (f0 * s_alpha)).powi(2)).exp());
        gauss * t.cos().sqrt()
    };
    let h = alpha / sampling.theta as f64;
    let dphi = 2.0 * PI / sampling.phi as f64;
    let cos_phi: Vec<f64> = (0..sampling.phi).map(|j| (j as f64 * dphi).cos()).collect();
    Ok(x_nm
        .iter()
        .map(|&x| {
            let mut u = Complex64::new(0.0, 0.0);
            for i in 0..=sampling.theta {
                let t = i as f64 * h;
                let w = if i == 0 || i == sampling.theta {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                let ring: Complex64 = cos_phi
                    .iter()
                    .map(|c| Complex64::from_polar(1.0, k * (x * t.sin() * c + z_nm * t.cos())))
                    .sum();
                u += ring * (w * g(t) * t.sin());
            }
            (u * (h / 3.0 * dphi)).norm_sqr()
        })
        .collect())
}

/// FWHM of a symmetric profile sampled on `x ≥ 0` starting at the peak.
pub fn half_profile_fwhm(x_nm: &[f64], values: &[f64]) -> Result<f64> {
    let peak = values.first().copied().ok_or_else(|| Error::domain("empty profile"))?;
    let i = values
        .iter()
        .position(|&v| v < 0.5 * peak)
        .ok_or_else(|| Error::domain("profile never drops below half maximum"))?;
    if i == 0 {
        return Err(Error::domain("profile must start at its maximum"));
    }
    let (x0, x1, v0, v1) = (x_nm[i - 1], x_nm[i], values[i - 1], values[i]);
    Ok(2.0 * (x0 + (0.5 * peak - v0) * (x1 - x0) / (v1 - v0)))
}
