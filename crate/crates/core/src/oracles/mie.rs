use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Exact sphere cross sections (nm²) from the partial-wave series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MieCrossSections {
    pub ext: f64,
    pub sca: f64,
    pub abs: f64,
    pub terms: usize,
}

/// Largest size parameter `k·radius` the series is used for.
pub const MAX_SIZE_PARAMETER: f64 = 5.0;

fn check(radius_nm: f64, host_index: f64, wavelength_nm: f64) -> Result<f64> {
    if !(radius_nm > 0.0 && host_index >= 1.0 && wavelength_nm > 0.0) {
        return Err(Error::domain("mie needs positive radius and wavelength and host index >= 1"));
    }
    let x = 2.0 * PI * host_index * radius_nm / wavelength_nm;
    if x >= MAX_SIZE_PARAMETER {
        return Err(Error::domain(format!("size parameter {x:.3} exceeds {MAX_SIZE_PARAMETER}")));
    }
    Ok(x)
}

/// Coefficients `(a_n, b_n)` for `n = 1..=nmax` with downward logarithmic
/// derivatives and upward Riccati-Bessel recurrences.
fn coefficients(x: f64, m: Complex64, nmax: usize) -> Vec<(Complex64, Complex64)> {
    let y = m * x;
    let nmx = (nmax as f64).max(y.norm()).ceil() as usize + 16;
    let mut d = vec![Complex64::new(0.0, 0.0); nmx + 1];
    for n in (1..=nmx).rev() {
        let en = Complex64::from(n as f64) / y;
        d[n - 1] = en - 1.0 / (d[n] + en);
    }
    let (mut psi0, mut psi1) = (x.cos(), x.sin());
    let (mut chi0, mut chi1) = (-x.sin(), x.cos());
    let mut xi1 = Complex64::new(psi1, -chi1);
    let mut out = Vec::with_capacity(nmax);
    #[allow(clippy::needless_range_loop)]
    for n in 1..=nmax {
        let nf = n as f64;
        let psi = (2.0 * nf - 1.0) / x * psi1 - psi0;
        let chi = (2.0 * nf - 1.0) / x * chi1 - chi0;
        let xi = Complex64::new(psi, -chi);
        let da = d[n] / m + nf / x;
        let db = d[n] * m + nf / x;
        let a = (da * psi - psi1) / (da * xi - xi1);
        let b = (db * psi - psi1) / (db * xi - xi1);
        out.push((a, b));
        psi0 = psi1;
        psi1 = psi;
        chi0 = chi1;
        chi1 = chi;
        xi1 = xi;
    }
    out
}

/// Full Mie series, summed until a term falls below 1e-10 of the running sum
/// past the Wiscombe estimate.
pub fn mie_sphere_cross_sections(
    radius_nm: f64,
    permittivity: Complex64,
    host_index: f64,
    wavelength_nm: f64,
) -> Result<MieCrossSections> {
    let x = check(radius_nm, host_index, wavelength_nm)?;
    let m = permittivity.sqrt() / host_index;
    let nstop = (x + 4.0 * x.cbrt() + 2.0).ceil() as usize;
    let nmax = nstop + 40;
    let coef = coefficients(x, m, nmax);
    let (mut qext, mut qsca) = (0.0, 0.0);
    for (i, (a, b)) in coef.iter().enumerate() {
        let n = (i + 1) as f64;
        let te = (2.0 * n + 1.0) * (a + b).re;
        let ts = (2.0 * n + 1.0) * (a.norm_sqr() + b.norm_sqr());
        qext += te;
        qsca += ts;
        // terms at rounding level mean the sphere is (nearly) index matched
        let small = |t: f64, sum: f64| t.abs() <= 1e-10 * sum.abs() || t.abs() < 1e-15;
        if i + 1 >= nstop && small(te, qext) && small(ts, qsca) {
            return Ok(finish(qext, qsca, x, radius_nm, i + 1));
        }
    }
    Err(Error::Numerical(format!("mie series did not converge within {nmax} terms")))
}

/// Electric-dipole (`a_1`) term only.
pub fn mie_dipole_cross_sections(
    radius_nm: f64,
    permittivity: Complex64,
    host_index: f64,
    wavelength_nm: f64,
) -> Result<MieCrossSections> {
    let x = check(radius_nm, host_index, wavelength_nm)?;
    let m = permittivity.sqrt() / host_index;
    let (a1, _) = coefficients(x, m, 1)[0];
    Ok(finish(3.0 * a1.re, 3.0 * a1.norm_sqr(), x, radius_nm, 1))
}

fn finish(qext_sum: f64, qsca_sum: f64, x: f64, radius_nm: f64, terms: usize) -> MieCrossSections {
    let geometric = PI * radius_nm * radius_nm;
    let ext = 2.0 / (x * x) * qext_sum * geometric;
    let sca = 2.0 / (x * x) * qsca_sum * geometric;
    MieCrossSections { ext, sca, abs: ext - sca, terms }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_matched_sphere_does_not_scatter() {
        let eps = Complex64::new(1.49 * 1.49, 0.0);
        let c = mie_sphere_cross_sections(30.0, eps, 1.49, 550.0).unwrap();
        let geometric = PI * 900.0;
        assert!(c.ext.abs() < 1e-12 * geometric && c.sca.abs() < 1e-12 * geometric);
    }

    #[test]
    fn small_lossless_sphere_follows_rayleigh() {
        let eps = Complex64::new(4.0, 0.0);
        let r = 2.0;
        let c1 = mie_sphere_cross_sections(r, eps, 1.0, 1000.0).unwrap();
        let c2 = mie_sphere_cross_sections(r, eps, 1.0, 10000.0).unwrap();
        assert!((c1.ext - c1.sca).abs() < 1e-9 * c1.ext);
        // k⁴ scaling over a decade of wavelength
        assert!((c1.sca / c2.sca / 1e4 - 1.0).abs() < 1e-3);
        // textbook Rayleigh limit 8π/3 k⁴ r⁶ |(m²-1)/(m²+2)|²
        let k = 2.0 * PI / 10000.0;
        let ray = 8.0 * PI / 3.0 * k.powi(4) * r.powi(6) * 0.25;
        assert!((c2.sca / ray - 1.0).abs() < 1e-4);
    }

    #[test]
    fn matches_direct_bessel_evaluation() {
        // efficiencies from a direct spherical-Bessel evaluation (scipy.special)
        let cases = [
            (Complex64::new(1.5, 0.1), 1.0, 0.4823704563469861, 0.20874001831483605),
            (Complex64::new(1.5, 0.1), 3.0, 3.0219982482823378, 2.1267487078168674),
        ];
        for (m, x, qext, qsca) in cases {
            let wl = 2.0 * PI;
            let c = mie_sphere_cross_sections(x, m * m, 1.0, wl).unwrap();
            let g = PI * x * x;
            assert!((c.ext / g - qext).abs() < 1e-9, "{}", c.ext / g);
            assert!((c.sca / g - qsca).abs() < 1e-9, "{}", c.sca / g);
        }
        let eps = Complex64::new(-10.0, 1.0);
        let c = mie_sphere_cross_sections(30.0, eps, 1.49, 550.0).unwrap();
        let g = PI * 900.0;
        assert!((c.ext / g - 2.725811085064102).abs() < 1e-9);
        assert!((c.sca / g - 1.7754002181178234).abs() < 1e-9);
    }

    #[test]
    fn large_sizes_are_rejected() {
        assert!(mie_sphere_cross_sections(500.0, Complex64::new(-10.0, 1.0), 1.49, 400.0).is_err());
    }
}
