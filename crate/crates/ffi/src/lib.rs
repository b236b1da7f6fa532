//! C ABI over `plasmon-focus`.
//!
//! Every function returns a [`PfStatus`]; on failure the message is available
//! from [`pf_last_error_message`] on the same thread. Handles are opaque and
//! must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use plasmon_focus::focus::{BeamParams, TransverseGrid};
use plasmon_focus::imaging::{
    finite_size_correction, raster_scan_with, Broadband, Channel, DetectionGeometry, Imager, ResidualReflection,
    SourceSpectrum,
};
use plasmon_focus::materials::{
    cross_sections, plasmon_spectrum, polarizability, CrossSections, HostMedium, PolarizationAxis,
    SpheroidParticle, WavelengthRange,
};
use plasmon_focus::nalgebra::Vector3;
use plasmon_focus::photon::{g2_theory, EmitterModel};
use plasmon_focus::Error;

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PfStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Numerical = 3,
    BufferTooSmall = 4,
    Panic = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul bytes removed"));
}

fn status_of(e: Error) -> PfStatus {
    let code = match e.exit_code() {
        3 => PfStatus::Numerical,
        _ => PfStatus::Domain,
    };
    set_error(e.to_string());
    code
}

fn guard(f: impl FnOnce() -> Result<(), PfStatus>) -> PfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            PfStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside plasmon-focus");
            PfStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), PfStatus> {
    if p.is_null() {
        set_error(format!("{what} is null"));
        Err(PfStatus::NullPointer)
    } else {
        Ok(())
    }
}

/// Message of the last failed call on this thread (empty after success).
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn pf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Silver spheroid in a host medium.
pub struct PfParticle {
    particle: SpheroidParticle,
    host: HostMedium,
}

/// Focused-beam detector for one channel with its particle.
pub struct PfImager {
    imager: Broadband,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PfCrossSections {
    pub wavelength_nm: f64,
    pub ext: f64,
    pub sca: f64,
    pub abs: f64,
}

impl From<CrossSections> for PfCrossSections {
    fn from(c: CrossSections) -> Self {
        Self { wavelength_nm: c.wavelength_nm, ext: c.ext, sca: c.sca, abs: c.abs }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PfBeam {
    pub wavelength_nm: f64,
    pub na_focus: f64,
    pub fill_factor: f64,
    pub polarization_x: f64,
    pub polarization_y: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PfSignal {
    pub signal: f64,
    pub ref_term: f64,
    pub sca_term: f64,
    pub interference_term: f64,
    pub phase_rad: f64,
}

/// 0 = transmission, 1 = reflection.
pub type PfChannel = u32;
/// 0 = long axis, 1 = short axis.
pub type PfAxis = u32;

fn axis(a: PfAxis) -> Result<PolarizationAxis, PfStatus> {
    match a {
        0 => Ok(PolarizationAxis::Long),
        1 => Ok(PolarizationAxis::Short),
        _ => {
            set_error(format!("axis must be 0 (long) or 1 (short), got {a}"));
            Err(PfStatus::Domain)
        }
    }
}

/// Creates a silver spheroid from full axis lengths (nm).
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn pf_particle_new(
    long_diameter_nm: f64,
    short_diameter_nm: f64,
    orientation_x: f64,
    orientation_y: f64,
    host_index: f64,
    out: *mut *mut PfParticle,
) -> PfStatus {
    guard(|| {
        non_null(out, "out")?;
        let particle = SpheroidParticle::silver_from_diameters(
            long_diameter_nm,
            short_diameter_nm,
            [orientation_x, orientation_y],
        )
        .map_err(status_of)?;
        let host = HostMedium::new(host_index).map_err(status_of)?;
        *out = Box::into_raw(Box::new(PfParticle { particle, host }));
        Ok(())
    })
}

/// # Safety
/// `p` must come from [`pf_particle_new`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn pf_particle_free(p: *mut PfParticle) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Cross sections (nm²) for light polarized along one particle axis.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pf_cross_sections(
    p: *const PfParticle,
    wavelength_nm: f64,
    polarization_axis: PfAxis,
    out: *mut PfCrossSections,
) -> PfStatus {
    guard(|| {
        non_null(p, "particle")?;
        non_null(out, "out")?;
        let p = &*p;
        let ax = axis(polarization_axis)?;
        let alpha = polarizability(&p.particle, &p.host, wavelength_nm).map_err(status_of)?;
        *out = cross_sections(&alpha, alpha.k, ax).map_err(status_of)?.into();
        Ok(())
    })
}

/// Evenly spaced spectrum into `out[0..points]`.
///
/// # Safety
/// `out` must hold at least `capacity` elements.
#[no_mangle]
pub unsafe extern "C" fn pf_spectrum(
    p: *const PfParticle,
    start_nm: f64,
    end_nm: f64,
    points: usize,
    polarization_axis: PfAxis,
    out: *mut PfCrossSections,
    capacity: usize,
) -> PfStatus {
    guard(|| {
        non_null(p, "particle")?;
        non_null(out, "out")?;
        if capacity < points {
            set_error(format!("buffer holds {capacity} entries, {points} needed"));
            return Err(PfStatus::BufferTooSmall);
        }
        let p = &*p;
        let range = WavelengthRange::new(start_nm, end_nm, points);
        let s = plasmon_spectrum(&p.particle, &p.host, &range, axis(polarization_axis)?).map_err(status_of)?;
        let buf = std::slice::from_raw_parts_mut(out, points);
        for (slot, c) in buf.iter_mut().zip(s) {
            *slot = c.into();
        }
        Ok(())
    })
}

/// Detector for `channel` with collection NA `na_collect`. The reflection
/// reference is a residual reflection of power fraction `residual_power`.
///
/// # Safety
/// `p` and `beam` must be valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pf_imager_new(
    p: *const PfParticle,
    beam: *const PfBeam,
    channel: PfChannel,
    na_collect: f64,
    residual_power: f64,
    out: *mut *mut PfImager,
) -> PfStatus {
    guard(|| {
        non_null(p, "particle")?;
        non_null(beam, "beam")?;
        non_null(out, "out")?;
        let (p, b) = (&*p, &*beam);
        let channel = match channel {
            0 => Channel::Transmission,
            1 => Channel::Reflection,
            c => {
                set_error(format!("channel must be 0 or 1, got {c}"));
                return Err(PfStatus::Domain);
            }
        };
        let params = BeamParams {
            wavelength_nm: b.wavelength_nm,
            na_focus: b.na_focus,
            fill_factor: b.fill_factor,
            polarization: [b.polarization_x, b.polarization_y],
            ..BeamParams::default()
        };
        let det = DetectionGeometry {
            channel,
            na_collect,
            residual_reflection: ResidualReflection { power: residual_power, phase_rad: 0.0 },
        };
        let spectrum = SourceSpectrum::delta(b.wavelength_nm);
        let imager = Broadband::new(&params, &p.host, &p.particle, &spectrum, &det).map_err(status_of)?;
        *out = Box::into_raw(Box::new(PfImager { imager }));
        Ok(())
    })
}

/// # Safety
/// `d` must come from [`pf_imager_new`] and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn pf_imager_free(d: *mut PfImager) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Normalized detector signal with the particle at `(x, y, z)` nm.
///
/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pf_imager_signal(d: *const PfImager, x_nm: f64, y_nm: f64, z_nm: f64, out: *mut PfSignal) -> PfStatus {
    guard(|| {
        non_null(d, "imager")?;
        non_null(out, "out")?;
        let s = (*d).imager.decomposition(Vector3::new(x_nm, y_nm, z_nm));
        *out = PfSignal {
            signal: s.signal(),
            ref_term: s.ref_term,
            sca_term: s.sca_term,
            interference_term: s.interference_term,
            phase_rad: s.phase,
        };
        Ok(())
    })
}

/// No-particle signal level of the detector.
///
/// # Safety
/// `d` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pf_imager_background(d: *const PfImager, out: *mut f64) -> PfStatus {
    guard(|| {
        non_null(d, "imager")?;
        non_null(out, "out")?;
        *out = (*d).imager.background();
        Ok(())
    })
}

/// Row-major `nx × ny` raster scan centred on the focus into `out`.
///
/// # Safety
/// `out` must hold at least `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn pf_raster_scan(
    d: *const PfImager,
    nx: usize,
    ny: usize,
    pitch_nm: f64,
    z_nm: f64,
    out: *mut f64,
    capacity: usize,
) -> PfStatus {
    guard(|| {
        non_null(d, "imager")?;
        non_null(out, "out")?;
        let n = nx.checked_mul(ny).ok_or_else(|| {
            set_error("grid size overflows");
            PfStatus::Domain
        })?;
        if capacity < n {
            set_error(format!("buffer holds {capacity} pixels, {n} needed"));
            return Err(PfStatus::BufferTooSmall);
        }
        let grid = TransverseGrid { nx, ny, pitch_nm, z_nm };
        let img = raster_scan_with(&(*d).imager, &grid).map_err(status_of)?;
        std::slice::from_raw_parts_mut(out, n).copy_from_slice(&img.pixels);
        Ok(())
    })
}

/// cw two-level `g2(τ)` for lifetime `τ₁` and pump rate `R` (per ns).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pf_g2_theory(lifetime_ns: f64, pump_rate_per_ns: f64, tau_ns: f64, out: *mut f64) -> PfStatus {
    guard(|| {
        non_null(out, "out")?;
        let m = EmitterModel { excited_lifetime_ns: lifetime_ns, pump_rate_per_ns, ..EmitterModel::default() };
        *out = g2_theory(&m, tau_ns).map_err(status_of)?;
        Ok(())
    })
}

/// Image width after folding in the particle extent.
///
/// # Safety
/// `out_corrected_nm` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pf_finite_size_correction(
    fwhm_point_dipole_nm: f64,
    particle_extent_nm: f64,
    out_corrected_nm: *mut f64,
) -> PfStatus {
    guard(|| {
        non_null(out_corrected_nm, "out")?;
        *out_corrected_nm = finite_size_correction(fwhm_point_dipole_nm, particle_extent_nm)
            .map_err(status_of)?
            .corrected_nm;
        Ok(())
    })
}
