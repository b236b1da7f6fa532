use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use plasmon_focus::imaging::{finite_size_correction, DetectionGeometry, Detector, Scatterer};
use plasmon_focus::focus::{BeamParams, FocusedBeam};
use plasmon_focus::materials::{polarizability, HostMedium, SpheroidParticle};
use plasmon_focus::nalgebra::Vector3;
use plasmon_focus_ffi::*;

fn particle() -> *mut PfParticle {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { pf_particle_new(94.0, 46.0, 1.0, 0.0, 1.49, &mut p) }, PfStatus::Ok);
    p
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(pf_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn signal_matches_the_library() {
    let p = particle();
    let beam = PfBeam { wavelength_nm: 589.0, na_focus: 1.4, fill_factor: 0.7, polarization_x: 1.0, polarization_y: 0.0 };
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { pf_imager_new(p, &beam, 1, 1.4, 1e-3, &mut d) }, PfStatus::Ok);
    let mut s = PfSignal::default();
    assert_eq!(unsafe { pf_imager_signal(d, 30.0, -40.0, 0.0, &mut s) }, PfStatus::Ok);

    let host = HostMedium::index_matched_oil();
    let sp = SpheroidParticle::silver_from_diameters(94.0, 46.0, [1.0, 0.0]).unwrap();
    let fb = FocusedBeam::new(&BeamParams::default(), &host).unwrap();
    let det = Detector::new(&fb, &DetectionGeometry::reflection(1.4)).unwrap();
    let sc = Scatterer::new(&polarizability(&sp, &host, 589.0).unwrap(), &sp);
    let want = det.signal(&sc, Vector3::new(30.0, -40.0, 0.0));
    assert_eq!(s.signal, want.signal());
    assert_eq!(s.interference_term, want.interference_term);

    let mut bg = 0.0;
    assert_eq!(unsafe { pf_imager_background(d, &mut bg) }, PfStatus::Ok);
    assert_eq!(bg, det.background());
    unsafe {
        pf_imager_free(d);
        pf_particle_free(p);
    }
}

#[test]
fn spectrum_and_buffers() {
    let p = particle();
    let mut buf = vec![PfCrossSections::default(); 5];
    assert_eq!(unsafe { pf_spectrum(p, 500.0, 700.0, 5, 0, buf.as_mut_ptr(), 5) }, PfStatus::Ok);
    assert_eq!(buf[4].wavelength_nm, 700.0);
    assert!(buf.iter().all(|c| (c.ext - c.sca - c.abs).abs() <= 1e-9 * c.ext));
    assert_eq!(unsafe { pf_spectrum(p, 500.0, 700.0, 6, 0, buf.as_mut_ptr(), 5) }, PfStatus::BufferTooSmall);
    assert!(last_error().contains("6 needed"));
    assert_eq!(unsafe { pf_spectrum(p, 500.0, 700.0, 5, 7, buf.as_mut_ptr(), 5) }, PfStatus::Domain);
    unsafe { pf_particle_free(p) };
}

#[test]
fn errors_and_nulls() {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { pf_particle_new(94.0, 46.0, 1.0, 0.0, 0.5, &mut p) }, PfStatus::Domain);
    assert!(p.is_null());
    assert!(last_error().contains("refractive index"));
    let mut c = PfCrossSections::default();
    assert_eq!(unsafe { pf_cross_sections(ptr::null(), 589.0, 0, &mut c) }, PfStatus::NullPointer);
    let q = particle();
    assert_eq!(unsafe { pf_cross_sections(q, 2000.0, 0, &mut c) }, PfStatus::Domain);
    assert_eq!(unsafe { pf_cross_sections(q, 589.0, 0, &mut c) }, PfStatus::Ok);
    assert_eq!(last_error(), "");
    unsafe {
        pf_particle_free(q);
        pf_particle_free(ptr::null_mut());
    }
}

#[test]
fn scalar_helpers() {
    let mut g = -1.0;
    assert_eq!(unsafe { pf_g2_theory(9.5, 1.0 / 9.5, 0.0, &mut g) }, PfStatus::Ok);
    assert_eq!(g, 0.0);
    let mut w = 0.0;
    assert_eq!(unsafe { pf_finite_size_correction(257.0, 46.0, &mut w) }, PfStatus::Ok);
    assert_eq!(w, finite_size_correction(257.0, 46.0).unwrap().corrected_nm);
    assert_eq!(unsafe { pf_finite_size_correction(-1.0, 46.0, &mut w) }, PfStatus::Domain);
}

#[test]
fn header_declares_every_entry_point() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/plasmon_focus.h")).unwrap();
    for f in [
        "pf_last_error_message", "pf_version", "pf_particle_new", "pf_particle_free", "pf_cross_sections",
        "pf_spectrum", "pf_imager_new", "pf_imager_free", "pf_imager_signal", "pf_imager_background",
        "pf_raster_scan", "pf_g2_theory", "pf_finite_size_correction",
    ] {
        assert!(h.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(h.contains("typedef struct PfParticle PfParticle;"));
}

/// Compiles a small C program against the header and the static library.
#[test]
fn c_program_links_and_runs() {
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // integration tests live in target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libplasmon_focus_ffi.a");
    assert!(lib.exists(), "static library not built at {}", lib.display());
    let tmp = tempfile::tempdir().unwrap();
    let bin = tmp.path().join("smoke");
    let status = Command::new(&cc)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "smoke test exited with {:?}", out.status.code());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with(env!("CARGO_PKG_VERSION")));
}

fn which_cc() -> Result<String, ()> {
    for cc in ["cc", "gcc", "clang"] {
        if Command::new(cc).arg("--version").output().is_ok_and(|o| o.status.success()) {
            return Ok(cc.to_string());
        }
    }
    Err(())
}
