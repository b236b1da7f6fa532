use plasmon_focus::focus::{BeamParams, FocusedBeam, MapAxis};
use plasmon_focus::imaging::{
    conversion_efficiency, raster_scan, scan_line, scan_line_with, Broadband, DetectionGeometry, Detector,
    Imager, ScanGrid, Scatterer, SourceSpectrum,
};
use plasmon_focus::materials::{polarizability, HostMedium, SpheroidParticle};
use plasmon_focus::nalgebra::Vector3;
use plasmon_focus::photon::{
    count_frames, count_image, g2_estimate, simulate_stream, CountSource, EmitterModel,
};
use proptest::prelude::*;

/// Fill factor of the bundled fig3 preset after calibration.
const F0: f64 = 0.6672;

fn setup(f0: f64) -> (HostMedium, FocusedBeam, SpheroidParticle, Scatterer) {
    let host = HostMedium::index_matched_oil();
    let beam = FocusedBeam::new(&BeamParams { fill_factor: f0, ..BeamParams::default() }, &host).unwrap();
    let p = SpheroidParticle::silver_from_diameters(94.0, 46.0, [1.0, 0.0]).unwrap();
    let sc = Scatterer::new(&polarizability(&p, &host, 589.0).unwrap(), &p);
    (host, beam, p, sc)
}

#[test]
fn reflection_peak_is_dominated_by_scattering() {
    let (_, beam, _, sc) = setup(F0);
    let det = Detector::new(&beam, &DetectionGeometry::reflection(1.4)).unwrap();
    let d = det.signal(&sc, Vector3::zeros());
    assert!(d.sca_term > d.interference_term.abs(), "{d:?}");
}

#[test]
fn weaker_particle_gives_weaker_contrast() {
    let (_, beam, _, sc) = setup(F0);
    for det in [DetectionGeometry::transmission(1.0), DetectionGeometry::reflection(1.4)] {
        let d = Detector::new(&beam, &det).unwrap();
        let full = scan_line(&d, &sc, MapAxis::Y, 900.0, 10.0).unwrap().contrast();
        let weak = scan_line(&d, &sc.scaled(0.1), MapAxis::Y, 900.0, 10.0).unwrap().contrast();
        assert!(weak < full, "{:?}: {weak} vs {full}", det.channel);
    }
}

#[test]
fn no_particle_gives_flat_images() {
    let (_, beam, _, _) = setup(F0);
    for det in [DetectionGeometry::transmission(1.0), DetectionGeometry::reflection(1.4)] {
        let d = Detector::new(&beam, &det).unwrap();
        let img = raster_scan(&d, &Scatterer::none(), &ScanGrid::square(9, 60.0)).unwrap();
        assert!(img.pixels.iter().all(|&p| p == img.background), "{:?}", det.channel);
    }
}

#[test]
fn off_resonance_band_barely_shows() {
    let (host, _, p, _) = setup(F0);
    let beam = BeamParams { fill_factor: F0, ..BeamParams::default() };
    // resonance near 574 nm; band centred well over 100 nm to the red
    let src = SourceSpectrum::gaussian(700.0, 20.0, 7).unwrap();
    let im = Broadband::new(&beam, &host, &p, &src, &DetectionGeometry::transmission(1.0)).unwrap();
    let c = scan_line_with(&im, MapAxis::Y, 1500.0, 5.0).unwrap().contrast();
    assert!(c < 0.05, "{c}");
}

#[test]
fn reflection_contrast_is_insensitive_to_reference_power() {
    let (host, _, p, _) = setup(F0);
    let beam = BeamParams { fill_factor: F0, ..BeamParams::default() };
    for power in [1e-4, 1e-3, 1e-2] {
        let mut det = DetectionGeometry::reflection(1.4);
        det.residual_reflection.power = power;
        let im = Broadband::new(&beam, &host, &p, &SourceSpectrum::delta(589.0), &det).unwrap();
        let c = scan_line_with(&im, MapAxis::Y, 900.0, 5.0).unwrap().contrast();
        assert!((c - 0.22).abs() <= 0.08, "|r|^2 = {power}: contrast {c}");
        assert_eq!(im.background(), power);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn dip_never_exceeds_conversion(f0 in 0.3f64..1.5, na_extra in 0.0f64..0.09) {
        let (_, beam, _, sc) = setup(f0);
        let e = conversion_efficiency(&beam, &sc, &DetectionGeometry::transmission(1.4 + na_extra)).unwrap();
        prop_assert!(e.lower_bound <= e.conversion() + 1e-6);
        prop_assert!(e.energy_residual().abs() < 1e-9);
    }
}

#[test]
fn count_image_mean_tracks_expectation() {
    let (_, beam, _, sc) = setup(F0);
    let d = Detector::new(&beam, &DetectionGeometry::transmission(1.0)).unwrap();
    let img = raster_scan(&d, &sc, &ScanGrid::square(11, 60.0)).unwrap();
    let frames = count_frames(&img, 40.0, CountSource::Poisson, 0.5, 1.0e5, 12, 7).unwrap();
    let mu: Vec<f64> = img.pixels.iter().map(|p| 4000.0 * 0.5 * p).collect();
    // each pixel mean is an average of 12 Poisson draws
    let z: Vec<f64> = frames.mean.iter().zip(&mu).map(|(m, u)| (m - u) / (u / 12.0).sqrt()).collect();
    let (total, want) = (frames.mean.iter().sum::<f64>(), mu.iter().sum::<f64>());
    assert!((total - want).abs() <= 3.0 * (want / 12.0).sqrt(), "{total} vs {want}");
    let sd = (z.iter().map(|v| v * v).sum::<f64>() / z.len() as f64).sqrt();
    assert!((0.8..1.2).contains(&sd), "z spread {sd}");
    // 121 pixels: a 4.5 sigma excursion has a chance below 1e-3
    assert!(z.iter().all(|v| v.abs() < 4.5));
}

#[test]
fn lossy_triggered_counts_are_sub_poissonian() {
    let (_, beam, _, _) = setup(F0);
    let d = Detector::new(&beam, &DetectionGeometry::transmission(1.0)).unwrap();
    let img = raster_scan(&d, &Scatterer::none(), &ScanGrid::square(40, 60.0)).unwrap();
    let eta = 0.3;
    let frame = count_image(&img, 10.0, CountSource::Triggered, eta, 1.0e5, 11).unwrap();
    let samples: Vec<f64> = frame.counts.iter().map(|&c| c as f64).collect();
    let f = plasmon_focus::photon::fano_factor(&samples).unwrap();
    // 1600 pixels: standard error of F is about 0.035 * 0.7
    assert!((f - (1.0 - eta)).abs() < 0.08, "{f}");
}

#[test]
fn two_emitters_halve_the_antibunching_dip() {
    let m = EmitterModel::default();
    let a = simulate_stream(&m, 4.0e6, 1.0, 21).unwrap();
    let b = simulate_stream(&m, 4.0e6, 1.0, 22).unwrap();
    let h = g2_estimate(&a.merge(&b), 1.0, 20.0).unwrap();
    let z = h.zero_bin();
    // bin-averaged 0.5 + 0.5 * g2_single(0) with g2_single(0) ~ 0.05
    assert!((h.g2[z] - 0.525).abs() < 0.05, "{}", h.g2[z]);
}

#[test]
fn cw_rate_matches_the_renewal_mean() {
    let m = EmitterModel { pump_rate_per_ns: 0.05, ..EmitterModel::default() };
    let s = simulate_stream(&m, 2.0e6, 1.0, 5).unwrap();
    let rel = s.rate_per_ns() / m.cw_emission_rate() - 1.0;
    assert!(rel.abs() < 0.02, "{rel}");
}
