//! Command-line surface: subcommands bound to a [`RunConfig`].

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::focus::{focal_intensity_map, spot_fwhm, BeamParams, MapAxis};
use crate::imaging::{
    calibrate_fill_factor, conversion_efficiency, finite_size_correction, image_contrast, image_fwhm,
    raster_scan_with, scan_line_with, Broadband, Calibration, Channel, ConversionEfficiency, DetectionGeometry,
    ScanImage,
};
use crate::materials::{
    plasmon_spectrum, spectral_fwhm, spectral_peak, PolarizationAxis, Quantity,
};
use crate::oracles::verification_reports;
use crate::output::{Manifest, OutputDir};
use crate::photon::{
    count_frames, g2_estimate, g2_theory, min_detectable_contrast, poisson_stream, simulate_stream, CountSource,
    EmissionMode, G2Histogram,
};
use crate::quadrature::GaussLegendre;

/// Half length of the fine line scans used for contrast and width (nm).
const LINE_HALF_SPAN_NM: f64 = 1500.0;
const LINE_STEP_NM: f64 = 2.5;

#[derive(Debug, Parser)]
#[command(name = "plasmon-focus", version, about = "Focused-beam plasmon imaging and photon statistics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,
    /// TOML run configuration.
    #[arg(long, global = true, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Bundled configuration: fig2b, fig3, fig4 or g2.
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Overrides the configured output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Print the resolved configuration as TOML and exit.
    #[arg(long, global = true)]
    pub print_defaults: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Cross-section spectra of the particle.
    Spectrum,
    /// Focal intensity map and spot widths.
    Focus,
    /// Noiseless transmission and reflection scans.
    Scan,
    /// Photon-count frames of the transmission scan.
    ScanPhoton,
    /// Emitter photon stream and intensity correlation.
    G2,
    /// Oracle comparisons as JSON lines.
    #[command(hide = true)]
    Verify,
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let mut cfg = match (&cli.config, &cli.preset) {
        (Some(path), _) => RunConfig::from_file(path)?,
        (None, Some(name)) => RunConfig::preset(name)?,
        (None, None) => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.to_string_lossy().into_owned();
    }
    if cli.print_defaults {
        print!("{}", cfg.to_toml());
        return Ok(());
    }
    let command = cli
        .command
        .ok_or_else(|| Error::Config("no subcommand given; see --help".into()))?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::Numerical(format!("thread pool: {e}")))?;
    pool.install(|| match command {
        Command::Spectrum => cmd_spectrum(&cfg),
        Command::Focus => cmd_focus(&cfg),
        Command::Scan => cmd_scan(&cfg).map(|_| ()),
        Command::ScanPhoton => cmd_scan_photon(&cfg),
        Command::G2 => cmd_g2(&cfg),
        Command::Verify => cmd_verify(),
    })
}

#[derive(Debug, Serialize)]
struct SpectrumSummary {
    axis: PolarizationAxis,
    peak_sca_nm: Option<f64>,
    peak_sca_nm2: Option<f64>,
    fwhm_sca_nm: Option<f64>,
    peak_ext_nm: Option<f64>,
    fwhm_ext_nm: Option<f64>,
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<()> {
    let particle = cfg.particle.build()?;
    let range = cfg.sweep.range();
    let long = plasmon_spectrum(&particle, &cfg.host, &range, PolarizationAxis::Long)?;
    let short = plasmon_spectrum(&particle, &cfg.host, &range, PolarizationAxis::Short)?;
    let out = OutputDir::create(&cfg.output_dir)?;
    out.spectrum("spectrum.csv", &long, &short)?;
    let s = match cfg.sweep.axis {
        PolarizationAxis::Long => &long,
        PolarizationAxis::Short => &short,
    };
    let peak = spectral_peak(s, Quantity::Scattering);
    out.json(
        "spectrum.json",
        &SpectrumSummary {
            axis: cfg.sweep.axis,
            peak_sca_nm: peak.map(|p| p.0),
            peak_sca_nm2: peak.map(|p| p.1),
            fwhm_sca_nm: spectral_fwhm(s, Quantity::Scattering),
            peak_ext_nm: spectral_peak(s, Quantity::Extinction).map(|p| p.0),
            fwhm_ext_nm: spectral_fwhm(s, Quantity::Extinction),
        },
    )?;
    out.manifest(&Manifest::new("spectrum", cfg, cfg.beam.fill_factor, None))?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct FocusSummary {
    fwhm_x_nm: f64,
    fwhm_y_nm: f64,
    /// FWHM along the polarization over FWHM across it.
    ellipticity: f64,
    peak_intensity: f64,
}

pub fn cmd_focus(cfg: &RunConfig) -> Result<()> {
    let (_, map) = focal_intensity_map(&cfg.beam, &cfg.host, &cfg.grid)?;
    let (fx, fy) = (spot_fwhm(&map, MapAxis::X)?, spot_fwhm(&map, MapAxis::Y)?);
    let pol = cfg.beam.polarization_unit();
    let (par, perp) = if pol[0].abs() >= pol[1].abs() { (fx, fy) } else { (fy, fx) };
    let out = OutputDir::create(&cfg.output_dir)?;
    out.intensity_map("focal_map.csv", &map)?;
    out.json(
        "focus.json",
        &FocusSummary {
            fwhm_x_nm: fx,
            fwhm_y_nm: fy,
            ellipticity: par / perp,
            peak_intensity: map.values.iter().cloned().fold(0.0, f64::max),
        },
    )?;
    out.manifest(&Manifest::new("focus", cfg, cfg.beam.fill_factor, None))?;
    Ok(())
}

/// Contrast and widths of one channel.
#[derive(Debug, Clone, Serialize)]
pub struct ChannelReport {
    pub channel: Channel,
    /// Peak response of the fine line scans (units of collected background).
    pub contrast: f64,
    pub fwhm_x_nm: f64,
    pub fwhm_y_nm: f64,
    /// Width across the polarization with the finite particle size folded in.
    pub fwhm_y_finite_nm: f64,
    pub size_correction_nm: f64,
    /// Same figures from the raster image; absent when its border has not
    /// reached the background or the peak is not resolved.
    pub image_contrast: Option<f64>,
    pub image_fwhm_x_nm: Option<f64>,
    pub image_fwhm_y_nm: Option<f64>,
}

/// Everything the `scan` command reports.
#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub fill_factor: f64,
    pub calibration: Option<Calibration>,
    pub transmission: ChannelReport,
    pub reflection: ChannelReport,
    /// Only for single-line illumination.
    pub conversion: Option<ConversionEfficiency>,
}

fn scan_beam(cfg: &RunConfig) -> Result<(BeamParams, Option<Calibration>)> {
    let particle = cfg.particle.build()?;
    let spectrum = cfg.spectrum()?;
    let Some(c) = cfg.calibration else {
        return Ok((cfg.beam, None));
    };
    let det = match c.channel {
        Channel::Transmission => cfg.transmission,
        Channel::Reflection => cfg.reflection,
    };
    let cal = calibrate_fill_factor(
        &cfg.beam,
        &cfg.host,
        &particle,
        &spectrum,
        &det,
        c.axis,
        c.target_fwhm_nm,
        c.bracket,
        c.tol_nm,
    )?;
    Ok((BeamParams { fill_factor: cal.fill_factor, ..cfg.beam }, Some(cal)))
}

type ChannelRun = (ChannelReport, ScanImage, Vec<(f64, f64)>);

fn channel_report(cfg: &RunConfig, beam: &BeamParams, det: &DetectionGeometry) -> Result<ChannelRun> {
    let particle = cfg.particle.build()?;
    let imager = Broadband::new(beam, &cfg.host, &particle, &cfg.spectrum()?, det)?;
    let lx = scan_line_with(&imager, MapAxis::X, LINE_HALF_SPAN_NM, LINE_STEP_NM)?;
    let ly = scan_line_with(&imager, MapAxis::Y, LINE_HALF_SPAN_NM, LINE_STEP_NM)?;
    let fwhm_y = ly.fwhm()?;
    let size = finite_size_correction(fwhm_y, particle.extent_along([0.0, 1.0]))?;
    let image = raster_scan_with(&imager, &cfg.grid)?;
    let report = ChannelReport {
        channel: det.channel,
        contrast: ly.contrast().max(lx.contrast()),
        fwhm_x_nm: lx.fwhm()?,
        fwhm_y_nm: fwhm_y,
        fwhm_y_finite_nm: size.corrected_nm,
        size_correction_nm: size.delta_nm,
        image_contrast: image_contrast(&image).ok(),
        image_fwhm_x_nm: image_fwhm(&image, MapAxis::X).ok(),
        image_fwhm_y_nm: image_fwhm(&image, MapAxis::Y).ok(),
    };
    let line: Vec<(f64, f64)> = ly.positions.iter().copied().zip(ly.signal.iter().copied()).collect();
    Ok((report, image, line))
}

/// Runs the `scan` command and returns its report.
pub fn cmd_scan(cfg: &RunConfig) -> Result<ScanReport> {
    let (beam, calibration) = scan_beam(cfg)?;
    let out = OutputDir::create(&cfg.output_dir)?;
    let (t, t_img, t_line) = channel_report(cfg, &beam, &cfg.transmission)?;
    let (r, r_img, r_line) = channel_report(cfg, &beam, &cfg.reflection)?;
    for (name, img, line) in [("transmission", &t_img, &t_line), ("reflection", &r_img, &r_line)] {
        out.scan_image(&format!("scan_{name}.csv"), img)?;
        out.two_column(&format!("profile_{name}_x.csv"), ["x_nm", "signal"], &img.cross_section(MapAxis::X))?;
        out.two_column(&format!("profile_{name}_y.csv"), ["y_nm", "signal"], &img.cross_section(MapAxis::Y))?;
        out.two_column(&format!("line_{name}_y.csv"), ["y_nm", "signal"], line)?;
    }
    let conversion = match cfg.source {
        Some(_) => None,
        None => {
            let particle = cfg.particle.build()?;
            let focused = crate::focus::FocusedBeam::new(&beam, &cfg.host)?;
            let alpha = crate::materials::polarizability(&particle, &cfg.host, beam.wavelength_nm)?;
            let sc = crate::imaging::Scatterer::new(&alpha, &particle);
            Some(conversion_efficiency(&focused, &sc, &cfg.transmission)?)
        }
    };
    let report = ScanReport { fill_factor: beam.fill_factor, calibration, transmission: t, reflection: r, conversion };
    out.json("scan.json", &report)?;
    out.manifest(&Manifest::new("scan", cfg, beam.fill_factor, calibration))?;
    Ok(report)
}

#[derive(Debug, Serialize)]
struct PhotonSummary {
    frames: usize,
    photons_per_pixel: f64,
    background_counts: f64,
    /// `1 - min(mean) / background` of the frame average.
    average_contrast: f64,
    mean_fano: f64,
    min_detectable_contrast: f64,
}

pub fn cmd_scan_photon(cfg: &RunConfig) -> Result<()> {
    let (beam, calibration) = scan_beam(cfg)?;
    let particle = cfg.particle.build()?;
    let imager = Broadband::new(&beam, &cfg.host, &particle, &cfg.spectrum()?, &cfg.transmission)?;
    let expected = raster_scan_with(&imager, &cfg.grid)?;
    let p = &cfg.photon;
    let stack = count_frames(&expected, p.dwell_ms, p.source, p.loss, p.rate_per_s, p.frames, cfg.seed)?;
    let g = cfg.grid;
    let out = OutputDir::create(&cfg.output_dir)?;
    let first = &stack.frames[0];
    out.csv(
        "counts_frame0.csv",
        &["x_nm", "y_nm", "counts", "expected"],
        (0..g.len()).map(|i| {
            [g.x(i % g.nx), g.y(i / g.nx), first.counts[i] as f64, first.expected_mean(i).unwrap_or(f64::NAN)]
        }),
    )?;
    out.csv(
        "counts_average.csv",
        &["x_nm", "y_nm", "mean", "fano"],
        (0..g.len()).map(|i| [g.x(i % g.nx), g.y(i / g.nx), stack.mean[i], stack.fano[i]]),
    )?;
    let background = first.photons_per_pixel * p.loss * expected.background;
    let min_mean = stack.mean.iter().cloned().fold(f64::INFINITY, f64::min);
    let finite: Vec<f64> = stack.fano.iter().copied().filter(|f| f.is_finite()).collect();
    let mean_fano = finite.iter().sum::<f64>() / finite.len().max(1) as f64;
    let fano_model = match p.source {
        CountSource::Poisson => 1.0,
        CountSource::Triggered => 1.0 - p.loss * expected.background,
    };
    out.json(
        "photon.json",
        &PhotonSummary {
            frames: p.frames,
            photons_per_pixel: first.photons_per_pixel,
            background_counts: background,
            average_contrast: 1.0 - min_mean / background,
            mean_fano,
            min_detectable_contrast: min_detectable_contrast(background, fano_model, 1.0)?,
        },
    )?;
    out.manifest(&Manifest::new("scan-photon", cfg, beam.fill_factor, calibration))?;
    Ok(())
}

/// `g2_theory` averaged over each histogram bin.
pub fn bin_averaged_theory(cfg: &RunConfig, h: &G2Histogram) -> Result<Vec<f64>> {
    let gl = GaussLegendre::new(16);
    h.tau_ns
        .iter()
        .map(|&tau| {
            let (a, b) = (tau - 0.5 * h.bin_width_ns, tau + 0.5 * h.bin_width_ns);
            let mut acc = 0.0;
            for (x, w) in gl.on_interval(a, b) {
                acc += w * g2_theory(&cfg.emitter, x)?;
            }
            Ok(acc / h.bin_width_ns)
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct G2Summary {
    events: usize,
    rate_per_ns: f64,
    g2_zero: f64,
    g2_zero_sigma: f64,
    theory_zero: Option<f64>,
    poisson_g2_zero: f64,
}

pub fn cmd_g2(cfg: &RunConfig) -> Result<()> {
    let p = &cfg.photon;
    let stream = simulate_stream(&cfg.emitter, p.stream_duration_ns, p.detection_efficiency, cfg.seed)?;
    let h = g2_estimate(&stream, p.bin_width_ns, p.max_tau_ns)?;
    let theory = match cfg.emitter.mode {
        EmissionMode::Cw => Some(bin_averaged_theory(cfg, &h)?),
        EmissionMode::Triggered => None,
    };
    let baseline = poisson_stream(stream.rate_per_ns().max(f64::MIN_POSITIVE), p.stream_duration_ns, cfg.seed ^ 0x5eed)?;
    let hp = g2_estimate(&baseline, p.bin_width_ns, p.max_tau_ns)?;
    let out = OutputDir::create(&cfg.output_dir)?;
    out.g2("g2.csv", &h, theory.as_deref())?;
    out.g2("g2_poisson.csv", &hp, None)?;
    if p.write_stream {
        out.stream("stream", &stream)?;
    }
    let z = h.zero_bin();
    out.json(
        "g2.json",
        &G2Summary {
            events: stream.len(),
            rate_per_ns: stream.rate_per_ns(),
            g2_zero: h.g2[z],
            g2_zero_sigma: h.sigma[z],
            theory_zero: theory.as_ref().map(|t| t[z]),
            poisson_g2_zero: hp.g2[hp.zero_bin()],
        },
    )?;
    out.manifest(&Manifest::new("g2", cfg, cfg.beam.fill_factor, None))?;
    Ok(())
}

fn cmd_verify() -> Result<()> {
    let reports = verification_reports()?;
    for r in &reports {
        println!("{}", r.to_json_line());
    }
    match reports.iter().filter(|r| !r.pass).count() {
        0 => Ok(()),
        n => Err(Error::Numerical(format!("{n} oracle comparison(s) failed"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_subcommand_and_bad_flags() {
        assert_eq!(main_with_args(["plasmon-focus"]), 2);
        assert_eq!(main_with_args(["plasmon-focus", "scan", "--bogus"]), 2);
        assert_eq!(main_with_args(["plasmon-focus", "--preset", "nope", "spectrum"]), 2);
        assert_eq!(main_with_args(["plasmon-focus", "--print-defaults"]), 0);
    }

    #[test]
    fn spectrum_writes_csv_and_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = RunConfig { output_dir: dir.path().to_string_lossy().into_owned(), ..RunConfig::default() };
        cfg.sweep.points = 41;
        cmd_spectrum(&cfg).unwrap();
        let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
        assert_eq!(csv.lines().count(), 42);
        assert!(dir.path().join("manifest.json").exists());
    }
}
