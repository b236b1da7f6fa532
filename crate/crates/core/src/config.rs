//! Run configuration: one TOML file per run, every field defaulted.
//!
//! Parse and validation failures carry the line of the offending key.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::focus::{BeamParams, MapAxis, TransverseGrid};
use crate::imaging::{Channel, DetectionGeometry, SourceSpectrum};
use crate::materials::{HostMedium, PolarizationAxis, SpheroidParticle, WavelengthRange};
use crate::photon::{CountSource, EmitterModel};

/// Schema version written into and required from every config.
pub const SCHEMA_VERSION: u32 = 1;

/// Bundled configurations, one per reproduced figure.
pub const PRESETS: &[(&str, &str)] = &[
    ("fig2b", include_str!("../configs/fig2b.toml")),
    ("fig3", include_str!("../configs/fig3.toml")),
    ("fig4", include_str!("../configs/fig4.toml")),
    ("g2", include_str!("../configs/g2.toml")),
];

/// Silver prolate spheroid given by its full axis lengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleConfig {
    pub long_diameter_nm: f64,
    pub short_diameter_nm: f64,
    /// In-plane direction of the long axis.
    pub orientation: [f64; 2],
}

impl Default for ParticleConfig {
    fn default() -> Self {
        Self { long_diameter_nm: 94.0, short_diameter_nm: 46.0, orientation: [1.0, 0.0] }
    }
}

impl ParticleConfig {
    pub fn build(&self) -> Result<SpheroidParticle> {
        SpheroidParticle::silver_from_diameters(self.long_diameter_nm, self.short_diameter_nm, self.orientation)
    }
}

/// Wavelength sweep of the `spectrum` command.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub start_nm: f64,
    pub end_nm: f64,
    pub points: usize,
    /// Axis whose peak and width are summarized; both axes are written.
    pub axis: PolarizationAxis,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { start_nm: 400.0, end_nm: 800.0, points: 401, axis: PolarizationAxis::Long }
    }
}

impl SweepConfig {
    pub fn range(&self) -> WavelengthRange {
        WavelengthRange::new(self.start_nm, self.end_nm, self.points)
    }
}

/// Illumination spectrum for broadband scans.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SourceConfig {
    Gaussian { center_nm: f64, fwhm_nm: f64, points: usize },
    Lines { lines: Vec<(f64, f64)> },
}

impl SourceConfig {
    pub fn build(&self) -> Result<SourceSpectrum> {
        match self {
            SourceConfig::Gaussian { center_nm, fwhm_nm, points } => {
                SourceSpectrum::gaussian(*center_nm, *fwhm_nm, *points)
            }
            SourceConfig::Lines { lines } => SourceSpectrum::new(lines.clone()),
        }
    }
}

/// Fill-factor calibration against a target image width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationConfig {
    pub channel: Channel,
    pub axis: MapAxis,
    pub target_fwhm_nm: f64,
    #[serde(default = "default_bracket")]
    pub bracket: (f64, f64),
    #[serde(default = "default_tol")]
    pub tol_nm: f64,
}

fn default_bracket() -> (f64, f64) {
    (0.3, 1.2)
}

fn default_tol() -> f64 {
    0.25
}

/// Photon-counting and correlation settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhotonConfig {
    pub source: CountSource,
    pub dwell_ms: f64,
    /// Source photons per second reaching the sample.
    pub rate_per_s: f64,
    /// End-to-end transmission from sample to counts.
    pub loss: f64,
    pub frames: usize,
    pub stream_duration_ns: f64,
    pub detection_efficiency: f64,
    pub bin_width_ns: f64,
    pub max_tau_ns: f64,
    /// Also write every timestamp of the simulated stream.
    pub write_stream: bool,
}

impl Default for PhotonConfig {
    fn default() -> Self {
        Self {
            source: CountSource::Poisson,
            dwell_ms: 40.0,
            rate_per_s: 1.0e5,
            loss: 0.5,
            frames: 12,
            stream_duration_ns: 1.0e7,
            detection_efficiency: 1.0,
            bin_width_ns: 1.0,
            max_tau_ns: 30.0,
            write_stream: false,
        }
    }
}

/// Everything a command needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub schema_version: u32,
    pub label: String,
    pub seed: u64,
    pub output_dir: String,
    pub beam: BeamParams,
    pub host: HostMedium,
    pub particle: ParticleConfig,
    pub transmission: DetectionGeometry,
    pub reflection: DetectionGeometry,
    pub emitter: EmitterModel,
    pub grid: TransverseGrid,
    pub sweep: SweepConfig,
    /// Broadband illumination; the beam wavelength is used when absent.
    pub source: Option<SourceConfig>,
    pub calibration: Option<CalibrationConfig>,
    pub photon: PhotonConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            label: "default".into(),
            seed: 589,
            output_dir: "out".into(),
            beam: BeamParams::default(),
            host: HostMedium::index_matched_oil(),
            particle: ParticleConfig::default(),
            transmission: DetectionGeometry::transmission(1.0),
            reflection: DetectionGeometry::reflection(1.4),
            emitter: EmitterModel::default(),
            grid: TransverseGrid::square(64, 25.0),
            sweep: SweepConfig::default(),
            source: None,
            calibration: None,
            photon: PhotonConfig::default(),
        }
    }
}

impl RunConfig {
    /// Parses and validates a TOML document.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim_end().into()))?;
        cfg.validate().map_err(|(path, msg)| {
            let at = locate(text, &path).map_or(String::new(), |l| format!("line {l}: "));
            Error::Config(format!("{at}{path}: {msg}"))
        })?;
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn preset(name: &str) -> Result<Self> {
        let (_, text) = PRESETS.iter().find(|(n, _)| *n == name).ok_or_else(|| {
            let names: Vec<&str> = PRESETS.iter().map(|p| p.0).collect();
            Error::Config(format!("unknown preset {name:?}; available: {}", names.join(", ")))
        })?;
        Self::from_toml_str(text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Source spectrum of scans: the configured band or a single line at the
    /// beam wavelength.
    pub fn spectrum(&self) -> Result<SourceSpectrum> {
        match &self.source {
            Some(s) => s.build(),
            None => Ok(SourceSpectrum::delta(self.beam.wavelength_nm)),
        }
    }

    /// Checks every section and returns the dotted key path of the first
    /// offending value.
    pub fn validate(&self) -> std::result::Result<(), (String, String)> {
        if self.schema_version != SCHEMA_VERSION {
            return Err((
                "schema_version".into(),
                format!("unsupported schema version {} (expected {SCHEMA_VERSION})", self.schema_version),
            ));
        }
        HostMedium::new(self.host.refractive_index).map_err(at("host.refractive_index"))?;
        self.beam.validate(&self.host).map_err(at("beam"))?;
        self.particle.build().map_err(at("particle"))?;
        self.transmission.half_angle(self.host.refractive_index).map_err(at("transmission"))?;
        if self.transmission.channel != Channel::Transmission {
            return Err(("transmission.channel".into(), "must be \"transmission\"".into()));
        }
        self.reflection.half_angle(self.host.refractive_index).map_err(at("reflection"))?;
        if self.reflection.channel != Channel::Reflection {
            return Err(("reflection.channel".into(), "must be \"reflection\"".into()));
        }
        self.emitter.validate().map_err(at("emitter"))?;
        self.grid.validate().map_err(at("grid"))?;
        self.sweep.range().wavelengths().map_err(at("sweep"))?;
        if let Some(s) = &self.source {
            s.build().map_err(at("source"))?;
        }
        if let Some(c) = &self.calibration {
            if !(c.target_fwhm_nm > 0.0 && c.bracket.0 > 0.0 && c.bracket.1 > c.bracket.0 && c.tol_nm > 0.0) {
                return Err((
                    "calibration".into(),
                    "needs target_fwhm_nm > 0, 0 < bracket[0] < bracket[1] and tol_nm > 0".into(),
                ));
            }
        }
        let p = &self.photon;
        if !(0.0..=1.0).contains(&p.loss) {
            return Err(("photon.loss".into(), format!("must lie in [0, 1], got {}", p.loss)));
        }
        if !(0.0..=1.0).contains(&p.detection_efficiency) {
            return Err(("photon.detection_efficiency".into(), "must lie in [0, 1]".into()));
        }
        if !(p.dwell_ms > 0.0 && p.rate_per_s >= 0.0) {
            return Err(("photon.dwell_ms".into(), "dwell must be positive and rate non-negative".into()));
        }
        if p.frames < 2 {
            return Err(("photon.frames".into(), "frame averaging needs at least two frames".into()));
        }
        if !(p.bin_width_ns > 0.0 && p.max_tau_ns >= p.bin_width_ns && p.stream_duration_ns > p.max_tau_ns) {
            return Err((
                "photon.bin_width_ns".into(),
                "needs 0 < bin_width_ns <= max_tau_ns < stream_duration_ns".into(),
            ));
        }
        Ok(())
    }
}

fn at(path: &'static str) -> impl Fn(Error) -> (String, String) {
    move |e| (path.to_string(), strip(e))
}

fn strip(e: Error) -> String {
    match e {
        Error::Domain(m) | Error::Config(m) => m,
        other => other.to_string(),
    }
}

/// 1-based line of a dotted key path such as `sweep.points` or `beam`.
fn locate(text: &str, path: &str) -> Option<usize> {
    let mut parts = path.split('.');
    let first = parts.next()?;
    let key = parts.next_back();
    let mut in_table = false;
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.starts_with('[') {
            let name = t.trim_matches(|c| c == '[' || c == ']').trim();
            in_table = name == first;
            if in_table && key.is_none() {
                return Some(i + 1);
            }
            continue;
        }
        let lhs = t.split('=').next().map(str::trim);
        let wanted = match key {
            Some(k) if in_table => k,
            None if !in_table => first,
            _ => continue,
        };
        if t.contains('=') && lhs == Some(wanted) {
            return Some(i + 1);
        }
    }
    // fall back to the section header for whole-table errors
    key.and_then(|_| locate(text, first))
}
