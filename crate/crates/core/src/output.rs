//! CSV and JSON artifact writers.
//!
//! Floats are written with Rust's shortest round-trip formatting, so equal
//! inputs give byte-identical files. Nothing written here carries a timestamp.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::Result;
use crate::focus::IntensityMap;
use crate::imaging::{Calibration, ScanImage};
use crate::materials::{CrossSections, SILVER_JC_LABEL};
use crate::photon::{G2Histogram, PhotonStream};

/// Everything needed to rerun a command bit-for-bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub tool_version: String,
    pub dataset: String,
    pub seed: u64,
    /// Fill factor actually used, after calibration if one ran.
    pub fill_factor: f64,
    pub calibration: Option<Calibration>,
    pub config: RunConfig,
}

impl Manifest {
    pub fn new(command: &str, config: &RunConfig, fill_factor: f64, calibration: Option<Calibration>) -> Self {
        Self {
            command: command.into(),
            tool_version: crate::TOOL_VERSION.into(),
            dataset: SILVER_JC_LABEL.into(),
            seed: config.seed,
            fill_factor,
            calibration,
            config: config.clone(),
        }
    }
}

/// Output directory with the writers used by the commands.
#[derive(Debug, Clone)]
pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    pub fn create(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(Self { root })
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    pub fn file(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn json<T: Serialize + ?Sized>(&self, name: &str, value: &T) -> Result<PathBuf> {
        let path = self.file(name);
        let mut text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
        text.push('\n');
        fs::write(&path, text)?;
        Ok(path)
    }

    pub fn manifest(&self, manifest: &Manifest) -> Result<PathBuf> {
        self.json("manifest.json", manifest)
    }

    /// Numeric table with a header row.
    pub fn csv<I, R>(&self, name: &str, header: &[&str], rows: I) -> Result<PathBuf>
    where
        I: IntoIterator<Item = R>,
        R: AsRef<[f64]>,
    {
        let path = self.file(name);
        let mut w = BufWriter::new(fs::File::create(&path)?);
        writeln!(w, "{}", header.join(","))?;
        for row in rows {
            let mut first = true;
            for v in row.as_ref() {
                if !first {
                    w.write_all(b",")?;
                }
                write!(w, "{v}")?;
                first = false;
            }
            w.write_all(b"\n")?;
        }
        w.flush()?;
        Ok(path)
    }

    /// Long- and short-axis cross sections on a shared wavelength column.
    pub fn spectrum(&self, name: &str, long: &[CrossSections], short: &[CrossSections]) -> Result<PathBuf> {
        self.csv(
            name,
            &["wavelength_nm", "ext_long", "sca_long", "abs_long", "ext_short", "sca_short", "abs_short"],
            long.iter()
                .zip(short)
                .map(|(l, s)| [l.wavelength_nm, l.ext, l.sca, l.abs, s.ext, s.sca, s.abs]),
        )
    }

    /// Two-column cross section of a single quantity.
    pub fn two_column(&self, name: &str, header: [&str; 2], rows: &[(f64, f64)]) -> Result<PathBuf> {
        self.csv(name, &header, rows.iter().map(|&(a, b)| [a, b]))
    }

    pub fn intensity_map(&self, name: &str, map: &IntensityMap) -> Result<PathBuf> {
        let g = map.grid;
        self.csv(
            name,
            &["x_nm", "y_nm", "intensity"],
            (0..g.len()).map(|idx| [g.x(idx % g.nx), g.y(idx / g.nx), map.values[idx]]),
        )
    }

    /// Pixels together with their interference decomposition.
    pub fn scan_image(&self, name: &str, image: &ScanImage) -> Result<PathBuf> {
        let g = image.grid;
        self.csv(
            name,
            &["x_nm", "y_nm", "signal", "ref_term", "sca_term", "interference_term", "phase_rad"],
            (0..g.len()).map(|idx| {
                let d = image.decomposition[idx];
                [
                    g.x(idx % g.nx),
                    g.y(idx / g.nx),
                    image.pixels[idx],
                    d.ref_term,
                    d.sca_term,
                    d.interference_term,
                    d.phase,
                ]
            }),
        )
    }

    /// `tau_ns,g2,sigma`, plus the theory curve when given.
    pub fn g2(&self, name: &str, h: &G2Histogram, theory: Option<&[f64]>) -> Result<PathBuf> {
        match theory {
            Some(t) => self.csv(
                name,
                &["tau_ns", "g2", "sigma", "theory"],
                (0..h.tau_ns.len()).map(|i| [h.tau_ns[i], h.g2[i], h.sigma[i], t[i]]),
            ),
            None => self.csv(
                name,
                &["tau_ns", "g2", "sigma"],
                (0..h.tau_ns.len()).map(|i| [h.tau_ns[i], h.g2[i], h.sigma[i]]),
            ),
        }
    }

    /// Timestamps as CSV and the remaining stream fields as a JSON header.
    pub fn stream(&self, stem: &str, s: &PhotonStream) -> Result<PathBuf> {
        #[derive(Serialize)]
        struct Header<'a> {
            events: usize,
            duration_ns: f64,
            source: &'a str,
            seed: u64,
        }
        self.json(
            &format!("{stem}.json"),
            &Header { events: s.len(), duration_ns: s.duration_ns, source: &s.source, seed: s.seed },
        )?;
        self.csv(&format!("{stem}.csv"), &["t_ns"], s.timestamps.iter().map(|t| [*t]))
    }
}
