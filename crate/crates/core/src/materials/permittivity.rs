//! Tabulated dielectric functions and the host medium.

use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SILVER_JC_CSV: &str = include_str!("../../data/silver_johnson_christy.csv");

/// Label emitted in every output that depends on the embedded silver data.
pub const SILVER_JC_LABEL: &str = "silver/johnson-christy-1972/v1";

const CSV_HEADER: &str = "wavelength_nm,eps_re,eps_im";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PermittivityEntry {
    pub wavelength_nm: f64,
    pub eps_re: f64,
    pub eps_im: f64,
}

/// Complex permittivity sampled on a strictly increasing wavelength grid,
/// linearly interpolated in wavelength.
#[derive(Debug, Clone, PartialEq)]
pub struct PermittivityTable {
    label: String,
    entries: Vec<PermittivityEntry>,
}

impl PermittivityTable {
    pub fn new(label: impl Into<String>, entries: Vec<PermittivityEntry>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::Table("need at least two entries".into()));
        }
        for (i, e) in entries.iter().enumerate() {
            if !(e.wavelength_nm.is_finite() && e.eps_re.is_finite() && e.eps_im.is_finite()) {
                return Err(Error::Table(format!("non-finite value in row {}", i + 1)));
            }
            if e.eps_im < 0.0 {
                return Err(Error::Table(format!(
                    "negative eps_im {} at {} nm",
                    e.eps_im, e.wavelength_nm
                )));
            }
        }
        if let Some(w) = entries
            .windows(2)
            .find(|w| w[1].wavelength_nm <= w[0].wavelength_nm)
        {
            return Err(Error::Table(format!(
                "wavelengths not strictly increasing at {} nm",
                w[1].wavelength_nm
            )));
        }
        Ok(Self {
            label: label.into(),
            entries,
        })
    }

    /// Parses the `wavelength_nm,eps_re,eps_im` CSV resource format.
    pub fn from_csv(label: impl Into<String>, text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, h)) if h.trim() == CSV_HEADER => {}
            Some((n, h)) => {
                return Err(Error::Table(format!(
                    "line {}: expected header `{CSV_HEADER}`, found `{}`",
                    n + 1,
                    h.trim()
                )))
            }
            None => return Err(Error::Table("empty file".into())),
        }
        let mut entries = Vec::new();
        for (n, line) in lines {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(Error::Table(format!(
                    "line {}: expected 3 fields, found {}",
                    n + 1,
                    fields.len()
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::Table(format!("line {}: `{s}`: {e}", n + 1)))
            };
            entries.push(PermittivityEntry {
                wavelength_nm: parse(fields[0])?,
                eps_re: parse(fields[1])?,
                eps_im: parse(fields[2])?,
            });
        }
        Self::new(label, entries)
    }

    /// The embedded silver dataset (Johnson & Christy optical constants).
    pub fn silver() -> Arc<Self> {
        static SILVER: OnceLock<Arc<PermittivityTable>> = OnceLock::new();
        SILVER
            .get_or_init(|| {
                Arc::new(
                    Self::from_csv(SILVER_JC_LABEL, SILVER_JC_CSV)
                        .expect("embedded silver table is valid"),
                )
            })
            .clone()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn entries(&self) -> &[PermittivityEntry] {
        &self.entries
    }

    /// Valid wavelength interval in nm.
    pub fn range(&self) -> (f64, f64) {
        (
            self.entries[0].wavelength_nm,
            self.entries[self.entries.len() - 1].wavelength_nm,
        )
    }

    pub fn contains(&self, wavelength_nm: f64) -> bool {
        let (lo, hi) = self.range();
        wavelength_nm >= lo && wavelength_nm <= hi
    }

    /// Interpolated permittivity at `wavelength_nm`.
    pub fn permittivity(&self, wavelength_nm: f64) -> Result<Complex64> {
        let (lo, hi) = self.range();
        if !(wavelength_nm >= lo && wavelength_nm <= hi) {
            return Err(Error::WavelengthOutOfRange {
                wavelength_nm,
                min_nm: lo,
                max_nm: hi,
            });
        }
        let idx = self
            .entries
            .partition_point(|e| e.wavelength_nm <= wavelength_nm);
        if idx == self.entries.len() {
            let e = &self.entries[idx - 1];
            return Ok(Complex64::new(e.eps_re, e.eps_im));
        }
        let e0 = &self.entries[idx - 1];
        if e0.wavelength_nm == wavelength_nm {
            return Ok(Complex64::new(e0.eps_re, e0.eps_im));
        }
        let e1 = &self.entries[idx];
        let t = (wavelength_nm - e0.wavelength_nm) / (e1.wavelength_nm - e0.wavelength_nm);
        Ok(Complex64::new(
            e0.eps_re + t * (e1.eps_re - e0.eps_re),
            e0.eps_im + t * (e1.eps_im - e0.eps_im),
        ))
    }
}

/// Free function form of [`PermittivityTable::permittivity`].
pub fn silver_permittivity(table: &PermittivityTable, wavelength_nm: f64) -> Result<Complex64> {
    table.permittivity(wavelength_nm)
}

/// Lossless embedding medium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HostMedium {
    pub refractive_index: f64,
}

impl HostMedium {
    pub fn new(refractive_index: f64) -> Result<Self> {
        if !(refractive_index >= 1.0 && refractive_index.is_finite()) {
            return Err(Error::domain(format!(
                "host refractive index must be >= 1, got {refractive_index}"
            )));
        }
        Ok(Self { refractive_index })
    }

    /// Immersion oil matching a glass cover slide.
    pub fn index_matched_oil() -> Self {
        Self {
            refractive_index: 1.49,
        }
    }

    pub fn permittivity(&self) -> f64 {
        self.refractive_index * self.refractive_index
    }

    /// Wavenumber in the host (rad/nm) for a vacuum wavelength in nm.
    pub fn wavenumber(&self, vacuum_wavelength_nm: f64) -> f64 {
        2.0 * std::f64::consts::PI * self.refractive_index / vacuum_wavelength_nm
    }
}
