//! Physical-optics simulation of a tightly focused beam driving a dipolar
//! silver nanoparticle.
//!
//! The crate is organised bottom-up:
//!
//! * [`materials`]: tabulated silver permittivity, spheroid depolarization,
//!   corrected dipole polarizability and cross-section spectra.
//! * [`focus`]: vectorial focal fields of an aplanatic high-NA objective.
//! * [`imaging`]: interferometric detector signals, raster scans, contrast and
//!   width extraction, conversion efficiency and broadband averaging.
//! * [`photon`]: single-emitter photon streams, g2 histograms, photon-count
//!   images and sub-shot-noise detectability.
//! * [`oracles`]: slow independent references used for verification.
//! * [`config`], [`output`] and [`cli`]: run configuration, artifact writers and
//!   the commands behind the `plasmon-focus` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod focus;
pub mod imaging;
pub mod materials;
pub mod oracles;
pub mod output;
pub mod photon;
pub mod quadrature;

pub use error::{Error, Result};
pub use nalgebra;
pub use num_complex::Complex64;

/// Version string recorded in every run manifest.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
