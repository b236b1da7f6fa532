//! Silver permittivity, spheroid polarizability and cross-section spectra.

pub mod permittivity;
pub mod spectrum;
pub mod spheroid;

pub use permittivity::{
    silver_permittivity, HostMedium, PermittivityEntry, PermittivityTable, SILVER_JC_LABEL,
};
pub use spectrum::{
    cross_sections, cross_sections_of, plasmon_spectrum, spectral_fwhm, spectral_peak,
    CrossSections, Quantity, WavelengthRange,
};
pub use spheroid::{
    corrected_axis, corrected_polarizability, depolarization_factors, polarizability, quasistatic_polarizability,
    quasistatic_from_permittivity, PolarizationAxis, PolarizabilityTensor, SpheroidParticle, DYNAMIC_DEPOLARIZATION_WEIGHT,
};
