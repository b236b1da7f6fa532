#ifndef PLASMON_FOCUS_H
#define PLASMON_FOCUS_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every entry point.
 */
typedef enum PfStatus {
  PF_STATUS_OK = 0,
  PF_STATUS_NULL_POINTER = 1,
  PF_STATUS_DOMAIN = 2,
  PF_STATUS_NUMERICAL = 3,
  PF_STATUS_BUFFER_TOO_SMALL = 4,
  PF_STATUS_PANIC = 5,
} PfStatus;

/**
 * Focused-beam detector for one channel with its particle.
 */
typedef struct PfImager PfImager;

/**
 * Silver spheroid in a host medium.
 */
typedef struct PfParticle PfParticle;

/**
 * 0 = long axis, 1 = short axis.
 */
typedef uint32_t PfAxis;

typedef struct PfCrossSections {
  double wavelength_nm;
  double ext;
  double sca;
  double abs;
} PfCrossSections;

typedef struct PfBeam {
  double wavelength_nm;
  double na_focus;
  double fill_factor;
  double polarization_x;
  double polarization_y;
} PfBeam;

/**
 * 0 = transmission, 1 = reflection.
 */
typedef uint32_t PfChannel;

typedef struct PfSignal {
  double signal;
  double ref_term;
  double sca_term;
  double interference_term;
  double phase_rad;
} PfSignal;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread (empty after success).
 * Valid until the next call on the same thread.
 */
const char *pf_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *pf_version(void);

/**
 * Creates a silver spheroid from full axis lengths (nm).
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum PfStatus pf_particle_new(double long_diameter_nm,
                              double short_diameter_nm,
                              double orientation_x,
                              double orientation_y,
                              double host_index,
                              struct PfParticle **out);

/**
 * # Safety
 * `p` must come from [`pf_particle_new`] and not be used afterwards. Null is ignored.
 */
void pf_particle_free(struct PfParticle *p);

/**
 * Cross sections (nm²) for light polarized along one particle axis.
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum PfStatus pf_cross_sections(const struct PfParticle *p,
                                double wavelength_nm,
                                PfAxis polarization_axis,
                                struct PfCrossSections *out);

/**
 * Evenly spaced spectrum into `out[0..points]`.
 *
 * # Safety
 * `out` must hold at least `capacity` elements.
 */
enum PfStatus pf_spectrum(const struct PfParticle *p,
                          double start_nm,
                          double end_nm,
                          size_t points,
                          PfAxis polarization_axis,
                          struct PfCrossSections *out,
                          size_t capacity);

/**
 * Detector for `channel` with collection NA `na_collect`. The reflection
 * reference is a residual reflection of power fraction `residual_power`.
 *
 * # Safety
 * `p` and `beam` must be valid, `out` writable.
 */
enum PfStatus pf_imager_new(const struct PfParticle *p,
                            const struct PfBeam *beam,
                            PfChannel channel,
                            double na_collect,
                            double residual_power,
                            struct PfImager **out);

/**
 * # Safety
 * `d` must come from [`pf_imager_new`] and not be used afterwards. Null is ignored.
 */
void pf_imager_free(struct PfImager *d);

/**
 * Normalized detector signal with the particle at `(x, y, z)` nm.
 *
 * # Safety
 * `d` must be a live handle and `out` writable.
 */
enum PfStatus pf_imager_signal(const struct PfImager *d,
                               double x_nm,
                               double y_nm,
                               double z_nm,
                               struct PfSignal *out);

/**
 * No-particle signal level of the detector.
 *
 * # Safety
 * `d` must be a live handle and `out` writable.
 */
enum PfStatus pf_imager_background(const struct PfImager *d, double *out);

/**
 * Row-major `nx × ny` raster scan centred on the focus into `out`.
 *
 * # Safety
 * `out` must hold at least `capacity` doubles.
 */
enum PfStatus pf_raster_scan(const struct PfImager *d,
                             size_t nx,
                             size_t ny,
                             double pitch_nm,
                             double z_nm,
                             double *out,
                             size_t capacity);

/**
 * cw two-level `g2(τ)` for lifetime `τ₁` and pump rate `R` (per ns).
 *
 * # Safety
 * `out` must be writable.
 */
enum PfStatus pf_g2_theory(double lifetime_ns, double pump_rate_per_ns, double tau_ns, double *out);

/**
 * Image width after folding in the particle extent.
 *
 * # Safety
 * `out_corrected_nm` must be writable.
 */
enum PfStatus pf_finite_size_correction(double fwhm_point_dipole_nm,
                                        double particle_extent_nm,
                                        double *out_corrected_nm);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PLASMON_FOCUS_H */
