use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::check_probability;
use crate::error::{Error, Result};
use crate::imaging::{ScanGrid, ScanImage};

/// Photon-number statistics of the illumination during one dwell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountSource {
    /// Coherent light: Poissonian photon number.
    Poisson,
    /// Triggered single photons: a fixed number per dwell.
    Triggered,
}

/// Largest mean photon number per pixel accepted by [`count_image`].
const MAX_PHOTONS_PER_PIXEL: f64 = 1e15;

/// Photon counts recorded while scanning with a stochastic source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountImage {
    pub grid: ScanGrid,
    /// Row-major, `counts[j * nx + i]`.
    pub counts: Vec<u64>,
    pub dwell_ms: f64,
    /// Source photons per pixel before losses.
    pub photons_per_pixel: f64,
    pub loss: f64,
    pub source: CountSource,
    pub seed: u64,
    #[serde(skip)]
    pub expected: Option<ScanImage>,
}

impl CountImage {
    pub fn at(&self, i: usize, j: usize) -> u64 {
        self.counts[j * self.grid.nx + i]
    }

    /// Mean count of pixel `idx` implied by the noiseless image.
    pub fn expected_mean(&self, idx: usize) -> Option<f64> {
        self.expected
            .as_ref()
            .map(|e| self.photons_per_pixel * self.loss * e.pixels[idx])
    }
}

fn pixel_rng(seed: u64, idx: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(idx as u64);
    rng
}

fn sample_counts(source: CountSource, photons: f64, p: f64, rng: &mut ChaCha8Rng) -> Result<u64> {
    match source {
        CountSource::Poisson => {
            let mean = photons * p;
            if mean == 0.0 {
                return Ok(0);
            }
            let d = Poisson::new(mean).map_err(|e| Error::Numerical(format!("poisson mean {mean}: {e}")))?;
            Ok(d.sample(rng) as u64)
        }
        CountSource::Triggered => {
            if p > 1.0 {
                return Err(Error::domain(format!(
                    "detection probability {p:.6} exceeds 1; triggered counts need signal * loss <= 1"
                )));
            }
            let d = Binomial::new(photons as u64, p).map_err(|e| Error::Numerical(e.to_string()))?;
            Ok(d.sample(rng))
        }
    }
}

/// Draws one photon-count frame from a noiseless scan.
///
/// Each pixel receives `rate · dwell` source photons (rounded for triggered
/// sources), and each is detected with probability `loss · signal`. Pixel
/// `idx` uses its own ChaCha stream derived from `(seed, idx)`.
pub fn count_image(
    expected: &ScanImage,
    dwell_ms: f64,
    source: CountSource,
    loss: f64,
    rate_per_s: f64,
    seed: u64,
) -> Result<CountImage> {
    check_probability(loss, "loss transmission")?;
    if !(dwell_ms > 0.0 && rate_per_s >= 0.0) {
        return Err(Error::domain("dwell must be positive and rate non-negative"));
    }
    let mut photons = rate_per_s * dwell_ms * 1e-3;
    if !(photons.is_finite() && photons <= MAX_PHOTONS_PER_PIXEL) {
        return Err(Error::domain(format!(
            "rate x dwell = {photons:e} photons per pixel exceeds the supported {MAX_PHOTONS_PER_PIXEL:e}"
        )));
    }
    if source == CountSource::Triggered {
        photons = photons.round();
    }
    if let Some(bad) = expected.pixels.iter().find(|p| !(**p >= 0.0)) {
        return Err(Error::domain(format!("expected image has a negative or NaN pixel {bad}")));
    }
    let counts = expected
        .pixels
        .par_iter()
        .enumerate()
        .map(|(idx, &signal)| sample_counts(source, photons, loss * signal, &mut pixel_rng(seed, idx)))
        .collect::<Result<Vec<u64>>>()?;
    Ok(CountImage {
        grid: expected.grid,
        counts,
        dwell_ms,
        photons_per_pixel: photons,
        loss,
        source,
        seed,
        expected: Some(expected.clone()),
    })
}

/// Per-pixel mean and Fano factor over repeated frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameStack {
    pub frames: Vec<CountImage>,
    pub mean: Vec<f64>,
    pub fano: Vec<f64>,
}

/// Records `n` frames with seeds derived from `seed` and averages them.
pub fn count_frames(
    expected: &ScanImage,
    dwell_ms: f64,
    source: CountSource,
    loss: f64,
    rate_per_s: f64,
    n: usize,
    seed: u64,
) -> Result<FrameStack> {
    if n < 2 {
        return Err(Error::domain("frame averaging needs at least two frames"));
    }
    let frames = (0..n)
        .map(|f| {
            let s = seed.wrapping_add((f as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            count_image(expected, dwell_ms, source, loss, rate_per_s, s)
        })
        .collect::<Result<Vec<_>>>()?;
    let npix = expected.pixels.len();
    let mut mean = Vec::with_capacity(npix);
    let mut fano = Vec::with_capacity(npix);
    for idx in 0..npix {
        let samples: Vec<f64> = frames.iter().map(|f| f.counts[idx] as f64).collect();
        let m = samples.iter().sum::<f64>() / n as f64;
        mean.push(m);
        fano.push(fano_factor(&samples).unwrap_or(f64::NAN));
    }
    Ok(FrameStack { frames, mean, fano })
}

/// Binomial thinning of a photon number by transmission `eta`.
pub fn apply_count_loss(count: u64, eta: f64, rng: &mut impl rand::Rng) -> Result<u64> {
    check_probability(eta, "loss transmission")?;
    Ok(Binomial::new(count, eta).expect("checked probability").sample(rng))
}

/// Variance over mean, with the unbiased sample variance.
pub fn fano_factor(samples: &[f64]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::domain("fano factor needs at least two samples"));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return Err(Error::domain("fano factor of zero-mean samples is undefined"));
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(var / mean)
}

/// Smallest relative signal change resolvable at `snr_target` with `n`
/// detected photons of Fano factor `fano`: `snr · √(F/N)`.
pub fn min_detectable_contrast(n_detected: f64, fano: f64, snr_target: f64) -> Result<f64> {
    if !(n_detected > 0.0) {
        return Err(Error::domain("detected photon number must be positive"));
    }
    if !(0.0..=1.0).contains(&fano) {
        return Err(Error::domain(format!("fano factor must lie in [0, 1], got {fano}")));
    }
    if !(snr_target > 0.0) {
        return Err(Error::domain("target SNR must be positive"));
    }
    Ok(snr_target * (fano / n_detected).sqrt())
}

/// Monte Carlo counterpart of [`min_detectable_contrast`].
///
/// Counts with mean `n_detected` and Fano factor `F` are drawn as a lossy
/// triggered source (`Binomial(N/(1-F), 1-F)`), or Poissonian for `F = 1`.
/// The reported contrast is `snr · sd / mean` of the simulated counts.
pub fn monte_carlo_min_contrast(
    n_detected: f64,
    fano: f64,
    snr_target: f64,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    min_detectable_contrast(n_detected, fano, snr_target)?;
    if trials < 2 {
        return Err(Error::domain("monte carlo needs at least two trials"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<f64> = if fano >= 1.0 {
        let d = Poisson::new(n_detected).map_err(|e| Error::Numerical(e.to_string()))?;
        (0..trials).map(|_| d.sample(&mut rng)).collect()
    } else {
        let eta = 1.0 - fano;
        let d = Binomial::new((n_detected / eta).round() as u64, eta).expect("valid probability");
        (0..trials).map(|_| d.sample(&mut rng) as f64).collect()
    };
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(snr_target * var.sqrt() / mean)
}
