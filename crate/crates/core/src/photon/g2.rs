use serde::{Deserialize, Serialize};

use super::{EmissionMode, EmitterModel, PhotonStream};
use crate::error::{Error, Result};

/// cw two-level correlation `1 - exp(-(R + 1/τ₁)|τ|)`.
pub fn g2_theory(model: &EmitterModel, tau_ns: f64) -> Result<f64> {
    model.validate()?;
    if model.mode != EmissionMode::Cw {
        return Err(Error::UnsupportedMode(
            "triggered g2 has no closed form; estimate it from a simulated stream".into(),
        ));
    }
    Ok(-(-model.recovery_rate() * tau_ns.abs()).exp_m1())
}

/// Normalized coincidence histogram with bins centred on `k · bin_width`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct G2Histogram {
    pub bin_width_ns: f64,
    pub tau_ns: Vec<f64>,
    pub g2: Vec<f64>,
    /// Poisson error of each bin from its raw count (at least one count).
    pub sigma: Vec<f64>,
    pub counts: Vec<u64>,
    /// Coincidences expected per bin for uncorrelated light at the same rate.
    pub expected_uncorrelated: Vec<f64>,
}

impl G2Histogram {
    pub fn zero_bin(&self) -> usize {
        self.tau_ns.len() / 2
    }
}

/// Full time-correlation of all event pairs with `|τ| ≤ max_tau`,
/// normalized by the uncorrelated expectation `N(N-1)/T² ∫_bin (T - |τ|) dτ`.
pub fn g2_estimate(stream: &PhotonStream, bin_width_ns: f64, max_tau_ns: f64) -> Result<G2Histogram> {
    if stream.len() < 2 {
        return Err(Error::domain("g2 needs at least two events"));
    }
    if !(bin_width_ns > 0.0 && max_tau_ns >= bin_width_ns && max_tau_ns < stream.duration_ns) {
        return Err(Error::domain("g2 needs 0 < bin width <= max tau < duration"));
    }
    let k_max = (max_tau_ns / bin_width_ns).round() as usize;
    let nbins = 2 * k_max + 1;
    let mut counts = vec![0u64; nbins];
    let t = &stream.timestamps;
    let reach = (k_max as f64 + 0.5) * bin_width_ns;
    for i in 0..t.len() {
        for tj in &t[i + 1..] {
            let d = tj - t[i];
            if d >= reach {
                break;
            }
            let k = (d / bin_width_ns).round() as usize;
            counts[k_max + k] += 1;
            counts[k_max - k] += 1;
        }
    }
    let n = t.len() as f64;
    let duration = stream.duration_ns;
    let pair_density = n * (n - 1.0) / (duration * duration);
    let mut tau_ns = Vec::with_capacity(nbins);
    let mut g2 = Vec::with_capacity(nbins);
    let mut sigma = Vec::with_capacity(nbins);
    let mut expected_uncorrelated = Vec::with_capacity(nbins);
    for (idx, &c) in counts.iter().enumerate() {
        let tau = (idx as f64 - k_max as f64) * bin_width_ns;
        let expected = pair_density * overlap_length(tau, bin_width_ns, duration);
        tau_ns.push(tau);
        g2.push(c as f64 / expected);
        sigma.push((c.max(1) as f64).sqrt() / expected);
        expected_uncorrelated.push(expected);
    }
    Ok(G2Histogram { bin_width_ns, tau_ns, g2, sigma, counts, expected_uncorrelated })
}

/// `∫ (T - |τ|) dτ` over the bin centred on `tau`.
fn overlap_length(tau: f64, width: f64, duration: f64) -> f64 {
    let prim = |x: f64| duration * x - 0.5 * x * x.abs();
    prim(tau + 0.5 * width) - prim(tau - 0.5 * width)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::photon::{poisson_stream, simulate_stream};
    use proptest::prelude::*;

    #[test]
    fn theory_limits() {
        let m = EmitterModel::default();
        assert_eq!(g2_theory(&m, 0.0).unwrap(), 0.0);
        assert!((g2_theory(&m, 1e4).unwrap() - 1.0).abs() < 1e-15);
        let t = m.excited_lifetime_ns / 2.0;
        assert!((g2_theory(&m, t).unwrap() - (1.0 - (-1f64).exp())).abs() < 1e-15);
        let trig = EmitterModel::triggered(50.0, 1.0);
        assert!(matches!(g2_theory(&trig, 1.0), Err(Error::UnsupportedMode(_))));
    }

    proptest! {
        #[test]
        fn theory_is_even_monotone_and_bounded(a in 0.0f64..200.0, b in 0.0f64..200.0, r in 0.0f64..2.0) {
            let m = EmitterModel { pump_rate_per_ns: r, ..EmitterModel::default() };
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let (glo, ghi) = (g2_theory(&m, lo).unwrap(), g2_theory(&m, hi).unwrap());
            prop_assert!(glo <= ghi);
            prop_assert!((0.0..=1.0).contains(&ghi));
            prop_assert_eq!(g2_theory(&m, -a).unwrap(), g2_theory(&m, a).unwrap());
        }
    }

    #[test]
    fn overlap_integral() {
        assert!((overlap_length(0.0, 1.0, 10.0) - 9.75).abs() < 1e-12);
        assert!((overlap_length(3.0, 1.0, 10.0) - 7.0).abs() < 1e-12);
        assert!((overlap_length(-3.0, 1.0, 10.0) - 7.0).abs() < 1e-12);
    }

    #[test]
    fn histogram_is_symmetric_and_rejects_short_streams() {
        let s = poisson_stream(0.05, 2e5, 4).unwrap();
        let h = g2_estimate(&s, 1.0, 20.0).unwrap();
        assert_eq!(h.tau_ns.len(), 41);
        assert_eq!(h.tau_ns[h.zero_bin()], 0.0);
        for k in 0..h.counts.len() {
            assert_eq!(h.counts[k], h.counts[h.counts.len() - 1 - k]);
        }
        let one = PhotonStream { timestamps: vec![1.0], duration_ns: 10.0, source: "x".into(), seed: 0 };
        assert!(g2_estimate(&one, 1.0, 5.0).is_err());
    }

    #[test]
    fn antibunching_is_visible_in_a_short_run() {
        let m = EmitterModel::default();
        let s = simulate_stream(&m, 2e6, 1.0, 11).unwrap();
        let h = g2_estimate(&s, 1.0, 40.0).unwrap();
        assert!(h.g2[h.zero_bin()] < 0.2);
        assert!((h.g2[0] - 1.0).abs() < 0.2);
    }
}
