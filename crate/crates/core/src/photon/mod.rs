//! Single-emitter photon statistics: emission streams, intensity correlation,
//! photon-count images and sub-shot-noise detection limits.

mod counts;
mod g2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use counts::{
    apply_count_loss, count_image, count_frames, fano_factor, min_detectable_contrast,
    monte_carlo_min_contrast, CountImage, CountSource, FrameStack,
};
pub use g2::{g2_estimate, g2_theory, G2Histogram};

/// Excitation scheme of the emitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmissionMode {
    Cw,
    Triggered,
}

/// Two-level emitter with an effective pump rate into the emitting state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EmitterModel {
    pub excited_lifetime_ns: f64,
    pub pump_rate_per_ns: f64,
    pub mode: EmissionMode,
    pub trigger_period_ns: f64,
    pub emission_probability: f64,
    /// Informational; the two-level dynamics only use the lifetime.
    pub zpl_linewidth_mhz: f64,
    pub dead_time_ns: f64,
    pub dark_rate_per_ns: f64,
}

impl Default for EmitterModel {
    fn default() -> Self {
        Self {
            excited_lifetime_ns: 9.5,
            pump_rate_per_ns: 1.0 / 9.5,
            mode: EmissionMode::Cw,
            trigger_period_ns: 100.0,
            emission_probability: 1.0,
            zpl_linewidth_mhz: 17.0,
            dead_time_ns: 0.0,
            dark_rate_per_ns: 0.0,
        }
    }
}

impl EmitterModel {
    pub fn triggered(period_ns: f64, emission_probability: f64) -> Self {
        Self {
            mode: EmissionMode::Triggered,
            trigger_period_ns: period_ns,
            emission_probability,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.excited_lifetime_ns > 0.0
            && self.excited_lifetime_ns.is_finite()
            && self.pump_rate_per_ns >= 0.0
            && self.pump_rate_per_ns.is_finite()
            && (0.0..=1.0).contains(&self.emission_probability)
            && self.dead_time_ns >= 0.0
            && self.dark_rate_per_ns >= 0.0;
        if !ok {
            return Err(Error::domain(
                "emitter needs lifetime > 0, pump rate >= 0, emission probability in [0, 1], non-negative dead time and dark rate",
            ));
        }
        if self.mode == EmissionMode::Triggered && !(self.trigger_period_ns > 0.0) {
            return Err(Error::domain("triggered emitter needs a positive trigger period"));
        }
        Ok(())
    }

    /// Total decay rate `R + 1/τ₁` of the cw correlation dip.
    pub fn recovery_rate(&self) -> f64 {
        self.pump_rate_per_ns + 1.0 / self.excited_lifetime_ns
    }

    /// Mean cw emission rate `1 / (1/R + τ₁)` in photons per ns.
    pub fn cw_emission_rate(&self) -> f64 {
        if self.pump_rate_per_ns == 0.0 {
            0.0
        } else {
            1.0 / (1.0 / self.pump_rate_per_ns + self.excited_lifetime_ns)
        }
    }
}

/// Detection timestamps in ns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotonStream {
    pub timestamps: Vec<f64>,
    pub duration_ns: f64,
    pub source: String,
    pub seed: u64,
}

impl PhotonStream {
    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn rate_per_ns(&self) -> f64 {
        self.timestamps.len() as f64 / self.duration_ns
    }

    /// Union of two independent streams over the shorter duration.
    pub fn merge(&self, other: &PhotonStream) -> PhotonStream {
        let duration_ns = self.duration_ns.min(other.duration_ns);
        let mut timestamps: Vec<f64> = self
            .timestamps
            .iter()
            .chain(&other.timestamps)
            .copied()
            .filter(|&t| t <= duration_ns)
            .collect();
        timestamps.sort_by(f64::total_cmp);
        timestamps.dedup();
        PhotonStream {
            timestamps,
            duration_ns,
            source: format!("{}+{}", self.source, other.source),
            seed: self.seed,
        }
    }

    /// Keeps each event independently with probability `eta`.
    pub fn thinned(&self, eta: f64, seed: u64) -> Result<PhotonStream> {
        check_probability(eta, "loss transmission")?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(PhotonStream {
            timestamps: self.timestamps.iter().copied().filter(|_| rng.gen_bool(eta)).collect(),
            duration_ns: self.duration_ns,
            source: self.source.clone(),
            seed: self.seed,
        })
    }
}

fn check_probability(p: f64, what: &str) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::domain(format!("{what} must lie in [0, 1], got {p}")))
    }
}

/// Simulates detected photons from one emitter over `[0, duration]`.
///
/// `detection_efficiency` is the probability that an emitted photon is
/// registered. In cw mode the emitter cycles through an exponential pump wait
/// and an exponential decay; in triggered mode each pulse at `k·period`
/// excites it with probability `emission_probability` unless it is still
/// excited. Dead time and dark counts are applied after detection.
pub fn simulate_stream(
    model: &EmitterModel,
    duration_ns: f64,
    detection_efficiency: f64,
    seed: u64,
) -> Result<PhotonStream> {
    model.validate()?;
    check_probability(detection_efficiency, "detection efficiency")?;
    if !(duration_ns > 0.0 && duration_ns.is_finite()) {
        return Err(Error::domain("stream duration must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let decay = Exp::new(1.0 / model.excited_lifetime_ns).expect("positive lifetime");
    let mut emitted = Vec::new();
    match model.mode {
        EmissionMode::Cw => {
            if model.pump_rate_per_ns > 0.0 {
                let pump = Exp::new(model.pump_rate_per_ns).expect("positive rate");
                let mut t = 0.0;
                loop {
                    t += pump.sample(&mut rng) + decay.sample(&mut rng);
                    if t > duration_ns {
                        break;
                    }
                    emitted.push(t);
                }
            }
        }
        EmissionMode::Triggered => {
            let period = model.trigger_period_ns;
            let pulses = (duration_ns / period).floor() as u64;
            let mut busy_until = f64::NEG_INFINITY;
            for k in 0..pulses {
                let t0 = k as f64 * period;
                if t0 < busy_until || !rng.gen_bool(model.emission_probability) {
                    continue;
                }
                let t = t0 + decay.sample(&mut rng);
                busy_until = t;
                if t <= duration_ns {
                    emitted.push(t);
                }
            }
        }
    }
    let mut detected: Vec<f64> = emitted
        .into_iter()
        .filter(|_| detection_efficiency == 1.0 || rng.gen_bool(detection_efficiency))
        .collect();
    if model.dark_rate_per_ns > 0.0 {
        let dark = Exp::new(model.dark_rate_per_ns).expect("positive rate");
        let mut t = dark.sample(&mut rng);
        while t <= duration_ns {
            detected.push(t);
            t += dark.sample(&mut rng);
        }
        detected.sort_by(f64::total_cmp);
    }
    let timestamps = apply_dead_time(detected, model.dead_time_ns);
    let source = match model.mode {
        EmissionMode::Cw => "cw-emitter",
        EmissionMode::Triggered => "triggered-emitter",
    };
    Ok(PhotonStream { timestamps, duration_ns, source: source.into(), seed })
}

fn apply_dead_time(sorted: Vec<f64>, dead_time_ns: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(sorted.len());
    for t in sorted {
        match out.last() {
            Some(&last) if t - last <= dead_time_ns => {}
            _ => out.push(t),
        }
    }
    out
}

/// Coherent-light stream: homogeneous Poisson process at `rate_per_ns`.
pub fn poisson_stream(rate_per_ns: f64, duration_ns: f64, seed: u64) -> Result<PhotonStream> {
    if !(rate_per_ns > 0.0 && duration_ns > 0.0) {
        return Err(Error::domain("poisson stream needs positive rate and duration"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let wait = Exp::new(rate_per_ns).expect("positive rate");
    let mut timestamps = Vec::new();
    let mut t = wait.sample(&mut rng);
    while t <= duration_ns {
        timestamps.push(t);
        t += wait.sample(&mut rng);
    }
    Ok(PhotonStream { timestamps, duration_ns, source: "poisson".into(), seed })
}
