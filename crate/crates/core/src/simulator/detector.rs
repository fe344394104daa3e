use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use super::seed::rng_from_seed;
use super::stream::{merge_sorted, PhotonStream};
use crate::error::{ensure_positive, ensure_probability, Error, Result};

/// `Ī·τd` at or above which dead-time losses distort interval statistics.
pub const DEAD_TIME_WARNING_THRESHOLD: f64 = 0.1;

/// A typical InGaAs SPAD dark rate, counts per second, for noise studies.
pub const REALISTIC_DARK_RATE: f64 = 1_000.0;

/// Single-photon detector and TDC model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    /// Detection probability per incident photon.
    pub efficiency: f64,
    /// Non-paralyzable dead time, ns.
    pub dead_time: f64,
    /// Dark count rate, counts per second.
    pub dark_rate: f64,
    /// Timing resolution (TDC bin), ps.
    pub resolution: u64,
    /// Probability that a registered event spawns an afterpulse.
    pub afterpulse_prob: f64,
    /// Mean afterpulse delay, ns.
    pub afterpulse_tau: f64,
    /// Longest recorded start–stop interval, ns.
    pub window: f64,
}

impl Default for DetectorConfig {
    /// A gated InGaAs single-photon detector: 25 % efficiency,
    /// 4 μs dead time, 65 ps resolution, 100 ns window.
    fn default() -> Self {
        Self {
            efficiency: 0.25,
            dead_time: 4_000.0,
            dark_rate: 0.0,
            resolution: 65,
            afterpulse_prob: 0.0,
            afterpulse_tau: 50.0,
            window: 100.0,
        }
    }
}

impl DetectorConfig {
    /// Perfect detector: unit efficiency, no dead time, no noise, 1 ps
    /// timing.
    pub fn ideal() -> Self {
        Self {
            efficiency: 1.0,
            dead_time: 0.0,
            dark_rate: 0.0,
            resolution: 1,
            afterpulse_prob: 0.0,
            afterpulse_tau: 50.0,
            window: 100.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_probability("efficiency", self.efficiency)?;
        ensure_probability("afterpulse_prob", self.afterpulse_prob)?;
        if !(self.dead_time.is_finite() && self.dead_time >= 0.0) {
            return Err(Error::invalid("dead_time", "must be finite and >= 0"));
        }
        if !(self.dark_rate.is_finite() && self.dark_rate >= 0.0) {
            return Err(Error::invalid("dark_rate", "must be finite and >= 0"));
        }
        if self.resolution == 0 {
            return Err(Error::invalid("resolution", "must be at least 1 ps"));
        }
        if self.afterpulse_prob > 0.0 {
            ensure_positive("afterpulse_tau", self.afterpulse_tau)?;
        }
        ensure_positive("window", self.window)
    }

    fn dead_time_ps(&self) -> u64 {
        (self.dead_time * 1e3).ceil() as u64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    /// The count rate is too high for the dead time: `Ī·τd` should be ≪ 1.
    DeadTimeSaturation {
        rate_per_s: f64,
        dead_time_ns: f64,
        product: f64,
    },
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Diagnostic::DeadTimeSaturation {
                rate_per_s,
                dead_time_ns,
                product,
            } => write!(
                f,
                "count rate {rate_per_s:.4e}/s with {dead_time_ns} ns dead time gives I·τd = {product:.3} (should be << 1)"
            ),
        }
    }
}

/// Returns a warning when `rate·dead_time` reaches
/// [`DEAD_TIME_WARNING_THRESHOLD`].
pub fn dead_time_diagnostic(rate_per_s: f64, dead_time_ns: f64) -> Option<Diagnostic> {
    let product = rate_per_s * dead_time_ns * 1e-9;
    (product >= DEAD_TIME_WARNING_THRESHOLD).then_some(Diagnostic::DeadTimeSaturation {
        rate_per_s,
        dead_time_ns,
        product,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorOutput {
    pub stream: PhotonStream,
    pub diagnostics: Vec<Diagnostic>,
}

/// Passes incident photons through the detector.
///
/// In order: efficiency thinning, Poisson dark counts, afterpulses (at most
/// one per event, never chained), floor quantization to the timing
/// resolution, then the non-paralyzable dead time measured from the last
/// registered event. Dead time acts on quantized times so every output gap
/// is at least the dead time.
pub fn apply_detector(
    stream: &PhotonStream,
    config: &DetectorConfig,
    seed: u64,
) -> Result<DetectorOutput> {
    config.validate()?;
    let mut rng = rng_from_seed(seed);
    let duration = stream.duration();

    let detected: Vec<u64> = if config.efficiency >= 1.0 {
        stream.timestamps().to_vec()
    } else if config.efficiency <= 0.0 {
        Vec::new()
    } else {
        stream
            .timestamps()
            .iter()
            .copied()
            .filter(|_| rng.random_bool(config.efficiency))
            .collect()
    };

    let mut events = if config.dark_rate > 0.0 {
        let rate_per_ps = config.dark_rate * 1e-12;
        let mut dark = Vec::new();
        let mut t = 0.0;
        loop {
            let gap: f64 = Exp1.sample(&mut rng);
            t += gap / rate_per_ps;
            if t >= duration as f64 {
                break;
            }
            dark.push(t as u64);
        }
        merge_sorted(&detected, &dark)
    } else {
        detected
    };

    if config.afterpulse_prob > 0.0 {
        let mean_ps = config.afterpulse_tau * 1e3;
        let mut extra = Vec::new();
        for &t in &events {
            if rng.random_bool(config.afterpulse_prob) {
                let delay: f64 = Exp1.sample(&mut rng);
                let at = t + (delay * mean_ps) as u64;
                if at < duration {
                    extra.push(at);
                }
            }
        }
        extra.sort_unstable();
        events = merge_sorted(&events, &extra);
    }

    let mut diagnostics = Vec::new();
    if duration > 0 && config.dead_time > 0.0 {
        let rate_per_s = events.len() as f64 / (duration as f64 * 1e-12);
        diagnostics.extend(dead_time_diagnostic(rate_per_s, config.dead_time));
    }

    let resolution = config.resolution;
    let dead = config.dead_time_ps();
    let mut registered = Vec::with_capacity(events.len());
    let mut last: Option<u64> = None;
    for t in events {
        let q = t / resolution * resolution;
        if last.is_none_or(|l| q - l >= dead) {
            registered.push(q);
            last = Some(q);
        }
    }

    Ok(DetectorOutput {
        stream: PhotonStream::from_sorted(registered, duration),
        diagnostics,
    })
}
