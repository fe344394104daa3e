use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::seed::rng_from_seed;
use crate::error::{ensure_positive, Error, Result};
use crate::theory::SourceModel;

/// Finest allowed ratio `dt / τc`; coarser steps visibly distort the
/// correlation shape.
pub(crate) const MAX_STEP_FRACTION: f64 = 1.0 / 20.0;

/// Sampled photon rate, photons per ns, on a uniform grid of step `dt` ns.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityTrace {
    dt: f64,
    samples: Vec<f64>,
}

impl IntensityTrace {
    pub fn new(dt: f64, samples: Vec<f64>) -> Result<Self> {
        ensure_positive("dt", dt)?;
        if samples.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(Error::invalid(
                "samples",
                "intensities must be finite and >= 0",
            ));
        }
        Ok(Self { dt, samples })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_ns(&self) -> f64 {
        self.samples.len() as f64 * self.dt
    }

    pub fn mean(&self) -> f64 {
        if self.samples.is_empty() {
            0.0
        } else {
            self.samples.iter().sum::<f64>() / self.samples.len() as f64
        }
    }
}

/// Stochastic surrogate for a chaotic field.
///
/// The complex amplitude follows the exact discretization of a complex
/// Ornstein–Uhlenbeck process with unit stationary power,
///
/// ```text
/// E[k+1] = a·E[k] + sqrt((1 − a²)/2)·(ξ₁ + iξ₂),   a = exp(−dt/τc)
/// ```
///
/// so `⟨E*(t)E(t+τ)⟩ = exp(−|τ|/τc)` holds exactly at every lag. The emitted
/// intensity is `Ī·[(1 − m) + m·|E|²]`.
#[derive(Debug, Clone)]
pub struct IntensityProcess {
    mean_rate: f64,
    chaotic_fraction: f64,
    dt: f64,
    decay: f64,
    kick: f64,
    field: [f64; 2],
    rng: Option<ChaCha8Rng>,
}

impl IntensityProcess {
    pub fn new(model: &SourceModel, dt: f64, seed: u64) -> Result<Self> {
        model.validate()?;
        ensure_positive("dt", dt)?;
        let m = model.chaotic_fraction;
        if m == 0.0 {
            return Ok(Self {
                mean_rate: model.mean_rate,
                chaotic_fraction: 0.0,
                dt,
                decay: 0.0,
                kick: 0.0,
                field: [0.0; 2],
                rng: None,
            });
        }
        let limit = model.coherence_time * MAX_STEP_FRACTION;
        if dt > limit * (1.0 + 1e-12) {
            return Err(Error::invalid(
                "dt",
                format!("{dt} ns is coarser than τc/20 = {limit} ns"),
            ));
        }
        let decay = (-dt / model.coherence_time).exp();
        let kick = ((1.0 - decay * decay) / 2.0).sqrt();
        let mut rng = rng_from_seed(seed);
        let half = std::f64::consts::FRAC_1_SQRT_2;
        let field = [
            half * Distribution::<f64>::sample(&StandardNormal, &mut rng),
            half * Distribution::<f64>::sample(&StandardNormal, &mut rng),
        ];
        Ok(Self {
            mean_rate: model.mean_rate,
            chaotic_fraction: m,
            dt,
            decay,
            kick,
            field,
            rng: Some(rng),
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Returns the current complex field `[re, im]` and advances one step.
    /// Coherent light has no fluctuating field and always yields zero.
    pub fn next_field(&mut self) -> [f64; 2] {
        let current = self.field;
        if let Some(rng) = self.rng.as_mut() {
            let n1: f64 = StandardNormal.sample(rng);
            let n2: f64 = StandardNormal.sample(rng);
            self.field = [
                self.decay * current[0] + self.kick * n1,
                self.decay * current[1] + self.kick * n2,
            ];
        }
        current
    }

    fn intensity_of(&self, field: [f64; 2]) -> f64 {
        let m = self.chaotic_fraction;
        self.mean_rate * ((1.0 - m) + m * (field[0] * field[0] + field[1] * field[1]))
    }

    pub fn next_intensity(&mut self) -> f64 {
        if self.rng.is_none() {
            return self.mean_rate;
        }
        let field = self.next_field();
        self.intensity_of(field)
    }

    pub fn fill(&mut self, buf: &mut [f64]) {
        if self.rng.is_none() {
            buf.fill(self.mean_rate);
            return;
        }
        for slot in buf {
            *slot = self.next_intensity();
        }
    }
}

/// Samples `floor(duration / dt)` intensity values from `model`.
pub fn simulate_intensity(
    model: &SourceModel,
    dt: f64,
    duration: f64,
    seed: u64,
) -> Result<IntensityTrace> {
    let mut process = IntensityProcess::new(model, dt, seed)?;
    if duration.is_nan() || duration < dt {
        return Err(Error::invalid(
            "duration",
            format!("{duration} ns is shorter than one step of {dt} ns"),
        ));
    }
    let n = (duration / dt + 1e-9).floor() as usize;
    let mut samples = vec![0.0; n];
    process.fill(&mut samples);
    Ok(IntensityTrace { dt, samples })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coherent_is_constant() {
        let model = SourceModel::coherent(0.04).unwrap();
        let trace = simulate_intensity(&model, 0.1, 100.0, 3).unwrap();
        assert_eq!(trace.len(), 1000);
        assert!(trace.samples().iter().all(|&s| s == 0.04));
    }

    #[test]
    fn deterministic_per_seed() {
        let model = SourceModel::chaotic(0.04, 0.5).unwrap();
        let a = simulate_intensity(&model, 0.025, 500.0, 11).unwrap();
        let b = simulate_intensity(&model, 0.025, 500.0, 11).unwrap();
        let c = simulate_intensity(&model, 0.025, 500.0, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_coarse_steps() {
        let model = SourceModel::chaotic(0.04, 0.5).unwrap();
        assert!(simulate_intensity(&model, 0.026, 10.0, 0).is_err());
        assert!(simulate_intensity(&model, 0.025, 10.0, 0).is_ok());
        assert!(simulate_intensity(&model, 0.025, 0.01, 0).is_err());
    }

    #[test]
    fn chaotic_normalized_variance_is_one() {
        let model = SourceModel::chaotic(0.04, 0.5).unwrap();
        let trace = simulate_intensity(&model, 0.025, 25_000.0, 5).unwrap();
        assert_eq!(trace.len(), 1_000_000);
        let mean = trace.mean();
        let var = trace
            .samples()
            .iter()
            .map(|s| (s - mean) * (s - mean))
            .sum::<f64>()
            / trace.len() as f64;
        let normalized = var / (mean * mean);
        assert!((normalized - 1.0).abs() < 0.05, "{normalized}");
        assert!((mean - 0.04).abs() < 0.04 * 0.05);
    }

    #[test]
    fn chunked_fill_equals_single_fill() {
        let model = SourceModel::chaotic(0.04, 0.5).unwrap();
        let whole = simulate_intensity(&model, 0.025, 100.0, 9).unwrap();
        let mut process = IntensityProcess::new(&model, 0.025, 9).unwrap();
        let mut a = vec![0.0; 1500];
        let mut b = vec![0.0; 2500];
        process.fill(&mut a);
        process.fill(&mut b);
        a.extend(b);
        assert_eq!(a, whole.samples());
    }
}
