use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::simulator::IntensityTrace;

/// Share of the AC spectral energy that defines the effective bandwidth.
pub const ENERGY_FRACTION: f64 = 0.8;

/// Averaged-periodogram settings: Hann-tapered segments of `segment_len`
/// samples advanced by `segment_len·(1 − overlap)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumConfig {
    pub segment_len: usize,
    pub overlap: f64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            segment_len: 1 << 12,
            overlap: 0.5,
        }
    }
}

/// One-sided power spectrum on `frequencies[k] = k·fs/N`, in GHz when the
/// sample step is in ns.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSpectrum {
    pub frequencies: Vec<f64>,
    pub power: Vec<f64>,
}

/// Welch estimate of the one-sided power spectrum of the mean-removed
/// samples.
pub fn power_spectrum(samples: &[f64], dt: f64, config: &SpectrumConfig) -> Result<PowerSpectrum> {
    let n = config.segment_len;
    if n < 2 || samples.len() < n {
        return Err(Error::InsufficientData(format!(
            "{} samples, need at least one segment of {n}",
            samples.len()
        )));
    }
    if !(0.0..1.0).contains(&config.overlap) {
        return Err(Error::invalid("overlap", "must lie in [0, 1)"));
    }
    let hop = ((n as f64 * (1.0 - config.overlap)).round() as usize).max(1);
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    let window: Vec<f64> = (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
        .collect();
    let window_power: f64 = window.iter().map(|w| w * w).sum();

    let fft = FftPlanner::new().plan_fft_forward(n);
    let half = n / 2;
    let mut power = vec![0.0; half + 1];
    let mut buf = vec![Complex::new(0.0, 0.0); n];
    let mut segments = 0usize;
    let mut start = 0;
    while start + n <= samples.len() {
        for ((slot, &x), &w) in buf.iter_mut().zip(&samples[start..start + n]).zip(&window) {
            *slot = Complex::new((x - mean) * w, 0.0);
        }
        fft.process(&mut buf);
        for (p, c) in power.iter_mut().zip(&buf) {
            *p += c.norm_sqr();
        }
        segments += 1;
        start += hop;
    }

    // Density scaling, doubled for the folded negative frequencies.
    let fs = 1.0 / dt;
    let scale = 1.0 / (segments as f64 * fs * window_power);
    for (k, p) in power.iter_mut().enumerate() {
        let fold = if k == 0 || (n.is_multiple_of(2) && k == half) {
            1.0
        } else {
            2.0
        };
        *p *= scale * fold;
    }
    let frequencies = (0..=half).map(|k| k as f64 * fs / n as f64).collect();
    Ok(PowerSpectrum { frequencies, power })
}

/// Smallest frequency at which the cumulative energy, DC bin excluded,
/// reaches `fraction` of the total.
pub fn bandwidth_from_spectrum(frequencies: &[f64], power: &[f64], fraction: f64) -> Result<f64> {
    if frequencies.len() != power.len() || frequencies.len() < 2 {
        return Err(Error::GridMismatch(format!(
            "{} frequencies for {} power values",
            frequencies.len(),
            power.len()
        )));
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::invalid("fraction", "must lie in (0, 1]"));
    }
    let total: f64 = power[1..].iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::Degenerate("spectrum carries no AC energy".into()));
    }
    let target = fraction * total * (1.0 - 1e-12);
    let mut cumulative = 0.0;
    for (f, p) in frequencies[1..].iter().zip(&power[1..]) {
        cumulative += p;
        if cumulative >= target {
            return Ok(*f);
        }
    }
    Ok(*frequencies.last().expect("non-empty"))
}

/// 80 % effective bandwidth of an intensity trace, GHz.
///
/// The trace mean is removed, the spectrum is the Hann-windowed averaged
/// periodogram of [`SpectrumConfig::default`] (4096-sample segments, 50 %
/// overlap) and the DC bin is excluded from the energy budget.
pub fn effective_bandwidth(trace: &IntensityTrace) -> Result<f64> {
    let config = SpectrumConfig::default();
    if trace.len() < config.segment_len {
        return Err(Error::InsufficientData(format!(
            "trace has {} samples, need at least {}",
            trace.len(),
            config.segment_len
        )));
    }
    let first = trace.samples()[0];
    if trace.samples().iter().all(|&s| s == first) {
        return Err(Error::Degenerate("constant trace has no AC energy".into()));
    }
    let spectrum = power_spectrum(trace.samples(), trace.dt(), &config)?;
    bandwidth_from_spectrum(&spectrum.frequencies, &spectrum.power, ENERGY_FRACTION)
}
