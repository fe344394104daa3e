//! Binned series shared by every stage of the pipeline.
//!
//! All values are per-bin quantities (probability mass in `[kΔ, (k+1)Δ)`, or
//! g2 sampled at `kΔ`); densities per nanosecond never appear here.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};

/// Per-bin probability masses on a uniform one-sided delay grid.
///
/// Holds waiting-time distributions (P1, D1 and their self-convolutions) as
/// well as the per-bin pair histogram G. Values are finite and non-negative;
/// for physical inputs they are also at most one, but partial sums of
/// renewal series built from synthetic inputs may exceed one, so that bound
/// is not enforced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilitySeries {
    bin_width: f64,
    values: Vec<f64>,
}

impl ProbabilitySeries {
    pub fn new(bin_width: f64, values: Vec<f64>) -> Result<Self> {
        ensure_positive("bin_width", bin_width)?;
        if let Some((bin, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::invalid(
                "values",
                format!("bin {bin} holds {value}; entries must be finite and >= 0"),
            ));
        }
        Ok(Self { bin_width, values })
    }

    /// Constructor for values the crate computed itself and knows to be valid.
    pub(crate) fn from_parts(bin_width: f64, values: Vec<f64>) -> Self {
        debug_assert!(bin_width > 0.0);
        debug_assert!(values.iter().all(|v| v.is_finite() && *v >= 0.0));
        Self { bin_width, values }
    }

    pub fn zeros(bin_width: f64, len: usize) -> Result<Self> {
        Self::new(bin_width, vec![0.0; len])
    }

    /// A single mass `mass` in bin `index`.
    pub fn delta(bin_width: f64, len: usize, index: usize, mass: f64) -> Result<Self> {
        if index >= len {
            return Err(Error::invalid(
                "index",
                format!("{index} outside {len} bins"),
            ));
        }
        let mut values = vec![0.0; len];
        values[index] = mass;
        Self::new(bin_width, values)
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_width
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Delay at the left edge of bin `k`, in ns.
    pub fn delay(&self, k: usize) -> f64 {
        k as f64 * self.bin_width
    }

    /// Multiplies every entry by a non-negative factor.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor >= 0.0) {
            return Err(Error::invalid(
                "factor",
                format!("must be finite and >= 0, got {factor}"),
            ));
        }
        Ok(Self::from_parts(
            self.bin_width,
            self.values.iter().map(|v| v * factor).collect(),
        ))
    }

    /// Keeps the first `len` bins.
    pub fn truncated(&self, len: usize) -> Self {
        Self::from_parts(self.bin_width, self.values[..len.min(self.len())].to_vec())
    }
}

/// g2(τ) samples on a uniform one-sided grid: `values[k] = g2(k·bin_width)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationCurve {
    bin_width: f64,
    values: Vec<f64>,
}

impl CorrelationCurve {
    pub fn new(bin_width: f64, values: Vec<f64>) -> Result<Self> {
        ensure_positive("bin_width", bin_width)?;
        if let Some((bin, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::invalid(
                "values",
                format!("bin {bin} holds {value}; g2 samples must be finite and >= 0"),
            ));
        }
        Ok(Self { bin_width, values })
    }

    pub(crate) fn from_parts(bin_width: f64, values: Vec<f64>) -> Self {
        debug_assert!(bin_width > 0.0);
        Self { bin_width, values }
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_width
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn delay(&self, k: usize) -> f64 {
        k as f64 * self.bin_width
    }

    /// Iterator over `(delay_ns, value)` pairs.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(k, &v)| (k as f64 * self.bin_width, v))
    }

    pub fn truncated(&self, len: usize) -> Self {
        Self::from_parts(self.bin_width, self.values[..len.min(self.len())].to_vec())
    }

    /// Index of the last bin whose delay does not exceed `max_delay` (ns).
    pub fn last_bin_within(&self, max_delay: f64) -> Option<usize> {
        if self.values.is_empty() || max_delay < 0.0 {
            return None;
        }
        let k = (max_delay / self.bin_width + 1e-9).floor() as usize;
        Some(k.min(self.values.len() - 1))
    }
}

pub(crate) fn check_same_grid(a: f64, b: f64) -> Result<()> {
    if (a - b).abs() <= 1e-12 * a.abs().max(b.abs()) {
        Ok(())
    } else {
        Err(Error::BinWidthMismatch { left: a, right: b })
    }
}
