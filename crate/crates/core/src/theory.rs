//! Closed-form coherence models for chaotic, coherent and mixed light.
//!
//! The mixed model blends a coherent component with a chaotic one,
//! `I(t) = Ī·[(1 − m) + m·u(t)]` with `u` the unit-mean chaotic intensity,
//! which yields `g2(τ) = 1 + m²·exp(−2|τ|/τc)`. The bunching amplitude of the
//! usual fit form is therefore `b = m²`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::series::{CorrelationCurve, ProbabilitySeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceKind {
    Chaotic,
    Coherent,
    Mixed,
}

/// Analytic description of the light entering the interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceModel {
    pub kind: SourceKind,
    /// Mean photon rate Ī, photons per ns.
    pub mean_rate: f64,
    /// Coherence time τc, ns. Ignored when `chaotic_fraction == 0`.
    pub coherence_time: f64,
    /// Chaotic fraction m; the bunching amplitude is m².
    pub chaotic_fraction: f64,
}

impl SourceModel {
    pub fn chaotic(mean_rate: f64, coherence_time: f64) -> Result<Self> {
        let model = Self {
            kind: SourceKind::Chaotic,
            mean_rate,
            coherence_time,
            chaotic_fraction: 1.0,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn coherent(mean_rate: f64) -> Result<Self> {
        let model = Self {
            kind: SourceKind::Coherent,
            mean_rate,
            coherence_time: 0.0,
            chaotic_fraction: 0.0,
        };
        model.validate()?;
        Ok(model)
    }

    /// Mixed light with chaotic fraction `m`. `m = 0` and `m = 1` are
    /// normalized to the coherent and chaotic kinds.
    pub fn mixed(mean_rate: f64, coherence_time: f64, chaotic_fraction: f64) -> Result<Self> {
        let kind = if chaotic_fraction == 0.0 {
            SourceKind::Coherent
        } else if chaotic_fraction == 1.0 {
            SourceKind::Chaotic
        } else {
            SourceKind::Mixed
        };
        let model = Self {
            kind,
            mean_rate,
            coherence_time,
            chaotic_fraction,
        };
        model.validate()?;
        Ok(model)
    }

    /// Mixed light whose g2 has bunching amplitude `b = m²`.
    pub fn with_bunching_amplitude(mean_rate: f64, coherence_time: f64, b: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&b) {
            return Err(Error::invalid(
                "bunching_amplitude",
                format!("must lie in [0, 1], got {b}"),
            ));
        }
        Self::mixed(mean_rate, coherence_time, b.sqrt())
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("mean_rate", self.mean_rate)?;
        let m = self.chaotic_fraction;
        if !(0.0..=1.0).contains(&m) {
            return Err(Error::invalid(
                "chaotic_fraction",
                format!("must lie in [0, 1], got {m}"),
            ));
        }
        if m > 0.0 {
            ensure_positive("coherence_time", self.coherence_time)?;
        }
        let consistent = match self.kind {
            SourceKind::Chaotic => m == 1.0,
            SourceKind::Coherent => m == 0.0,
            SourceKind::Mixed => m > 0.0 && m < 1.0,
        };
        if !consistent {
            return Err(Error::invalid(
                "kind",
                format!(
                    "{:?} light is incompatible with chaotic_fraction {m}",
                    self.kind
                ),
            ));
        }
        Ok(())
    }

    /// Bunching amplitude b = m².
    pub fn bunching_amplitude(&self) -> f64 {
        self.chaotic_fraction * self.chaotic_fraction
    }
}

/// First-order correlation of Lorentzian light, `exp(−|τ|/τc)`.
pub fn g1_lorentzian(tau: f64, coherence_time: f64) -> Result<f64> {
    ensure_positive("coherence_time", coherence_time)?;
    Ok((-tau.abs() / coherence_time).exp())
}

/// `g2(τ) = 1 + m²·exp(−2|τ|/τc)`; exactly 1 for coherent light.
pub fn g2_model(tau: f64, model: &SourceModel) -> Result<f64> {
    model.validate()?;
    Ok(g2_unchecked(tau, model))
}

fn g2_unchecked(tau: f64, model: &SourceModel) -> f64 {
    let b = model.bunching_amplitude();
    if b == 0.0 {
        1.0
    } else {
        1.0 + b * (-2.0 * tau.abs() / model.coherence_time).exp()
    }
}

/// g2 sampled at `k·bin_width` for `k = 0..num_bins`.
pub fn g2_curve(model: &SourceModel, bin_width: f64, num_bins: usize) -> Result<CorrelationCurve> {
    model.validate()?;
    ensure_positive("bin_width", bin_width)?;
    let values = (0..num_bins)
        .map(|k| g2_unchecked(k as f64 * bin_width, model))
        .collect();
    CorrelationCurve::new(bin_width, values)
}

/// Per-bin pair histogram `G[k] = (Ī·Δ)·g2(kΔ)`.
///
/// Rejects grids where `2·Ī·Δ >= 1`: G[0] could then reach one and the
/// entries stop being per-bin probabilities.
pub fn g_theoretical(
    model: &SourceModel,
    bin_width: f64,
    num_bins: usize,
) -> Result<ProbabilitySeries> {
    model.validate()?;
    ensure_positive("bin_width", bin_width)?;
    if num_bins == 0 {
        return Err(Error::invalid("num_bins", "must be at least 1"));
    }
    let per_bin = model.mean_rate * bin_width;
    if 2.0 * per_bin >= 1.0 {
        return Err(Error::invalid(
            "mean_rate",
            format!("Ī·Δ = {per_bin} per bin; need 2·Ī·Δ < 1"),
        ));
    }
    let values = (0..num_bins)
        .map(|k| per_bin * g2_unchecked(k as f64 * bin_width, model))
        .collect();
    ProbabilitySeries::new(bin_width, values)
}

/// Coherence time (ns) of a Lorentzian line with FWHM `linewidth_hz`:
/// `τc = 1/(π·Δν)`.
pub fn coherence_time_from_linewidth(linewidth_hz: f64) -> Result<f64> {
    ensure_positive("linewidth", linewidth_hz)?;
    Ok(1e9 / (PI * linewidth_hz))
}

/// Inverse of [`coherence_time_from_linewidth`]: FWHM in Hz for τc in ns.
pub fn linewidth_from_coherence_time(coherence_time: f64) -> Result<f64> {
    ensure_positive("coherence_time", coherence_time)?;
    Ok(1e9 / (PI * coherence_time))
}
