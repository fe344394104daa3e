use serde::{Deserialize, Serialize};

use super::convolution::{convolve_window, self_convolution_series};
use super::renewal::renewal_invert;
use crate::error::{ensure_positive, Error, Result};
use crate::series::{CorrelationCurve, ProbabilitySeries};

/// Number of self-convolution orders kept by default.
pub const DEFAULT_ORDER: usize = 9;

/// A bin counts as converged when the highest retained order contributes at
/// most this fraction of the partial sum.
const CONVERGED_RELATIVE_TERM: f64 = 1e-3;

/// Fraction of the converged window averaged for tail normalization.
const TAIL_FRACTION: f64 = 0.1;

/// The normalized tail must extend at least this many coherence times.
const TAIL_COHERENCE_TIMES: f64 = 20.0;

/// How the mean rate Ī in `g = 2·Σ Dn / Ī` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum MeanRateMode {
    /// A known combined rate of both detectors, photons per ns.
    Given { rate_per_ns: f64 },
    /// The per-bin rate estimated from detector counts, passed alongside the
    /// distribution.
    FromCounts,
    /// Rescale so the flat tail of the converged window averages to one.
    TailNormalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrectionConfig {
    pub order: usize,
    pub mean_rate_mode: MeanRateMode,
}

impl Default for CorrectionConfig {
    fn default() -> Self {
        Self {
            order: DEFAULT_ORDER,
            mean_rate_mode: MeanRateMode::FromCounts,
        }
    }
}

impl CorrectionConfig {
    pub fn with_order(order: usize) -> Self {
        Self {
            order,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.order == 0 {
            return Err(Error::invalid("order", "must be at least 1"));
        }
        if let MeanRateMode::Given { rate_per_ns } = self.mean_rate_mode {
            ensure_positive("rate_per_ns", rate_per_ns)?;
        }
        Ok(())
    }
}

/// Truncated reconstruction from a per-bin pair histogram G:
/// `g_N[k] = Σ_{n≤N} Pn[k] / Ī_bin` with `P1 = renewal_invert(G)`.
///
/// The partial sums approach `G/Ī_bin` from below as the order grows.
pub fn correction_from_g(
    g_series: &ProbabilitySeries,
    mean_rate_per_bin: f64,
    order: usize,
) -> Result<CorrelationCurve> {
    ensure_positive("mean_rate_per_bin", mean_rate_per_bin)?;
    if order == 0 {
        return Err(Error::invalid("order", "must be at least 1"));
    }
    let p1 = renewal_invert(g_series)?;
    let sum = partial_sum(&p1, order);
    Ok(CorrelationCurve::from_parts(
        g_series.bin_width(),
        sum.into_iter().map(|s| s / mean_rate_per_bin).collect(),
    ))
}

/// Truncated reconstruction from the measured start–stop distribution D1:
/// `g_N[k] = 2·Σ_{n≤N} Dn[k] / Ī_bin`.
///
/// `counted_rate_per_bin` is the combined per-bin rate of both detectors and
/// is only read in [`MeanRateMode::FromCounts`].
pub fn correction_from_d1(
    d1: &ProbabilitySeries,
    config: &CorrectionConfig,
    counted_rate_per_bin: f64,
) -> Result<CorrelationCurve> {
    config.validate()?;
    let bin_width = d1.bin_width();
    let terms = self_convolution_series(d1, config.order)?;
    let mut sum = vec![0.0; d1.len()];
    for term in &terms {
        for (s, v) in sum.iter_mut().zip(term.values()) {
            *s += 2.0 * v;
        }
    }

    let values = match config.mean_rate_mode {
        MeanRateMode::Given { rate_per_ns } => {
            let per_bin = rate_per_ns * bin_width;
            sum.into_iter().map(|s| s / per_bin).collect()
        }
        MeanRateMode::FromCounts => {
            ensure_positive("counted_rate_per_bin", counted_rate_per_bin)?;
            sum.into_iter().map(|s| s / counted_rate_per_bin).collect()
        }
        MeanRateMode::TailNormalized => {
            let last = terms.last().expect("order >= 1").values();
            tail_normalize(sum, last, bin_width)?
        }
    };
    Ok(CorrelationCurve::from_parts(bin_width, values))
}

/// Rescales `sum` so the mean of the last tenth of its converged window is 1.
fn tail_normalize(sum: Vec<f64>, last_term: &[f64], bin_width: f64) -> Result<Vec<f64>> {
    if sum.iter().all(|&s| s == 0.0) {
        return Ok(sum);
    }
    let converged = converged_prefix(&sum, last_term);
    if converged == 0 {
        return Err(Error::TailNotFlat {
            window_ns: 0.0,
            required_ns: f64::NAN,
        });
    }
    let tail_len = ((converged as f64 * TAIL_FRACTION).ceil() as usize).max(1);
    let tail = &sum[converged - tail_len..converged];
    let level = tail.iter().sum::<f64>() / tail_len as f64;
    if level <= 0.0 {
        return Err(Error::Degenerate(
            "tail of the distribution is empty".into(),
        ));
    }

    let tau_c = coherence_time_estimate(&sum[..converged], level, bin_width);
    let window_ns = converged as f64 * bin_width;
    let required_ns = TAIL_COHERENCE_TIMES * tau_c;
    if window_ns < required_ns {
        return Err(Error::TailNotFlat {
            window_ns,
            required_ns,
        });
    }
    Ok(sum.into_iter().map(|s| s / level).collect())
}

/// Delay at which the normalized excess `c/level − 1` first drops to 1/e² of
/// its zero-delay value; for `1 + b·exp(−2τ/τc)` this is τc. Returns 0 when
/// there is no excess.
fn coherence_time_estimate(sum: &[f64], level: f64, bin_width: f64) -> f64 {
    let excess0 = sum[0] / level - 1.0;
    if excess0 <= 1e-3 {
        return 0.0;
    }
    let threshold = excess0 * (-2.0f64).exp();
    sum.iter()
        .position(|&s| s / level - 1.0 <= threshold)
        .map_or(sum.len() as f64 * bin_width, |k| k as f64 * bin_width)
}

/// Length of the leading run of bins whose highest-order term is negligible.
fn converged_prefix(sum: &[f64], last_term: &[f64]) -> usize {
    sum.iter()
        .zip(last_term)
        .position(|(&s, &t)| t > CONVERGED_RELATIVE_TERM * s)
        .unwrap_or(sum.len())
}

fn partial_sum(p1: &ProbabilitySeries, order: usize) -> Vec<f64> {
    let len = p1.len();
    let mut sum = p1.values().to_vec();
    let mut term = p1.values().to_vec();
    for _ in 1..order {
        term = convolve_window(&term, p1.values(), len);
        for (s, t) in sum.iter_mut().zip(&term) {
            *s += t;
        }
    }
    sum
}

/// Start–stop distribution implied by an ideal interval distribution:
/// `D1 = Σ_n Pn / 2ⁿ`.
///
/// Terms are added until one falls below 1e-15 in every bin. If `max_terms`
/// is reached first, the next term must be below 1e-12 or the call fails.
pub fn d1_from_p1(p1: &ProbabilitySeries, max_terms: usize) -> Result<ProbabilitySeries> {
    const NEGLIGIBLE: f64 = 1e-15;
    const ACCEPTABLE_REMAINDER: f64 = 1e-12;

    if max_terms == 0 {
        return Err(Error::invalid("max_terms", "must be at least 1"));
    }
    let len = p1.len();
    let mut d1 = vec![0.0; len];
    let mut pn = p1.values().to_vec();
    let mut weight = 0.5;
    for n in 1..=max_terms {
        let mut peak = 0.0f64;
        for (d, p) in d1.iter_mut().zip(&pn) {
            let term = weight * p;
            *d += term;
            peak = peak.max(term);
        }
        if peak < NEGLIGIBLE {
            return Ok(ProbabilitySeries::from_parts(p1.bin_width(), d1));
        }
        if n < max_terms {
            pn = convolve_window(&pn, p1.values(), len);
            weight *= 0.5;
        }
    }
    let next = convolve_window(&pn, p1.values(), len);
    let residual = next.iter().fold(0.0f64, |m, &p| m.max(weight * 0.5 * p));
    if residual >= ACCEPTABLE_REMAINDER {
        return Err(Error::NonConvergence {
            terms: max_terms,
            residual,
        });
    }
    Ok(ProbabilitySeries::from_parts(p1.bin_width(), d1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::{g2_curve, g_theoretical, SourceModel};

    fn series(values: Vec<f64>) -> ProbabilitySeries {
        ProbabilitySeries::new(0.1, values).unwrap()
    }

    fn geometric_p1(len: usize, p: f64) -> ProbabilitySeries {
        let mut v = vec![0.0; len];
        for (k, x) in v.iter_mut().enumerate().skip(1) {
            *x = p * (1.0 - p).powi(k as i32 - 1);
        }
        series(v)
    }

    #[test]
    fn coherent_converges_to_one() {
        let model = SourceModel::coherent(0.04).unwrap();
        let g = g_theoretical(&model, 0.1, 1001).unwrap();
        let curve = correction_from_g(&g, 0.004, 60).unwrap();
        for (k, v) in curve.values().iter().enumerate() {
            assert!((v - 1.0).abs() < 1e-6, "bin {k}: {v}");
        }
    }

    #[test]
    fn first_order_is_p1_over_rate() {
        let model = SourceModel::chaotic(0.04, 0.5).unwrap();
        let g = g_theoretical(&model, 0.1, 200).unwrap();
        let curve = correction_from_g(&g, 0.004, 1).unwrap();
        let p1 = renewal_invert(&g).unwrap();
        for (c, p) in curve.values().iter().zip(p1.values()) {
            assert!((c - p / 0.004).abs() < 1e-15);
        }
        // P1[0] = G[0]/(1+G[0]) differs from G[0] by O(G[0]) relative.
        assert!((curve.values()[0] - 2.0).abs() <= 2.0 * 0.008 + 1e-12);
    }

    #[test]
    fn ninth_order_chaotic_within_five_percent() {
        let model = SourceModel::chaotic(0.04, 0.5).unwrap();
        let g = g_theoretical(&model, 0.1, 1001).unwrap();
        let truth = g2_curve(&model, 0.1, 1001).unwrap();
        let curve = correction_from_g(&g, 0.004, 9).unwrap();
        for k in 0..=500 {
            let delta = (curve.values()[k] - truth.values()[k]).abs() / truth.values()[k];
            assert!(delta <= 0.05, "bin {k}: {delta}");
        }
    }

    #[test]
    fn partial_sums_increase_with_order_and_stay_below_g() {
        let model = SourceModel::chaotic(0.04, 0.5).unwrap();
        let g = g_theoretical(&model, 0.1, 1001).unwrap();
        let mut previous = vec![0.0; 1001];
        for order in 1..=12 {
            let curve = correction_from_g(&g, 0.004, order).unwrap();
            for ((c, p), gk) in curve.values().iter().zip(&previous).zip(g.values()) {
                assert!(c >= p);
                assert!(c * 0.004 <= gk * (1.0 + 1e-12));
            }
            previous = curve.into_values();
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let g = series(vec![0.01; 8]);
        assert!(correction_from_g(&g, 0.0, 9).is_err());
        assert!(correction_from_g(&g, 0.01, 0).is_err());
        let bad = CorrectionConfig {
            order: 9,
            mean_rate_mode: MeanRateMode::Given { rate_per_ns: -1.0 },
        };
        assert!(correction_from_d1(&g, &bad, 0.01).is_err());
        assert!(correction_from_d1(&g, &CorrectionConfig::with_order(0), 0.01).is_err());
        assert!(correction_from_d1(&g, &CorrectionConfig::default(), 0.0).is_err());
    }

    #[test]
    fn d1_of_shifted_delta() {
        let p1 = ProbabilitySeries::delta(0.1, 20, 3, 0.2).unwrap();
        let d1 = d1_from_p1(&p1, 50).unwrap();
        let expect = |k: usize| match k {
            3 => 0.1,
            6 => 0.01,
            9 => 0.001,
            12 => 0.0001,
            15 => 0.00001,
            18 => 0.000001,
            _ => 0.0,
        };
        for k in 0..20 {
            assert!((d1.values()[k] - expect(k)).abs() < 1e-16, "bin {k}");
        }
    }

    #[test]
    fn d1_of_zero_is_zero() {
        let p1 = ProbabilitySeries::zeros(0.1, 16).unwrap();
        assert_eq!(d1_from_p1(&p1, 10).unwrap(), p1);
        let curve = correction_from_d1(&p1, &CorrectionConfig::default(), 0.01).unwrap();
        assert!(curve.values().iter().all(|&v| v == 0.0));
        let tail = CorrectionConfig {
            order: 9,
            mean_rate_mode: MeanRateMode::TailNormalized,
        };
        let curve = correction_from_d1(&p1, &tail, 0.0).unwrap();
        assert!(curve.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn d1_non_convergence() {
        let p1 = ProbabilitySeries::new(0.1, vec![0.6, 0.3, 0.1]).unwrap();
        assert!(matches!(
            d1_from_p1(&p1, 3),
            Err(Error::NonConvergence { terms: 3, .. })
        ));
        assert!(d1_from_p1(&p1, 200).is_ok());
    }

    #[test]
    fn d1_geometric_reproduces_flat_rate() {
        let p1 = geometric_p1(300, 0.1);
        let d1 = d1_from_p1(&p1, 1000).unwrap();
        let curve = correction_from_d1(
            &d1,
            &CorrectionConfig {
                order: 300,
                mean_rate_mode: MeanRateMode::Given { rate_per_ns: 1.0 },
            },
            0.0,
        )
        .unwrap();
        // Σ Pn = 0.1 in every bin k >= 1; the Given rate of 1/ns is 0.1/bin.
        for k in 1..300 {
            assert!((curve.values()[k] * 0.1 - 0.1).abs() < 1e-9, "bin {k}");
        }
    }

    #[test]
    fn d1_path_matches_g_path() {
        let model = SourceModel::chaotic(0.04, 0.5).unwrap();
        let g = g_theoretical(&model, 0.1, 1001).unwrap();
        let p1 = renewal_invert(&g).unwrap();
        let d1 = d1_from_p1(&p1, 200).unwrap();
        let from_d1 = correction_from_d1(
            &d1,
            &CorrectionConfig {
                order: 40,
                mean_rate_mode: MeanRateMode::Given { rate_per_ns: 0.04 },
            },
            0.0,
        )
        .unwrap();
        let from_g = correction_from_g(&g, 0.004, 40).unwrap();
        for k in 0..1001 {
            assert!(
                (from_d1.values()[k] - from_g.values()[k]).abs() < 1e-9,
                "bin {k}"
            );
        }
    }

    #[test]
    fn tail_normalization_matches_known_rate() {
        let model = SourceModel::chaotic(0.04, 0.5).unwrap();
        let g = g_theoretical(&model, 0.1, 1001).unwrap();
        let d1 = d1_from_p1(&renewal_invert(&g).unwrap(), 200).unwrap();
        let known = correction_from_d1(
            &d1,
            &CorrectionConfig {
                order: 9,
                mean_rate_mode: MeanRateMode::Given { rate_per_ns: 0.04 },
            },
            0.0,
        )
        .unwrap();
        let tail = correction_from_d1(
            &d1,
            &CorrectionConfig {
                order: 9,
                mean_rate_mode: MeanRateMode::TailNormalized,
            },
            0.0,
        )
        .unwrap();
        for k in 0..1001 {
            let rel = (tail.values()[k] - known.values()[k]).abs() / known.values()[k];
            assert!(rel < 0.01, "bin {k}: {rel}");
        }
        assert!((tail.values()[0] - 2.0).abs() < 0.02);
    }

    #[test]
    fn tail_normalization_needs_long_window() {
        let model = SourceModel::chaotic(0.04, 0.5).unwrap();
        // 5 ns window is shorter than 20·τc.
        let g = g_theoretical(&model, 0.1, 50).unwrap();
        let d1 = d1_from_p1(&renewal_invert(&g).unwrap(), 200).unwrap();
        let config = CorrectionConfig {
            order: 9,
            mean_rate_mode: MeanRateMode::TailNormalized,
        };
        assert!(matches!(
            correction_from_d1(&d1, &config, 0.0),
            Err(Error::TailNotFlat { .. })
        ));
    }
}
