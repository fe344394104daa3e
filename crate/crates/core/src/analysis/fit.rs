use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::CorrelationCurve;

pub const MAX_FIT_ITERATIONS: usize = 200;

/// Relative parameter step below which the fit is considered converged.
const STEP_TOLERANCE: f64 = 1e-10;

/// Damping beyond which no descent direction is left; the current point is
/// a minimum to working precision.
const MAX_DAMPING: f64 = 1e14;

/// Minimum excess over 1 a curve needs before a bunching fit is attempted.
const MIN_BUNCHING: f64 = 1e-3;

const MIN_BINS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    #[default]
    Unweighted,
    /// Variance proportional to the curve value, as for shot-noise limited
    /// histogram counts.
    Poisson,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Starting `(b, τc)`; derived from the curve when absent.
    pub initial: Option<(f64, f64)>,
    pub weighting: Weighting,
    /// Position of each sample inside its bin, in bins: 0 for curves sampled
    /// at `kΔ`, 0.5 for histogram-derived curves whose bins average over
    /// `[kΔ, (k+1)Δ)`.
    pub delay_offset: f64,
    /// Only bins with delay up to this value (ns) are fitted.
    pub max_delay: Option<f64>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            initial: None,
            weighting: Weighting::Unweighted,
            delay_offset: 0.0,
            max_delay: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Bunching amplitude.
    pub b: f64,
    /// Coherence time, ns.
    pub tau_c: f64,
    /// Unweighted RMS of `curve − model` over the fitted bins.
    pub residual_rms: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Least-squares fit of `1 + b·exp(−2τ/τc)` with a Levenberg–Marquardt
/// iteration on the analytic Jacobian.
pub fn fit_bunching(curve: &CorrelationCurve, options: &FitOptions) -> Result<FitResult> {
    let len = match options.max_delay {
        Some(max_delay) => curve.last_bin_within(max_delay).map_or(0, |k| k + 1),
        None => curve.len(),
    };
    let y = &curve.values()[..len];
    if y.len() < MIN_BINS {
        return Err(Error::InsufficientData(format!(
            "{} bins to fit, need at least {MIN_BINS}",
            y.len()
        )));
    }
    let max = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max < 1.0 + MIN_BUNCHING {
        return Err(Error::NoBunching { max });
    }
    let t: Vec<f64> = (0..len)
        .map(|k| (k as f64 + options.delay_offset) * curve.bin_width())
        .collect();

    let b0 = if y[0] - 1.0 > MIN_BUNCHING {
        y[0] - 1.0
    } else {
        max - 1.0
    };
    let tau_est = decay_time(y, &t, b0, 0.5).map(|half| 2.0 * half / std::f64::consts::LN_2);
    let span = t[len - 1] - t[0];
    match tau_est {
        Some(tau) if span >= 3.0 * tau => {}
        Some(tau) => {
            return Err(Error::InsufficientData(format!(
                "curve spans {span} ns, need 3·τc ≈ {} ns",
                3.0 * tau
            )))
        }
        None => {
            return Err(Error::InsufficientData(
                "bunching excess never decays to half its initial value".into(),
            ))
        }
    }

    let (b_init, tau_init) = options.initial.unwrap_or_else(|| {
        let tau = decay_time(y, &t, b0, (-2.0f64).exp())
            .filter(|&tau| tau > 0.0)
            .unwrap_or(curve.bin_width());
        (b0, tau)
    });
    if !(tau_init > 0.0 && b_init.is_finite()) {
        return Err(Error::invalid("initial", "need finite b and τc > 0"));
    }

    let weights: Vec<f64> = match options.weighting {
        Weighting::Unweighted => vec![1.0; len],
        Weighting::Poisson => y.iter().map(|&v| 1.0 / v.max(1e-12)).collect(),
    };

    let problem = Problem {
        t: &t,
        y,
        w: &weights,
    };
    let (b, tau_c, iterations) = problem.solve(b_init, tau_init)?;
    if b <= 0.0 || tau_c < 0.25 * curve.bin_width() {
        // The best exponential is a dip, or a spike narrower than a bin:
        // neither is a resolved bunching peak.
        return Err(Error::NoBunching { max });
    }
    let residual_rms = (y
        .iter()
        .zip(&t)
        .map(|(&yk, &tk)| (yk - model(b, tau_c, tk)).powi(2))
        .sum::<f64>()
        / len as f64)
        .sqrt();
    Ok(FitResult {
        b,
        tau_c,
        residual_rms,
        converged: true,
        iterations,
    })
}

fn model(b: f64, tau_c: f64, t: f64) -> f64 {
    1.0 + b * (-2.0 * t / tau_c).exp()
}

/// Delay (relative to the first sample) at which `y − 1` first falls to
/// `fraction·excess`.
fn decay_time(y: &[f64], t: &[f64], excess: f64, fraction: f64) -> Option<f64> {
    y.iter()
        .position(|&v| v - 1.0 <= fraction * excess)
        .map(|k| t[k] - t[0])
}

struct Problem<'a> {
    t: &'a [f64],
    y: &'a [f64],
    w: &'a [f64],
}

impl Problem<'_> {
    fn cost(&self, b: f64, tau: f64) -> f64 {
        self.t
            .iter()
            .zip(self.y)
            .zip(self.w)
            .map(|((&t, &y), &w)| w * (y - model(b, tau, t)).powi(2))
            .sum()
    }

    /// Returns `(JᵀWJ, JᵀWr)` for residuals `r = y − f`.
    fn normal_equations(&self, b: f64, tau: f64) -> ([[f64; 2]; 2], [f64; 2]) {
        let mut jtj = [[0.0; 2]; 2];
        let mut jtr = [0.0; 2];
        for ((&t, &y), &w) in self.t.iter().zip(self.y).zip(self.w) {
            let e = (-2.0 * t / tau).exp();
            let r = y - (1.0 + b * e);
            let db = e;
            let dtau = b * e * 2.0 * t / (tau * tau);
            jtj[0][0] += w * db * db;
            jtj[0][1] += w * db * dtau;
            jtj[1][1] += w * dtau * dtau;
            jtr[0] += w * db * r;
            jtr[1] += w * dtau * r;
        }
        jtj[1][0] = jtj[0][1];
        (jtj, jtr)
    }

    fn solve(&self, mut b: f64, mut tau: f64) -> Result<(f64, f64, usize)> {
        let mut lambda = 1e-3;
        let mut cost = self.cost(b, tau);
        for iteration in 1..=MAX_FIT_ITERATIONS {
            let (a, g) = self.normal_equations(b, tau);
            loop {
                let m00 = a[0][0] * (1.0 + lambda);
                let m11 = a[1][1] * (1.0 + lambda);
                let det = m00 * m11 - a[0][1] * a[1][0];
                let step = if det.abs() > 0.0 && det.is_finite() {
                    [
                        (g[0] * m11 - a[0][1] * g[1]) / det,
                        (m00 * g[1] - a[1][0] * g[0]) / det,
                    ]
                } else {
                    [f64::NAN, f64::NAN]
                };
                let (nb, ntau) = (b + step[0], tau + step[1]);
                let candidate = if ntau > 0.0 && nb.is_finite() {
                    self.cost(nb, ntau)
                } else {
                    f64::INFINITY
                };
                if candidate <= cost {
                    let small = step[0].abs() <= STEP_TOLERANCE * b.abs().max(1e-12)
                        && step[1].abs() <= STEP_TOLERANCE * tau;
                    b = nb;
                    tau = ntau;
                    cost = candidate;
                    lambda = (lambda * 0.1).max(1e-12);
                    if small {
                        return Ok((b, tau, iteration));
                    }
                    break;
                }
                lambda *= 10.0;
                if lambda > MAX_DAMPING {
                    return Ok((b, tau, iteration));
                }
            }
        }
        Err(Error::FitDidNotConverge {
            iterations: MAX_FIT_ITERATIONS,
        })
    }
}
