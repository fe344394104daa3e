use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::relative::relative_error;
use crate::correlator::correction_from_g;
use crate::error::{ensure_positive, Error, Result};
use crate::theory::{g2_curve, g_theoretical, SourceModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Mean photon rate, photons per ns.
    Intensity,
    /// Coherence time, ns.
    CoherenceTime,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Intensity => "intensity",
            SweepAxis::CoherenceTime => "coherence_time",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

impl Sweep {
    /// `steps` evenly spaced values from `from` to `to` inclusive.
    pub fn linspace(axis: SweepAxis, from: f64, to: f64, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::invalid("steps", "must be at least 1"));
        }
        let values = if steps == 1 {
            vec![from]
        } else {
            let step = (to - from) / (steps - 1) as f64;
            (0..steps).map(|i| from + step * i as f64).collect()
        };
        Ok(Self { axis, values })
    }
}

/// Delays `k·bin_width` for `k = 0..num_bins`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayGrid {
    pub bin_width: f64,
    pub num_bins: usize,
}

impl DelayGrid {
    /// Grid from 0 to `window` inclusive.
    pub fn up_to(bin_width: f64, window: f64) -> Result<Self> {
        ensure_positive("bin_width", bin_width)?;
        ensure_positive("window", window)?;
        Ok(Self {
            bin_width,
            num_bins: (window / bin_width + 1e-9).floor() as usize + 1,
        })
    }

    pub fn delays(&self) -> Vec<f64> {
        (0..self.num_bins)
            .map(|k| k as f64 * self.bin_width)
            .collect()
    }
}

/// Relative error (percent) of the truncated correction over a parameter
/// sweep: `delta[i][k]` belongs to `axis_values[i]` and `delays[k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorSurface {
    pub axis: SweepAxis,
    pub axis_values: Vec<f64>,
    pub delays: Vec<f64>,
    pub delta: Vec<Vec<f64>>,
}

impl ErrorSurface {
    /// Largest δ of row `i` over delays up to `max_delay` ns.
    pub fn max_within(&self, i: usize, max_delay: f64) -> f64 {
        self.delta[i]
            .iter()
            .zip(&self.delays)
            .take_while(|(_, &d)| d <= max_delay + 1e-9)
            .map(|(&v, _)| v)
            .fold(0.0, f64::max)
    }

    /// Range of δ across the sweep at delay index `k`.
    pub fn spread_at(&self, k: usize) -> f64 {
        let column = self.delta.iter().map(|row| row[k]);
        let (lo, hi) = column.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
        hi - lo
    }

    /// Index of the grid delay closest to `delay`.
    pub fn delay_index(&self, delay: f64) -> Option<usize> {
        self.delays
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - delay).abs().total_cmp(&(b.1 - delay).abs()))
            .map(|(k, _)| k)
    }
}

/// Sweeps one source parameter, computing for each value the order-`order`
/// correction of the theoretical G and its relative error against the exact
/// g2. Points are independent and evaluated in parallel; rows keep the sweep
/// order.
pub fn error_surface(
    sweep: &Sweep,
    base: &SourceModel,
    order: usize,
    grid: &DelayGrid,
) -> Result<ErrorSurface> {
    base.validate()?;
    ensure_positive("bin_width", grid.bin_width)?;
    if grid.num_bins == 0 {
        return Err(Error::invalid("num_bins", "must be at least 1"));
    }
    let delta = sweep
        .values
        .par_iter()
        .map(|&value| {
            let mut model = *base;
            match sweep.axis {
                SweepAxis::Intensity => model.mean_rate = value,
                SweepAxis::CoherenceTime => model.coherence_time = value,
            }
            model.validate()?;
            let g = g_theoretical(&model, grid.bin_width, grid.num_bins)?;
            let estimate = correction_from_g(&g, model.mean_rate * grid.bin_width, order)?;
            let truth = g2_curve(&model, grid.bin_width, grid.num_bins)?;
            relative_error(&estimate, &truth)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ErrorSurface {
        axis: sweep.axis,
        axis_values: sweep.values.clone(),
        delays: grid.delays(),
        delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> DelayGrid {
        DelayGrid::up_to(0.1, 100.0).unwrap()
    }

    #[test]
    fn grid_includes_window_end() {
        let g = grid();
        assert_eq!(g.num_bins, 1001);
        assert!((g.delays()[1000] - 100.0).abs() < 1e-9);
    }

    #[test]
    fn linspace_endpoints() {
        let s = Sweep::linspace(SweepAxis::Intensity, 0.03, 0.05, 5).unwrap();
        assert_eq!(s.values.len(), 5);
        assert!((s.values[4] - 0.05).abs() < 1e-15);
        assert_eq!(
            Sweep::linspace(SweepAxis::Intensity, 0.04, 0.05, 1)
                .unwrap()
                .values,
            vec![0.04]
        );
        assert!(Sweep::linspace(SweepAxis::Intensity, 0.03, 0.05, 0).is_err());
    }

    #[test]
    fn single_point_matches_relative_error() {
        let base = SourceModel::chaotic(0.04, 0.5).unwrap();
        let sweep = Sweep {
            axis: SweepAxis::Intensity,
            values: vec![0.04],
        };
        let surface = error_surface(&sweep, &base, 9, &grid()).unwrap();
        assert_eq!(surface.delta.len(), 1);
        let g = g_theoretical(&base, 0.1, 1001).unwrap();
        let est = correction_from_g(&g, 0.004, 9).unwrap();
        let truth = g2_curve(&base, 0.1, 1001).unwrap();
        assert_eq!(surface.delta[0], relative_error(&est, &truth).unwrap());
    }

    #[test]
    fn deterministic() {
        let base = SourceModel::chaotic(0.04, 1.0).unwrap();
        let sweep = Sweep::linspace(SweepAxis::Intensity, 0.03, 0.05, 5).unwrap();
        let a = error_surface(&sweep, &base, 9, &grid()).unwrap();
        let b = error_surface(&sweep, &base, 9, &grid()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn larger_intensity_larger_error() {
        let base = SourceModel::chaotic(0.04, 1.0).unwrap();
        let sweep = Sweep::linspace(SweepAxis::Intensity, 0.03, 0.05, 3).unwrap();
        let s = error_surface(&sweep, &base, 9, &grid()).unwrap();
        assert!(s.max_within(0, 100.0) <= s.max_within(1, 100.0));
        assert!(s.max_within(1, 100.0) <= s.max_within(2, 100.0));
    }

    #[test]
    fn rejects_invalid_sweep_values() {
        let base = SourceModel::chaotic(0.04, 1.0).unwrap();
        let sweep = Sweep {
            axis: SweepAxis::CoherenceTime,
            values: vec![0.5, -1.0],
        };
        assert!(error_surface(&sweep, &base, 9, &grid()).is_err());
        let sweep = Sweep {
            axis: SweepAxis::Intensity,
            values: vec![6.0],
        };
        assert!(error_surface(&sweep, &base, 9, &grid()).is_err());
    }
}
