use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::series::ProbabilitySeries;

/// Raw start–stop interval counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalHistogram {
    bin_width: OrderedNs,
    counts: Vec<u64>,
    start_count: u64,
    window: OrderedNs,
}

/// f64 wrapper so the histogram can derive `Eq`; values are always finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
struct OrderedNs(f64);

impl Eq for OrderedNs {}

impl IntervalHistogram {
    pub fn new(bin_width: f64, counts: Vec<u64>, start_count: u64, window: f64) -> Result<Self> {
        ensure_positive("bin_width", bin_width)?;
        ensure_positive("window", window)?;
        let total: u64 = counts.iter().sum();
        if total > start_count {
            return Err(Error::invalid(
                "counts",
                format!("{total} recorded intervals exceed {start_count} start events"),
            ));
        }
        let span = counts.len() as f64 * bin_width;
        if (span - window).abs() > bin_width * (1.0 + 1e-9) {
            return Err(Error::invalid(
                "window",
                format!(
                    "{} bins of {bin_width} ns do not cover a {window} ns window",
                    counts.len()
                ),
            ));
        }
        Ok(Self {
            bin_width: OrderedNs(bin_width),
            counts,
            start_count,
            window: OrderedNs(window),
        })
    }

    /// Empty histogram covering `window` with `ceil(window / bin_width)` bins.
    pub fn empty(bin_width: f64, window: f64) -> Result<Self> {
        ensure_positive("bin_width", bin_width)?;
        ensure_positive("window", window)?;
        let bins = bin_count(bin_width, window);
        Self::new(bin_width, vec![0; bins], 0, window)
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_width.0
    }

    pub fn window(&self) -> f64 {
        self.window.0
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn start_count(&self) -> u64 {
        self.start_count
    }

    pub fn recorded(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub(crate) fn record(&mut self, bin: usize) {
        self.counts[bin] += 1;
    }

    pub(crate) fn add_starts(&mut self, n: u64) {
        self.start_count += n;
    }

    /// Adds another realization's counts. Exact, associative and commutative.
    pub fn merge(&mut self, other: &IntervalHistogram) -> Result<()> {
        if self.bin_width != other.bin_width
            || self.window != other.window
            || self.counts.len() != other.counts.len()
        {
            return Err(Error::GridMismatch(format!(
                "cannot merge {} x {} ns with {} x {} ns",
                self.counts.len(),
                self.bin_width(),
                other.counts.len(),
                other.bin_width()
            )));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.start_count += other.start_count;
        Ok(())
    }
}

pub(crate) fn bin_count(bin_width: f64, window: f64) -> usize {
    // Tolerate grids like 100 / 0.1 that land a hair above an integer.
    (window / bin_width - 1e-9).ceil().max(1.0) as usize
}

/// Normalizes interval counts by the number of start events: `D1[k] =
/// counts[k] / start_count`.
pub fn histogram_to_d1(h: &IntervalHistogram) -> Result<ProbabilitySeries> {
    if h.start_count == 0 {
        return Err(Error::ZeroStartCount);
    }
    let n = h.start_count as f64;
    ProbabilitySeries::new(
        h.bin_width(),
        h.counts.iter().map(|&c| c as f64 / n).collect(),
    )
}
