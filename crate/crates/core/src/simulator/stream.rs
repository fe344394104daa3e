use crate::error::{Error, Result};

/// Sorted detection timestamps in picoseconds on `[0, duration)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PhotonStream {
    timestamps: Vec<u64>,
    duration: u64,
}

impl PhotonStream {
    pub fn new(timestamps: Vec<u64>, duration: u64) -> Result<Self> {
        if let Some(i) = timestamps.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::invalid(
                "timestamps",
                format!("not sorted at index {}", i + 1),
            ));
        }
        if let Some(&last) = timestamps.last() {
            if last >= duration {
                return Err(Error::invalid(
                    "timestamps",
                    format!("timestamp {last} ps lies outside the {duration} ps acquisition"),
                ));
            }
        }
        Ok(Self {
            timestamps,
            duration,
        })
    }

    pub(crate) fn from_sorted(timestamps: Vec<u64>, duration: u64) -> Self {
        debug_assert!(timestamps.windows(2).all(|w| w[0] <= w[1]));
        debug_assert!(timestamps.last().is_none_or(|&t| t < duration));
        Self {
            timestamps,
            duration,
        }
    }

    pub fn timestamps(&self) -> &[u64] {
        &self.timestamps
    }

    pub fn into_timestamps(self) -> Vec<u64> {
        self.timestamps
    }

    /// Acquisition length in ps.
    pub fn duration(&self) -> u64 {
        self.duration
    }

    pub fn duration_ns(&self) -> f64 {
        self.duration as f64 * 1e-3
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    /// Smallest gap between consecutive events, if there are at least two.
    pub fn min_gap(&self) -> Option<u64> {
        self.timestamps.windows(2).map(|w| w[1] - w[0]).min()
    }

    /// Time-ordered union of two streams over the longer duration.
    pub fn merge(&self, other: &PhotonStream) -> PhotonStream {
        Self::from_sorted(
            merge_sorted(&self.timestamps, &other.timestamps),
            self.duration.max(other.duration),
        )
    }
}

pub(crate) fn merge_sorted(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}
