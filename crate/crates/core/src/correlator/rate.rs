use crate::error::{ensure_positive, Error, Result};
use crate::simulator::PhotonStream;

/// Mean photon rate per bin estimated from detector counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    pub per_bin: f64,
    pub total_counts: u64,
    pub duration_ns: f64,
}

impl RateEstimate {
    /// No counts were recorded; the estimate cannot normalize a curve.
    pub fn is_degenerate(&self) -> bool {
        self.total_counts == 0
    }

    pub fn per_ns(&self) -> f64 {
        self.total_counts as f64 / self.duration_ns
    }
}

/// `Ī_bin = (counts of all streams) / (duration / bin_width)`.
///
/// Streams from the two arms of one acquisition share a duration; the
/// longest one is used.
pub fn estimate_mean_rate(streams: &[&PhotonStream], bin_width: f64) -> Result<RateEstimate> {
    let total: u64 = streams.iter().map(|s| s.len() as u64).sum();
    let duration_ps = streams.iter().map(|s| s.duration()).max().unwrap_or(0);
    mean_rate_from_counts(total, duration_ps as f64 * 1e-3, bin_width)
}

pub fn mean_rate_from_counts(
    total_counts: u64,
    duration_ns: f64,
    bin_width: f64,
) -> Result<RateEstimate> {
    ensure_positive("bin_width", bin_width)?;
    if !(duration_ns.is_finite() && duration_ns > 0.0) {
        return Err(Error::invalid("duration", "total duration must be > 0"));
    }
    Ok(RateEstimate {
        per_bin: total_counts as f64 * bin_width / duration_ns,
        total_counts,
        duration_ns,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stream(n: u64, duration_ps: u64) -> PhotonStream {
        let step = duration_ps / n.max(1);
        PhotonStream::new((0..n).map(|i| i * step).collect(), duration_ps).unwrap()
    }

    #[test]
    fn examples() {
        // 400 000 counts over 10 ms at 0.1 ns.
        let s = stream(400_000, 10_000_000_000);
        let r = estimate_mean_rate(&[&s], 0.1).unwrap();
        assert!((r.per_bin - 0.004).abs() < 1e-15);
        assert!((r.per_ns() - 0.04).abs() < 1e-15);

        let empty = PhotonStream::new(Vec::new(), 1_000_000).unwrap();
        let r = estimate_mean_rate(&[&empty], 0.1).unwrap();
        assert_eq!(r.per_bin, 0.0);
        assert!(r.is_degenerate());

        // 2 x 135 000 counts over 1 s at 65 ps: 270 kcounts/s x 65 ps.
        let a = stream(135_000, 1_000_000_000_000);
        let b = stream(135_000, 1_000_000_000_000);
        let r = estimate_mean_rate(&[&a, &b], 0.065).unwrap();
        assert!((r.per_bin - 1.755e-5).abs() < 1e-18);
    }

    #[test]
    fn zero_duration() {
        let s = PhotonStream::new(Vec::new(), 0).unwrap();
        assert!(estimate_mean_rate(&[&s], 0.1).is_err());
        assert!(estimate_mean_rate(&[], 0.1).is_err());
    }
}
