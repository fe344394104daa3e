use super::stream::PhotonStream;
use crate::correlator::IntervalHistogram;
use crate::error::{Error, Result};

/// Start–stop interval histogram: for each start, the first stop strictly
/// later is paired with it and counted if the interval is shorter than
/// `window`. Every start contributes to `start_count`, paired or not.
pub fn start_stop_histogram(
    starts: &PhotonStream,
    stops: &PhotonStream,
    bin_width: f64,
    window: f64,
) -> Result<IntervalHistogram> {
    if starts.duration() != stops.duration() {
        return Err(Error::invalid(
            "stops",
            format!(
                "durations differ: {} ps vs {} ps",
                starts.duration(),
                stops.duration()
            ),
        ));
    }
    let mut hist = IntervalHistogram::empty(bin_width, window)?;
    let bin_ps = bin_width * 1e3;
    let window_ps = window * 1e3;
    let bins = hist.counts().len();
    let stops = stops.timestamps();
    let mut j = 0;
    for &start in starts.timestamps() {
        while j < stops.len() && stops[j] <= start {
            j += 1;
        }
        let Some(&stop) = stops.get(j) else {
            continue;
        };
        let interval = (stop - start) as f64;
        if interval < window_ps {
            let bin = ((interval / bin_ps) as usize).min(bins - 1);
            hist.record(bin);
        }
    }
    hist.add_starts(starts.len() as u64);
    Ok(hist)
}
