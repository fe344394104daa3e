use super::detector::{apply_detector, DetectorConfig, Diagnostic};
use super::intensity::{IntensityProcess, MAX_STEP_FRACTION};
use super::photons::{beam_split, Thinning};
use super::seed::{derive_seed, SeedLabel};
use super::start_stop::start_stop_histogram;
use super::stream::PhotonStream;
use crate::correlator::IntervalHistogram;
use crate::error::{ensure_positive, Error, Result};
use crate::theory::SourceModel;

/// Intensity samples generated per chunk in [`run_hbt`].
const CHUNK: usize = 1 << 20;

/// Output of one simulated HBT acquisition.
#[derive(Debug, Clone, PartialEq)]
pub struct HbtRun {
    pub histogram: IntervalHistogram,
    /// Registered events of the start and stop detectors.
    pub arms: [PhotonStream; 2],
    pub diagnostics: Vec<Diagnostic>,
}

/// Intensity grid step used by [`run_hbt`]: τc/20 for light with a chaotic
/// component, 1 ns for coherent light.
pub fn default_time_step(model: &SourceModel) -> f64 {
    if model.chaotic_fraction > 0.0 {
        model.coherence_time * MAX_STEP_FRACTION
    } else {
        1.0
    }
}

/// Simulates a full acquisition: intensity → photons → 50:50 split → two
/// detectors → start–stop histogram with the detector's window.
///
/// The intensity is generated and thinned in chunks so long acquisitions
/// never materialize the whole trace; the result equals sampling the whole
/// trace at once with per-chunk peak rates. Component seeds come from
/// [`derive_seed`], so the output depends only on the arguments.
pub fn run_hbt(
    model: &SourceModel,
    detector: &DetectorConfig,
    duration: f64,
    bin_width: f64,
    seed: u64,
) -> Result<HbtRun> {
    model.validate()?;
    detector.validate()?;
    ensure_positive("duration", duration)?;
    ensure_positive("bin_width", bin_width)?;
    if bin_width * 1e3 < detector.resolution as f64 {
        return Err(Error::invalid(
            "bin_width",
            format!(
                "{bin_width} ns is finer than the detector resolution of {} ps",
                detector.resolution
            ),
        ));
    }

    let dt = default_time_step(model);
    let duration_ps = (duration * 1e3).round() as u64;
    let steps = (duration / dt - 1e-9).ceil().max(1.0) as usize;

    let mut process = IntensityProcess::new(model, dt, derive_seed(seed, SeedLabel::Intensity))?;
    let mut thinning = Thinning::new(derive_seed(seed, SeedLabel::Photons));
    let mut photons = Vec::with_capacity((model.mean_rate * duration * 1.1) as usize + 16);
    let mut buf = vec![0.0; CHUNK.min(steps)];
    let mut done = 0;
    while done < steps {
        let n = CHUNK.min(steps - done);
        process.fill(&mut buf[..n]);
        thinning.sample_into(&buf[..n], dt, done as f64 * dt, duration_ps, &mut photons);
        done += n;
    }
    let photons = PhotonStream::from_sorted(photons, duration_ps);

    let (first, second) = beam_split(&photons, derive_seed(seed, SeedLabel::BeamSplitter));
    let start = apply_detector(
        &first,
        detector,
        derive_seed(seed, SeedLabel::DetectorStart),
    )?;
    let stop = apply_detector(
        &second,
        detector,
        derive_seed(seed, SeedLabel::DetectorStop),
    )?;
    let histogram = start_stop_histogram(&start.stream, &stop.stream, bin_width, detector.window)?;

    let mut diagnostics = start.diagnostics;
    diagnostics.extend(stop.diagnostics);
    Ok(HbtRun {
        histogram,
        arms: [start.stream, stop.stream],
        diagnostics,
    })
}
