use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use super::intensity::IntensityTrace;
use super::seed::rng_from_seed;
use super::stream::PhotonStream;

/// Draws photons from a piecewise-constant intensity by thinning: candidate
/// arrivals at the peak rate, each kept with probability `I(t)/I_max`.
pub(crate) struct Thinning {
    rng: ChaCha8Rng,
}

impl Thinning {
    pub(crate) fn new(seed: u64) -> Self {
        Self {
            rng: rng_from_seed(seed),
        }
    }

    /// Appends photon times (ps) for `samples`, whose first step begins at
    /// `offset_ns`. Times at or beyond `limit_ps` are discarded.
    pub(crate) fn sample_into(
        &mut self,
        samples: &[f64],
        dt: f64,
        offset_ns: f64,
        limit_ps: u64,
        out: &mut Vec<u64>,
    ) {
        let peak = samples.iter().copied().fold(0.0, f64::max);
        if peak <= 0.0 || samples.is_empty() {
            return;
        }
        let span = samples.len() as f64 * dt;
        let mut t = 0.0;
        loop {
            let gap: f64 = Exp1.sample(&mut self.rng);
            t += gap / peak;
            if t >= span {
                break;
            }
            let idx = ((t / dt) as usize).min(samples.len() - 1);
            let accept: f64 = self.rng.random();
            if accept * peak < samples[idx] {
                let ps = ((offset_ns + t) * 1e3).floor() as u64;
                if ps < limit_ps {
                    out.push(ps);
                }
            }
        }
    }
}

/// Inhomogeneous Poisson photon arrivals for `trace`; the expected count is
/// `∫ I dt`.
pub fn sample_photons(trace: &IntensityTrace, seed: u64) -> PhotonStream {
    let duration = (trace.duration_ns() * 1e3).round() as u64;
    let mut out = Vec::new();
    Thinning::new(seed).sample_into(trace.samples(), trace.dt(), 0.0, duration, &mut out);
    PhotonStream::from_sorted(out, duration)
}

/// Routes each photon to one of two arms with probability ½.
pub fn beam_split(stream: &PhotonStream, seed: u64) -> (PhotonStream, PhotonStream) {
    let mut rng = rng_from_seed(seed);
    let mut first = Vec::with_capacity(stream.len() / 2 + 1);
    let mut second = Vec::with_capacity(stream.len() / 2 + 1);
    for &t in stream.timestamps() {
        if rng.random_bool(0.5) {
            first.push(t);
        } else {
            second.push(t);
        }
    }
    (
        PhotonStream::from_sorted(first, stream.duration()),
        PhotonStream::from_sorted(second, stream.duration()),
    )
}
