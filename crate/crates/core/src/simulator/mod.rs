//! Monte Carlo photon streams and the HBT detection chain.
//!
//! Light is generated as a doubly stochastic Poisson process: a complex
//! mean-reverting Gaussian field sets the intensity, photons are drawn from
//! it by thinning, split 50:50, passed through detector models and finally
//! paired into a start–stop interval histogram.
//!
//! Every stochastic stage takes its own `u64` seed. [`run_hbt`] derives these
//! from one master seed with [`derive_seed`], so a run is reproducible from
//! that single number.

mod detector;
mod hbt;
mod intensity;
mod photons;
mod seed;
mod start_stop;
mod stream;

pub use detector::{
    apply_detector, dead_time_diagnostic, DetectorConfig, DetectorOutput, Diagnostic,
    DEAD_TIME_WARNING_THRESHOLD, REALISTIC_DARK_RATE,
};
pub use hbt::{default_time_step, run_hbt, HbtRun};
pub use intensity::{simulate_intensity, IntensityProcess, IntensityTrace};
pub use photons::{beam_split, sample_photons};
pub use seed::{derive_seed, rng_from_seed, SeedLabel};
pub use start_stop::start_stop_histogram;
pub use stream::PhotonStream;
