//! Discrete self-convolutions, the renewal inversion of the pair histogram,
//! and the truncated order-N reconstruction of g2 from either a theoretical
//! per-bin G or a measured start–stop distribution D1.

mod convolution;
mod correction;
mod histogram;
mod rate;
mod renewal;

pub use convolution::{convolve, convolve_full, self_convolution_series};
pub use correction::{
    correction_from_d1, correction_from_g, d1_from_p1, CorrectionConfig, MeanRateMode,
    DEFAULT_ORDER,
};
pub use histogram::{histogram_to_d1, IntervalHistogram};
pub use rate::{estimate_mean_rate, mean_rate_from_counts, RateEstimate};
pub use renewal::{renewal_invert, NEGATIVE_TOLERANCE};
