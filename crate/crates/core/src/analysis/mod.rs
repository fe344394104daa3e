//! Relative-error analysis of truncated corrections, bunching fits and
//! spectral bandwidth.

mod fit;
mod relative;
mod spectrum;
mod surface;

pub use fit::{fit_bunching, FitOptions, FitResult, Weighting, MAX_FIT_ITERATIONS};
pub use relative::relative_error;
pub use spectrum::{
    bandwidth_from_spectrum, effective_bandwidth, power_spectrum, PowerSpectrum, SpectrumConfig,
    ENERGY_FRACTION,
};
pub use surface::{error_surface, DelayGrid, ErrorSurface, Sweep, SweepAxis};
