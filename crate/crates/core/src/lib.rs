//! Photon-correlation toolkit for Hanbury Brown–Twiss measurements.
//!
//! The measured start–stop interval distribution of an HBT setup is not
//! g2(τ) itself: beyond the first photon, later photons are hidden behind
//! earlier ones. This crate reconstructs g2 by summing self-convolutions of
//! the interval distribution up to a finite order, and provides everything
//! around that step:
//!
//! * [`theory`]: closed-form g1/g2 for chaotic, coherent and mixed light.
//! * [`correlator`]: convolutions, renewal inversion and the truncated
//!   corrections from a theoretical G or a measured D1.
//! * [`simulator`]: Monte Carlo photon streams, beam splitter, detectors and
//!   start–stop histogramming.
//! * [`analysis`]: relative-error surfaces, bunching fits and the 80 %
//!   effective bandwidth.
//! * [`io`]: CSV, JSON and time-tag file formats.
//!
//! Units: times in ns (photon timestamps in integer ps), rates in photons
//! per ns, and all series values per bin.
//!
//! ```
//! use hbt_core::correlator::correction_from_g;
//! use hbt_core::theory::{g_theoretical, SourceModel};
//!
//! let light = SourceModel::chaotic(0.04, 0.5)?;
//! let g = g_theoretical(&light, 0.1, 1001)?;
//! let g9 = correction_from_g(&g, 0.04 * 0.1, 9)?;
//! assert!((g9.values()[0] - 2.0).abs() < 0.02);
//! # Ok::<(), hbt_core::Error>(())
//! ```

pub mod analysis;
pub mod correlator;
mod error;
pub mod io;
mod series;
pub mod simulator;
pub mod theory;

pub use error::{Error, Result};
pub use series::{CorrelationCurve, ProbabilitySeries};

pub use analysis::{ErrorSurface, FitResult};
pub use correlator::{CorrectionConfig, IntervalHistogram, MeanRateMode};
pub use simulator::{DetectorConfig, PhotonStream};
pub use theory::SourceModel;
