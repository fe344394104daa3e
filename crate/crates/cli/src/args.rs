//! Command-line flags. Every parameter flag is optional so that an omitted
//! flag never overrides a value from `--config`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "hbt",
    version,
    about = "HBT photon-correlation simulation and g2 correction"
)]
pub struct Cli {
    /// Output directory.
    #[arg(long, global = true, env = "HBT_OUT_DIR", default_value = ".")]
    pub out: PathBuf,

    /// JSON parameter file: a flat object of parameters or a previous
    /// run.json. Flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
#[command(allow_negative_numbers = true)]
pub enum Command {
    /// Analytic g2 curve and per-bin pair probability G.
    Theory(TheoryArgs),
    /// Monte Carlo HBT acquisition into a start-stop histogram.
    Simulate(SimulateArgs),
    /// Truncated self-convolution correction of a histogram, time tags or G.
    Correct(CorrectArgs),
    /// Fit 1 + b·exp(−2τ/τc) to a g2 curve.
    Fit(FitArgs),
    /// Relative error of the correction over a parameter sweep.
    ErrorSurface(ErrorSurfaceArgs),
    /// Simulate, correct and fit in one run.
    Pipeline(PipelineArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Theory(_) => "theory",
            Command::Simulate(_) => "simulate",
            Command::Correct(_) => "correct",
            Command::Fit(_) => "fit",
            Command::ErrorSurface(_) => "error-surface",
            Command::Pipeline(_) => "pipeline",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Chaotic,
    Coherent,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetectorPreset {
    /// Unit efficiency, no dead time, 1 ps resolution.
    Ideal,
    /// Gated InGaAs detector: 25 % efficiency, 4 μs dead time, 65 ps
    /// resolution.
    Ingaas,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateMode {
    /// Combined count rate of both detectors.
    FromCounts,
    /// The rate given with `--rate`.
    Given,
    /// Scale so the converged tail averages to 1.
    TailNormalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    Intensity,
    CoherenceTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    Unweighted,
    Poisson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StreamFormat {
    None,
    Text,
    Ttag,
}

/// `<number>[unit]` with unit ps, ns (default), us, ms or s; returns ns.
pub fn parse_time(text: &str) -> Result<f64, String> {
    let text = text.trim();
    let split = text
        .find(|c: char| c.is_ascii_alphabetic() || c == 'µ')
        .unwrap_or(text.len());
    let (number, unit) = text.split_at(split);
    let value: f64 = number
        .trim()
        .parse()
        .map_err(|_| format!("`{text}` is not a time (e.g. 100, 2.5ns, 10ms)"))?;
    let scale = match unit.trim() {
        "" | "ns" => 1.0,
        "ps" => 1e-3,
        "us" | "µs" => 1e3,
        "ms" => 1e6,
        "s" => 1e9,
        other => {
            return Err(format!(
                "unknown time unit `{other}` (use ps, ns, us, ms or s)"
            ))
        }
    };
    Ok(value * scale)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SourceArgs {
    /// Light source.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelKind>,

    /// Mean photon rate, photons/ns.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,

    /// Coherence time (ns unless a unit is given).
    #[arg(long, value_parser = parse_time)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_c: Option<f64>,

    /// Bunching amplitude b = g2(0) − 1 of a mixed source.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bunching: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DetectorArgs {
    /// Detector preset; individual detector flags override it.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detector: Option<DetectorPreset>,

    /// Detection efficiency.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub efficiency: Option<f64>,

    /// Non-paralyzable dead time.
    #[arg(long, value_parser = parse_time)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dead_time: Option<f64>,

    /// Dark count rate, counts/s.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dark_rate: Option<f64>,

    /// Timing resolution, ps.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<u64>,

    /// Afterpulse probability per registered event.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub afterpulse_prob: Option<f64>,

    /// Mean afterpulse delay.
    #[arg(long, value_parser = parse_time)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub afterpulse_tau: Option<f64>,

    /// Longest recorded start-stop interval.
    #[arg(long, value_parser = parse_time)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AcquisitionArgs {
    /// Acquisition time, e.g. 10ms.
    #[arg(long, value_parser = parse_time)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration: Option<f64>,

    /// Histogram bin width.
    #[arg(long = "bin", value_parser = parse_time)]
    #[serde(rename = "bin", skip_serializing_if = "Option::is_none")]
    pub bin: Option<f64>,

    /// Master seed.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TheoryArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,

    /// Bin width.
    #[arg(long, value_parser = parse_time)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bin: Option<f64>,

    /// Largest delay.
    #[arg(long, value_parser = parse_time)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,

    #[command(flatten)]
    #[serde(flatten)]
    pub detector: DetectorArgs,

    #[command(flatten)]
    #[serde(flatten)]
    pub acquisition: AcquisitionArgs,

    /// Also write the registered time tags of both detectors.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub streams: Option<StreamFormat>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CorrectionArgs {
    /// Highest self-convolution order.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,

    /// Mean-rate normalization.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate_mode: Option<RateMode>,

    /// Mean photon rate for `--rate-mode given` or a G input, photons/ns.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CorrectArgs {
    /// Histogram CSV; its JSON sidecar is read from the same path with a
    /// `.json` extension.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub histogram: Option<String>,

    /// Start-detector time tags (`.ttag` binary, otherwise text).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub starts: Option<String>,

    /// Stop-detector time tags.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stops: Option<String>,

    /// Per-bin pair probability G as `tau_ns,value` CSV.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,

    /// Acquisition time of time-tag inputs; defaults to the last tag.
    #[arg(long, value_parser = parse_time)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration: Option<f64>,

    /// Histogram bin width for time-tag inputs.
    #[arg(long, value_parser = parse_time)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bin: Option<f64>,

    /// Histogram window for time-tag inputs.
    #[arg(long, value_parser = parse_time)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,

    #[command(flatten)]
    #[serde(flatten)]
    pub correction: CorrectionArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitArgs {
    /// g2 curve as `tau_ns,value` CSV.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,

    #[command(flatten)]
    #[serde(flatten)]
    pub fit: FitFlags,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitFlags {
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weighting: Option<Weighting>,

    /// Sample position inside each bin, in bins (0.5 for histograms).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delay_offset: Option<f64>,

    /// Fit only delays up to this value.
    #[arg(long, value_parser = parse_time)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_delay: Option<f64>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_b: Option<f64>,

    #[arg(long, value_parser = parse_time)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_tau_c: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ErrorSurfaceArgs {
    /// Swept parameter.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis: Option<Axis>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub from: Option<f64>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub to: Option<f64>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,

    /// Photon rate held fixed in a coherence-time sweep, photons/ns.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,

    /// Coherence time held fixed in an intensity sweep.
    #[arg(long, value_parser = parse_time)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_c: Option<f64>,

    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,

    #[arg(long, value_parser = parse_time)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bin: Option<f64>,

    #[arg(long, value_parser = parse_time)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PipelineArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,

    #[command(flatten)]
    #[serde(flatten)]
    pub detector: DetectorArgs,

    #[command(flatten)]
    #[serde(flatten)]
    pub acquisition: AcquisitionArgs,

    /// Highest self-convolution order.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,

    /// Mean-rate normalization.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate_mode: Option<RateMode>,

    /// Mean photon rate for `--rate-mode given`, photons/ns.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub given_rate: Option<f64>,

    #[command(flatten)]
    #[serde(flatten)]
    pub fit: FitFlags,
}
