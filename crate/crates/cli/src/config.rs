//! Parameter resolution: defaults, then the `--config` file, then flags.
//!
//! All three layers are flat JSON objects keyed by parameter name. A
//! `"detector"` key naming a preset expands into the individual detector
//! parameters before the layer's own detector keys are applied. A flag that
//! replaces a different value from the file is reported on stderr.

use std::path::Path;

use hbt_core::simulator::DetectorConfig;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::args::{Axis, DetectorPreset, ModelKind, RateMode, StreamFormat, Weighting};
use crate::error::{CliError, CliResult};

pub fn resolve<P>(command: &str, file: Option<&Path>, flags: &impl Serialize) -> CliResult<P>
where
    P: Serialize + DeserializeOwned + Default,
{
    let Value::Object(mut merged) = to_value(&P::default()) else {
        unreachable!("parameter structs serialize to objects")
    };
    let flags = match to_value(flags) {
        Value::Object(map) => expand_preset(map)?,
        _ => unreachable!("flag structs serialize to objects"),
    };
    let file_layer = match file {
        Some(path) => Some(expand_preset(load_file(path, command)?)?),
        None => None,
    };

    for key in file_layer.iter().flat_map(|m| m.keys()).chain(flags.keys()) {
        if !merged.contains_key(key) {
            return Err(CliError::Validation(format!(
                "unknown parameter `{key}` for `{command}`"
            )));
        }
    }
    if let Some(layer) = &file_layer {
        merged.extend(layer.clone());
    }
    for (key, value) in flags {
        if let Some(previous) = file_layer.as_ref().and_then(|m| m.get(&key)) {
            if *previous != value {
                log::warn!(
                    "--{} overrides the config file: {previous} -> {value}",
                    key.replace('_', "-")
                );
            }
        }
        merged.insert(key, value);
    }
    serde_json::from_value(Value::Object(merged))
        .map_err(|e| CliError::Validation(format!("invalid parameters: {e}")))
}

fn to_value(value: &impl Serialize) -> Value {
    serde_json::to_value(value).expect("parameters serialize to JSON")
}

/// Reads a flat parameter object or the `params` of a run record.
fn load_file(path: &Path, command: &str) -> CliResult<Map<String, Value>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::input(path, e))?;
    let Value::Object(mut map) = value else {
        return Err(CliError::input(path, "expected a JSON object"));
    };
    if !map.contains_key("params") {
        return Ok(map);
    }
    if let Some(recorded) = map.get("command").and_then(Value::as_str) {
        if recorded != command {
            return Err(CliError::Validation(format!(
                "{} records a `{recorded}` run, not `{command}`",
                path.display()
            )));
        }
    }
    match map.remove("params") {
        Some(Value::Object(params)) => Ok(params),
        _ => Err(CliError::input(path, "`params` must be an object")),
    }
}

fn expand_preset(mut layer: Map<String, Value>) -> CliResult<Map<String, Value>> {
    let Some(preset) = layer.remove("detector") else {
        return Ok(layer);
    };
    let preset: DetectorPreset = serde_json::from_value(preset)
        .map_err(|e| CliError::Validation(format!("invalid detector preset: {e}")))?;
    let config = match preset {
        DetectorPreset::Ideal => DetectorConfig::ideal(),
        DetectorPreset::Ingaas => DetectorConfig::default(),
    };
    let Value::Object(mut expanded) = to_value(&config) else {
        unreachable!("detector config serializes to an object")
    };
    expanded.extend(layer);
    Ok(expanded)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceParams {
    pub model: ModelKind,
    /// Photons per ns.
    pub rate: f64,
    /// ns.
    pub tau_c: f64,
    /// Only read for mixed sources.
    pub bunching: f64,
}

impl Default for SourceParams {
    fn default() -> Self {
        Self {
            model: ModelKind::Chaotic,
            rate: 0.04,
            tau_c: 0.5,
            bunching: 1.0,
        }
    }
}

impl SourceParams {
    pub fn model(&self) -> hbt_core::Result<hbt_core::SourceModel> {
        use hbt_core::SourceModel;
        match self.model {
            ModelKind::Chaotic => SourceModel::chaotic(self.rate, self.tau_c),
            ModelKind::Coherent => SourceModel::coherent(self.rate),
            ModelKind::Mixed => {
                SourceModel::with_bunching_amplitude(self.rate, self.tau_c, self.bunching)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryParams {
    #[serde(flatten)]
    pub source: SourceParams,
    pub bin: f64,
    pub window: f64,
}

impl Default for TheoryParams {
    fn default() -> Self {
        Self {
            source: SourceParams::default(),
            bin: 0.1,
            window: 100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateParams {
    #[serde(flatten)]
    pub source: SourceParams,
    #[serde(flatten)]
    pub detector: DetectorConfig,
    pub duration: f64,
    pub bin: f64,
    pub seed: Option<u64>,
    pub streams: StreamFormat,
}

impl Default for SimulateParams {
    fn default() -> Self {
        Self {
            source: SourceParams::default(),
            detector: DetectorConfig::ideal(),
            duration: 1e7,
            bin: 0.1,
            seed: None,
            streams: StreamFormat::None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectParams {
    pub histogram: Option<String>,
    pub starts: Option<String>,
    pub stops: Option<String>,
    pub g: Option<String>,
    pub duration: Option<f64>,
    pub bin: f64,
    pub window: f64,
    pub order: usize,
    pub rate_mode: RateMode,
    pub rate: Option<f64>,
}

impl Default for CorrectParams {
    fn default() -> Self {
        Self {
            histogram: None,
            starts: None,
            stops: None,
            g: None,
            duration: None,
            bin: 0.1,
            window: 100.0,
            order: hbt_core::correlator::DEFAULT_ORDER,
            rate_mode: RateMode::FromCounts,
            rate: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitParams {
    pub weighting: Weighting,
    pub delay_offset: f64,
    pub max_delay: Option<f64>,
    pub initial_b: Option<f64>,
    pub initial_tau_c: Option<f64>,
}

impl Default for FitParams {
    fn default() -> Self {
        Self {
            weighting: Weighting::Unweighted,
            delay_offset: 0.0,
            max_delay: None,
            initial_b: None,
            initial_tau_c: None,
        }
    }
}

impl FitParams {
    pub fn options(&self) -> CliResult<hbt_core::analysis::FitOptions> {
        let initial = match (self.initial_b, self.initial_tau_c) {
            (Some(b), Some(tau)) => Some((b, tau)),
            (None, None) => None,
            _ => {
                return Err(CliError::Validation(
                    "--initial-b and --initial-tau-c must be given together".into(),
                ))
            }
        };
        Ok(hbt_core::analysis::FitOptions {
            initial,
            weighting: match self.weighting {
                Weighting::Unweighted => hbt_core::analysis::Weighting::Unweighted,
                Weighting::Poisson => hbt_core::analysis::Weighting::Poisson,
            },
            delay_offset: self.delay_offset,
            max_delay: self.max_delay,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct FitCommandParams {
    pub input: Option<String>,
    #[serde(flatten)]
    pub fit: FitParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorSurfaceParams {
    pub axis: Axis,
    /// Defaults to 0.03 photons/ns or 0.3 ns depending on the axis.
    pub from: Option<f64>,
    /// Defaults to 0.05 photons/ns or 0.7 ns depending on the axis.
    pub to: Option<f64>,
    pub steps: usize,
    pub rate: f64,
    pub tau_c: f64,
    pub order: usize,
    pub bin: f64,
    pub window: f64,
}

impl Default for ErrorSurfaceParams {
    fn default() -> Self {
        Self {
            axis: Axis::Intensity,
            from: None,
            to: None,
            steps: 5,
            rate: 0.04,
            tau_c: 1.0,
            order: hbt_core::correlator::DEFAULT_ORDER,
            bin: 0.1,
            window: 100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineParams {
    #[serde(flatten)]
    pub source: SourceParams,
    #[serde(flatten)]
    pub detector: DetectorConfig,
    pub duration: f64,
    pub bin: f64,
    pub seed: Option<u64>,
    pub order: usize,
    pub rate_mode: RateMode,
    pub given_rate: Option<f64>,
    #[serde(flatten)]
    pub fit: FitParams,
}

impl Default for PipelineParams {
    fn default() -> Self {
        Self {
            source: SourceParams::default(),
            detector: DetectorConfig::ideal(),
            duration: 1e7,
            bin: 0.1,
            seed: None,
            order: hbt_core::correlator::DEFAULT_ORDER,
            rate_mode: RateMode::FromCounts,
            given_rate: None,
            // Histogram bins average over [kΔ, (k+1)Δ); fit within the range
            // where the ninth-order correction is converged.
            fit: FitParams {
                delay_offset: 0.5,
                max_delay: Some(40.0),
                ..FitParams::default()
            },
        }
    }
}
