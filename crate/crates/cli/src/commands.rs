use std::path::{Path, PathBuf};

use hbt_core::analysis::{error_surface, fit_bunching, DelayGrid, ErrorSurface, Sweep, SweepAxis};
use hbt_core::correlator::{
    correction_from_d1, correction_from_g, estimate_mean_rate, histogram_to_d1,
    mean_rate_from_counts, CorrectionConfig, IntervalHistogram, MeanRateMode,
};
use hbt_core::io::{self, HistogramSidecar};
use hbt_core::simulator::{run_hbt, start_stop_histogram, Diagnostic, HbtRun};
use hbt_core::theory::{g2_curve, g_theoretical};
use hbt_core::{CorrelationCurve, FitResult, PhotonStream, ProbabilitySeries};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Axis, RateMode, StreamFormat};
use crate::config::{
    CorrectParams, ErrorSurfaceParams, FitCommandParams, PipelineParams, SimulateParams,
    TheoryParams,
};
use crate::error::{CliError, CliResult};

/// Collects the files of one run and writes each atomically.
pub struct Output {
    dir: PathBuf,
    written: Vec<String>,
    diagnostics: Vec<String>,
}

impl Output {
    pub fn new(dir: &Path) -> CliResult<Self> {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Write {
            path: dir.display().to_string(),
            source,
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
            diagnostics: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> CliResult<()> {
        let path = self.dir.join(name);
        io::write_atomic(&path, bytes).map_err(|e| match e {
            hbt_core::Error::Io(source) => CliError::Write {
                path: path.display().to_string(),
                source,
            },
            other => other.into(),
        })?;
        log::info!("wrote {}", path.display());
        self.written.push(name.to_string());
        Ok(())
    }

    fn write_with<F>(&mut self, name: &str, render: F) -> CliResult<()>
    where
        F: FnOnce(&mut Vec<u8>) -> hbt_core::Result<()>,
    {
        let mut buf = Vec::new();
        render(&mut buf)?;
        self.write(name, &buf)
    }

    fn write_json(&mut self, name: &str, value: &impl Serialize) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(value).expect("serializable output");
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    fn diagnose(&mut self, diagnostic: &Diagnostic) {
        log::warn!("{diagnostic}");
        self.diagnostics.push(diagnostic.to_string());
    }

    /// Writes `run.json`: everything needed to regenerate the other files.
    pub fn finish(mut self, command: &str, params: &impl Serialize) -> CliResult<()> {
        let record = json!({
            "tool": "hbt",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "params": params,
            "outputs": self.written,
            "diagnostics": self.diagnostics,
        });
        self.write_json("run.json", &record)
    }
}

fn num_bins(bin: f64, window: f64) -> CliResult<usize> {
    Ok(DelayGrid::up_to(bin, window)?.num_bins)
}

fn require_seed(seed: Option<u64>) -> CliResult<u64> {
    seed.ok_or_else(|| CliError::Validation("a seed is required (--seed)".into()))
}

pub fn theory(p: &TheoryParams, out: &mut Output) -> CliResult<()> {
    let model = p.source.model()?;
    let n = num_bins(p.bin, p.window)?;
    let curve = g2_curve(&model, p.bin, n)?;
    let g = g_theoretical(&model, p.bin, n)?;
    out.write_with("g2.csv", |w| io::write_curve_csv(w, &curve))?;
    out.write_with("g.csv", |w| io::write_series_csv(w, &g))
}

fn sidecar(run: &HbtRun, duration: f64, seed: u64, provenance: Value) -> HistogramSidecar {
    HistogramSidecar {
        bin_width: run.histogram.bin_width(),
        window: run.histogram.window(),
        start_count: run.histogram.start_count(),
        seed: Some(seed),
        arm_counts: Some([run.arms[0].len() as u64, run.arms[1].len() as u64]),
        duration_ns: Some(duration),
        provenance,
    }
}

fn write_histogram(
    out: &mut Output,
    histogram: &IntervalHistogram,
    sidecar: &HistogramSidecar,
) -> CliResult<()> {
    out.write_with("histogram.csv", |w| io::write_histogram_csv(w, histogram))?;
    out.write_json("histogram.json", sidecar)
}

pub fn simulate(p: &SimulateParams, out: &mut Output) -> CliResult<()> {
    let seed = require_seed(p.seed)?;
    let model = p.source.model()?;
    let run = run_hbt(&model, &p.detector, p.duration, p.bin, seed)?;
    for d in &run.diagnostics {
        out.diagnose(d);
    }
    let provenance = json!({ "command": "simulate", "params": p });
    write_histogram(
        out,
        &run.histogram,
        &sidecar(&run, p.duration, seed, provenance),
    )?;
    let names = ["start", "stop"];
    for (stream, name) in run.arms.iter().zip(names) {
        match p.streams {
            StreamFormat::None => {}
            StreamFormat::Text => {
                out.write_with(&format!("{name}.txt"), |w| io::write_stream_text(w, stream))?
            }
            StreamFormat::Ttag => out.write_with(&format!("{name}.ttag"), |w| {
                io::write_stream_ttag(w, stream)
            })?,
        }
    }
    Ok(())
}

fn read_file<T>(
    path: &str,
    read: impl FnOnce(std::fs::File) -> hbt_core::Result<T>,
) -> CliResult<T> {
    let path = Path::new(path);
    let file = std::fs::File::open(path).map_err(|e| CliError::input(path, e))?;
    read(file).map_err(|e| CliError::input(path, e))
}

fn correction_config(
    mode: RateMode,
    rate: Option<f64>,
    order: usize,
) -> CliResult<CorrectionConfig> {
    let mean_rate_mode = match mode {
        RateMode::FromCounts => MeanRateMode::FromCounts,
        RateMode::TailNormalized => MeanRateMode::TailNormalized,
        RateMode::Given => MeanRateMode::Given {
            rate_per_ns: rate
                .ok_or_else(|| CliError::Validation("--rate-mode given needs a rate".into()))?,
        },
    };
    let config = CorrectionConfig {
        order,
        mean_rate_mode,
    };
    config.validate()?;
    Ok(config)
}

/// Per-bin counted rate, or NaN when the mode does not need one.
fn counted_rate(
    mode: RateMode,
    counts: Option<u64>,
    duration: Option<f64>,
    bin: f64,
) -> CliResult<f64> {
    if mode != RateMode::FromCounts {
        return Ok(f64::NAN);
    }
    match (counts, duration) {
        (Some(counts), Some(duration)) => {
            let rate = mean_rate_from_counts(counts, duration, bin)?;
            if rate.is_degenerate() {
                return Err(CliError::Validation(
                    "no detector counts to estimate the mean rate from".into(),
                ));
            }
            Ok(rate.per_bin)
        }
        _ => Err(CliError::Validation(
            "--rate-mode from-counts needs detector counts and duration; \
             use --rate-mode given or tail-normalized"
                .into(),
        )),
    }
}

pub fn correct(p: &CorrectParams, out: &mut Output) -> CliResult<()> {
    let inputs = [
        p.histogram.is_some(),
        p.starts.is_some() || p.stops.is_some(),
        p.g.is_some(),
    ];
    if inputs.iter().filter(|&&given| given).count() != 1 {
        return Err(CliError::Validation(
            "give exactly one input: --histogram, --starts with --stops, or --g".into(),
        ));
    }

    if let Some(g_path) = &p.g {
        let g: ProbabilitySeries = read_file(g_path, io::read_series_csv)?;
        let rate = p
            .rate
            .ok_or_else(|| CliError::Validation("a G input needs --rate (photons/ns)".into()))?;
        let curve = correction_from_g(&g, rate * g.bin_width(), p.order)?;
        return out.write_with("corrected.csv", |w| io::write_curve_csv(w, &curve));
    }

    let (histogram, counts, duration) = if let Some(path) = &p.histogram {
        let sidecar_path = Path::new(path).with_extension("json");
        let text = std::fs::read_to_string(&sidecar_path)
            .map_err(|e| CliError::input(&sidecar_path, e))?;
        let sidecar: HistogramSidecar =
            serde_json::from_str(&text).map_err(|e| CliError::input(&sidecar_path, e))?;
        let histogram = read_file(path, |f| io::read_histogram_csv(f, &sidecar))?;
        let counts = sidecar.arm_counts.map(|[a, b]| a + b);
        (histogram, counts, sidecar.duration_ns)
    } else {
        let (Some(starts), Some(stops)) = (&p.starts, &p.stops) else {
            return Err(CliError::Validation(
                "--starts and --stops go together".into(),
            ));
        };
        let duration_ps = p.duration.map(|ns| (ns * 1e3).round() as u64);
        let read = |path: &str| {
            io::read_stream(Path::new(path), duration_ps)
                .map_err(|e| CliError::input(Path::new(path), e))
        };
        let (a, b) = (read(starts)?, read(stops)?);
        let (a, b) = match duration_ps {
            Some(_) => (a, b),
            None => {
                let end = a.duration().max(b.duration());
                (
                    PhotonStream::new(a.into_timestamps(), end)?,
                    PhotonStream::new(b.into_timestamps(), end)?,
                )
            }
        };
        let histogram = start_stop_histogram(&a, &b, p.bin, p.window)?;
        let rate = estimate_mean_rate(&[&a, &b], p.bin)?;
        let sidecar = HistogramSidecar {
            bin_width: p.bin,
            window: p.window,
            start_count: histogram.start_count(),
            seed: None,
            arm_counts: Some([a.len() as u64, b.len() as u64]),
            duration_ns: Some(rate.duration_ns),
            provenance: json!({ "command": "correct", "params": p }),
        };
        write_histogram(out, &histogram, &sidecar)?;
        (histogram, Some(rate.total_counts), Some(rate.duration_ns))
    };

    let config = correction_config(p.rate_mode, p.rate, p.order)?;
    let rate = counted_rate(p.rate_mode, counts, duration, histogram.bin_width())?;
    let d1 = histogram_to_d1(&histogram)?;
    let curve = correction_from_d1(&d1, &config, rate)?;
    out.write_with("d1.csv", |w| io::write_series_csv(w, &d1))?;
    out.write_with("corrected.csv", |w| io::write_curve_csv(w, &curve))
}

pub fn fit(p: &FitCommandParams, out: &mut Output) -> CliResult<()> {
    let input = p
        .input
        .as_deref()
        .ok_or_else(|| CliError::Validation("--input is required".into()))?;
    let curve: CorrelationCurve = read_file(input, io::read_curve_csv)?;
    let result = fit_bunching(&curve, &p.fit.options()?)?;
    out.write_json("fit.json", &result)
}

pub fn error_surface_cmd(p: &ErrorSurfaceParams, out: &mut Output) -> CliResult<()> {
    let (axis, from, to, model) = match p.axis {
        Axis::Intensity => (
            SweepAxis::Intensity,
            p.from.unwrap_or(0.03),
            p.to.unwrap_or(0.05),
            hbt_core::SourceModel::chaotic(p.from.unwrap_or(0.03), p.tau_c)?,
        ),
        Axis::CoherenceTime => (
            SweepAxis::CoherenceTime,
            p.from.unwrap_or(0.3),
            p.to.unwrap_or(0.7),
            hbt_core::SourceModel::chaotic(p.rate, p.from.unwrap_or(0.3))?,
        ),
    };
    let sweep = Sweep::linspace(axis, from, to, p.steps)?;
    let grid = DelayGrid::up_to(p.bin, p.window)?;
    let surface = error_surface(&sweep, &model, p.order, &grid)?;
    out.write_with("surface.csv", |w| io::write_surface_csv(w, &surface))?;
    out.write_json("surface.json", &surface_summary(&surface, p))
}

fn surface_summary(surface: &ErrorSurface, p: &ErrorSurfaceParams) -> Value {
    let rows: Vec<Value> = surface
        .axis_values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            json!({
                "value": v,
                "max_delta_percent": surface.max_within(i, f64::INFINITY),
                "max_delta_percent_within_40ns": surface.max_within(i, 40.0),
                "max_delta_percent_within_50ns": surface.max_within(i, 50.0),
            })
        })
        .collect();
    json!({
        "axis": surface.axis.name(),
        "axis_values": surface.axis_values,
        "num_delays": surface.delays.len(),
        "params": p,
        "rows": rows,
    })
}

pub fn pipeline(p: &PipelineParams, out: &mut Output) -> CliResult<FitResult> {
    let seed = require_seed(p.seed)?;
    let model = p.source.model()?;
    let config = correction_config(p.rate_mode, p.given_rate, p.order)?;
    let options = p.fit.options()?;
    let run = run_hbt(&model, &p.detector, p.duration, p.bin, seed)?;
    for d in &run.diagnostics {
        out.diagnose(d);
    }
    let provenance = json!({ "command": "pipeline", "params": p });
    write_histogram(
        out,
        &run.histogram,
        &sidecar(&run, p.duration, seed, provenance),
    )?;

    let d1 = histogram_to_d1(&run.histogram)?;
    let rate = estimate_mean_rate(&[&run.arms[0], &run.arms[1]], p.bin)?;
    if p.rate_mode == RateMode::FromCounts && rate.is_degenerate() {
        return Err(CliError::Validation(
            "the detectors registered no photons".into(),
        ));
    }
    let curve = correction_from_d1(&d1, &config, rate.per_bin)?;
    out.write_with("d1.csv", |w| io::write_series_csv(w, &d1))?;
    out.write_with("corrected.csv", |w| io::write_curve_csv(w, &curve))?;
    let result = fit_bunching(&curve, &options)?;
    out.write_json("fit.json", &result)?;
    Ok(result)
}
