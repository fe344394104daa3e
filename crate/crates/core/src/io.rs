//! File formats.
//!
//! * Series and curves: CSV with header `tau_ns,value`, delay `k·bin_width`.
//! * Photon streams: text (one decimal ps timestamp per line) or binary
//!   `.ttag` (little-endian `u64` ps timestamps, no header).
//! * Interval histograms: CSV `bin_index,tau_ns,count` plus a JSON sidecar.
//! * Error surfaces: CSV matrix whose first row holds the delays and first
//!   column the swept values, plus a JSON sidecar.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::ErrorSurface;
use crate::correlator::IntervalHistogram;
use crate::error::{Error, Result};
use crate::series::{CorrelationCurve, ProbabilitySeries};
use crate::simulator::PhotonStream;

/// Delay of bin `k`, rounded to 1e-9 ns so grids like 0.1 print cleanly.
pub fn format_delay(k: usize, bin_width: f64) -> String {
    let tau = (k as f64 * bin_width * 1e9).round() / 1e9;
    format!("{tau}")
}

fn write_tau_value<W: Write>(out: W, bin_width: f64, values: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["tau_ns", "value"])?;
    for (k, v) in values.iter().enumerate() {
        w.write_record([format_delay(k, bin_width), format!("{v:?}")])?;
    }
    w.flush()?;
    Ok(())
}

fn read_tau_value<R: Read>(input: R) -> Result<(f64, Vec<f64>)> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "tau_ns" || &headers[1] != "value" {
        return Err(Error::Format(format!(
            "expected header `tau_ns,value`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut taus = Vec::new();
    let mut values = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record?;
        let parse = |i: usize| -> Result<f64> {
            record[i]
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Format(format!("row {}: `{}`: {e}", line + 2, &record[i])))
        };
        taus.push(parse(0)?);
        values.push(parse(1)?);
    }
    if taus.len() < 2 {
        return Err(Error::Format(
            "need at least two rows to infer the bin width".into(),
        ));
    }
    let bin_width = taus[1] - taus[0];
    if bin_width.is_nan() || bin_width <= 0.0 || taus[0].abs() > 1e-9 {
        return Err(Error::Format("delays must start at 0 and increase".into()));
    }
    for (k, &tau) in taus.iter().enumerate() {
        if (tau - k as f64 * bin_width).abs() > 1e-6 * bin_width.max(1.0) {
            return Err(Error::Format(format!(
                "row {}: delay {tau} is off the uniform grid",
                k + 2
            )));
        }
    }
    Ok((bin_width, values))
}

pub fn write_series_csv<W: Write>(out: W, series: &ProbabilitySeries) -> Result<()> {
    write_tau_value(out, series.bin_width(), series.values())
}

pub fn read_series_csv<R: Read>(input: R) -> Result<ProbabilitySeries> {
    let (bin_width, values) = read_tau_value(input)?;
    ProbabilitySeries::new(bin_width, values)
}

pub fn write_curve_csv<W: Write>(out: W, curve: &CorrelationCurve) -> Result<()> {
    write_tau_value(out, curve.bin_width(), curve.values())
}

pub fn read_curve_csv<R: Read>(input: R) -> Result<CorrelationCurve> {
    let (bin_width, values) = read_tau_value(input)?;
    CorrelationCurve::new(bin_width, values)
}

pub fn write_stream_text<W: Write>(out: W, stream: &PhotonStream) -> Result<()> {
    let mut w = BufWriter::new(out);
    for t in stream.timestamps() {
        writeln!(w, "{t}")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a text stream. Without an explicit `duration` (ps) the stream is
/// taken to end one picosecond after its last event.
pub fn read_stream_text<R: Read>(input: R, duration: Option<u64>) -> Result<PhotonStream> {
    let mut timestamps = Vec::new();
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let t = line
            .parse::<u64>()
            .map_err(|e| Error::Format(format!("line {}: `{line}`: {e}", i + 1)))?;
        timestamps.push(t);
    }
    let duration = duration.unwrap_or_else(|| timestamps.last().map_or(0, |t| t + 1));
    PhotonStream::new(timestamps, duration)
}

pub fn write_stream_ttag<W: Write>(out: W, stream: &PhotonStream) -> Result<()> {
    let mut w = BufWriter::new(out);
    for t in stream.timestamps() {
        w.write_all(&t.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_stream_ttag<R: Read>(mut input: R, duration: Option<u64>) -> Result<PhotonStream> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    if bytes.len() % 8 != 0 {
        return Err(Error::Format(format!(
            "{} bytes is not a whole number of u64 timestamps",
            bytes.len()
        )));
    }
    let timestamps: Vec<u64> = bytes
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    let duration = duration.unwrap_or_else(|| timestamps.last().map_or(0, |t| t + 1));
    PhotonStream::new(timestamps, duration)
}

/// Reads a photon stream, choosing the format from the extension.
pub fn read_stream(path: &Path, duration: Option<u64>) -> Result<PhotonStream> {
    let file = fs::File::open(path)?;
    if path.extension().is_some_and(|e| e == "ttag") {
        read_stream_ttag(file, duration)
    } else {
        read_stream_text(file, duration)
    }
}

/// Metadata written next to a histogram CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramSidecar {
    pub bin_width: f64,
    pub window: f64,
    pub start_count: u64,
    pub seed: Option<u64>,
    /// Registered events per detector, when known.
    #[serde(default)]
    pub arm_counts: Option<[u64; 2]>,
    /// Acquisition length, ns, when known.
    #[serde(default)]
    pub duration_ns: Option<f64>,
    /// Every parameter that produced the histogram.
    #[serde(default)]
    pub provenance: serde_json::Value,
}

pub fn write_histogram_csv<W: Write>(out: W, h: &IntervalHistogram) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["bin_index", "tau_ns", "count"])?;
    for (k, c) in h.counts().iter().enumerate() {
        w.write_record([k.to_string(), format_delay(k, h.bin_width()), c.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads histogram counts; geometry and start count come from the sidecar.
pub fn read_histogram_csv<R: Read>(
    input: R,
    sidecar: &HistogramSidecar,
) -> Result<IntervalHistogram> {
    #[derive(Deserialize)]
    struct Row {
        bin_index: usize,
        #[allow(dead_code)]
        tau_ns: f64,
        count: u64,
    }
    let mut r = csv::Reader::from_reader(input);
    let mut counts = Vec::new();
    for row in r.deserialize() {
        let row: Row = row?;
        if row.bin_index != counts.len() {
            return Err(Error::Format(format!(
                "bin_index {} out of sequence (expected {})",
                row.bin_index,
                counts.len()
            )));
        }
        counts.push(row.count);
    }
    IntervalHistogram::new(
        sidecar.bin_width,
        counts,
        sidecar.start_count,
        sidecar.window,
    )
}

pub fn write_surface_csv<W: Write>(out: W, surface: &ErrorSurface) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![surface.axis.name().to_string()];
    header.extend(
        surface
            .delays
            .iter()
            .map(|d| format!("{}", (d * 1e9).round() / 1e9)),
    );
    w.write_record(&header)?;
    for (value, row) in surface.axis_values.iter().zip(&surface.delta) {
        let mut record = vec![format!("{value:?}")];
        record.extend(row.iter().map(|v| format!("{v:?}")));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `bytes` to `path` through a temporary file in the same directory
/// and a rename, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::invalid("path", format!("{} has no file name", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}
