use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hbt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hbt"))
        .args(args)
        .env_remove("HBT_OUT_DIR")
        .output()
        .expect("run hbt")
}

fn ok(args: &[&str]) -> Output {
    let out = hbt(args);
    assert!(
        out.status.success(),
        "hbt {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn csv_rows(p: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(p)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn theory_curve_starts_at_two() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "theory",
        "--tau-c",
        "0.5",
        "--rate",
        "0.04",
        "--bin",
        "0.1",
        "--window",
        "100",
        "--out",
        path(dir.path()),
    ]);
    let rows = csv_rows(&dir.path().join("g2.csv"));
    assert_eq!(rows[0], ["tau_ns", "value"]);
    assert_eq!(rows[1][0], "0");
    assert_eq!(rows[1][1].parse::<f64>().unwrap(), 2.0);
    assert_eq!(rows.len(), 1 + 1001);
    assert_eq!(rows[1001][0], "100");

    let g = csv_rows(&dir.path().join("g.csv"));
    assert!((g[1][1].parse::<f64>().unwrap() - 0.008).abs() < 1e-15);

    let run = json(&dir.path().join("run.json"));
    assert_eq!(run["command"], "theory");
    assert_eq!(run["params"]["tau_c"], 0.5);
    assert_eq!(run["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn error_surface_is_negligible_below_40_ns() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "error-surface",
        "--axis",
        "intensity",
        "--from",
        "0.03",
        "--to",
        "0.05",
        "--steps",
        "5",
        "--tau-c",
        "1.0",
        "--order",
        "9",
        "--window",
        "100",
        "--out",
        path(dir.path()),
    ]);
    let rows = csv_rows(&dir.path().join("surface.csv"));
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[0][0], "intensity");
    let delays: Vec<f64> = rows[0][1..].iter().map(|d| d.parse().unwrap()).collect();
    assert_eq!(delays.len(), 1001);
    let mut row_maxima = Vec::new();
    for row in &rows[1..] {
        let delta: Vec<f64> = row[1..].iter().map(|d| d.parse().unwrap()).collect();
        for (d, v) in delays.iter().zip(&delta) {
            if *d < 40.0 {
                assert!(*v < 0.1, "δ = {v} % at {d} ns");
            }
        }
        row_maxima.push(delta.iter().copied().fold(0.0, f64::max));
    }
    assert!(
        row_maxima.windows(2).all(|w| w[1] >= w[0]),
        "{row_maxima:?}"
    );
    let summary = json(&dir.path().join("surface.json"));
    assert_eq!(summary["axis"], "intensity");
}

#[test]
fn chaotic_pipeline_recovers_bunching() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(&[
        "pipeline",
        "--model",
        "chaotic",
        "--tau-c",
        "0.5",
        "--rate",
        "0.04",
        "--duration",
        "10ms",
        "--order",
        "9",
        "--seed",
        "7",
        "--out",
        path(dir.path()),
    ]);
    let fit = json(&dir.path().join("fit.json"));
    let b = fit["b"].as_f64().unwrap();
    let tau_c = fit["tau_c"].as_f64().unwrap();
    assert!((0.9..=1.1).contains(&b), "b = {b}");
    assert!((0.425..=0.575).contains(&tau_c), "τc = {tau_c}");
    assert!(String::from_utf8_lossy(&out.stdout).contains("b = "));
    for name in [
        "histogram.csv",
        "histogram.json",
        "d1.csv",
        "corrected.csv",
        "run.json",
    ] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let sidecar = json(&dir.path().join("histogram.json"));
    assert_eq!(sidecar["seed"], 7);
    assert_eq!(sidecar["provenance"]["params"]["duration"], 1e7);
}

/// Every output file is regenerated bit for bit from run.json alone.
#[test]
fn outputs_regenerate_from_run_record() {
    let runs: [&[&str]; 3] = [
        &[
            "pipeline",
            "--model",
            "mixed",
            "--bunching",
            "0.6",
            "--duration",
            "2ms",
            "--seed",
            "3",
        ],
        &[
            "simulate",
            "--duration",
            "1ms",
            "--detector",
            "ingaas",
            "--seed",
            "4",
            "--streams",
            "ttag",
        ],
        &[
            "error-surface",
            "--axis",
            "coherence-time",
            "--steps",
            "3",
            "--window",
            "50",
        ],
    ];
    for args in runs {
        let first = tempfile::tempdir().unwrap();
        let second = tempfile::tempdir().unwrap();
        let mut argv = args.to_vec();
        argv.extend(["--out", path(first.path())]);
        ok(&argv);
        let record = first.path().join("run.json");
        ok(&[
            args[0],
            "--config",
            path(&record),
            "--out",
            path(second.path()),
        ]);

        let run = json(&record);
        let mut names: Vec<String> = run["outputs"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_str().unwrap().to_string())
            .collect();
        names.push("run.json".into());
        for name in names {
            let a = fs::read(first.path().join(&name)).unwrap();
            let b = fs::read(second.path().join(&name)).unwrap();
            assert!(a == b, "{} differs for {:?}", name, args[0]);
        }
    }
}

#[test]
fn correct_accepts_histograms_and_time_tags() {
    let sim = tempfile::tempdir().unwrap();
    ok(&[
        "simulate",
        "--duration",
        "2ms",
        "--seed",
        "5",
        "--streams",
        "ttag",
        "--out",
        path(sim.path()),
    ]);

    let from_hist = tempfile::tempdir().unwrap();
    ok(&[
        "correct",
        "--histogram",
        path(&sim.path().join("histogram.csv")),
        "--out",
        path(from_hist.path()),
    ]);
    let from_tags = tempfile::tempdir().unwrap();
    ok(&[
        "correct",
        "--starts",
        path(&sim.path().join("start.ttag")),
        "--stops",
        path(&sim.path().join("stop.ttag")),
        "--duration",
        "2ms",
        "--out",
        path(from_tags.path()),
    ]);
    // Both routes see the same events, bin width and window.
    assert!(!from_hist.path().join("histogram.csv").exists());
    assert_eq!(
        fs::read(sim.path().join("histogram.csv")).unwrap(),
        fs::read(from_tags.path().join("histogram.csv")).unwrap()
    );
    assert_eq!(
        fs::read(from_hist.path().join("corrected.csv")).unwrap(),
        fs::read(from_tags.path().join("corrected.csv")).unwrap()
    );

    let tail = tempfile::tempdir().unwrap();
    ok(&[
        "correct",
        "--histogram",
        path(&sim.path().join("histogram.csv")),
        "--rate-mode",
        "tail-normalized",
        "--out",
        path(tail.path()),
    ]);
    assert!(tail.path().join("corrected.csv").exists());
}

#[test]
fn correct_and_fit_theoretical_input() {
    let dir = tempfile::tempdir().unwrap();
    let d = path(dir.path());
    ok(&[
        "theory",
        "--model",
        "mixed",
        "--bunching",
        "0.626",
        "--tau-c",
        "0.535",
        "--out",
        d,
    ]);
    let corrected = tempfile::tempdir().unwrap();
    ok(&[
        "correct",
        "--g",
        path(&dir.path().join("g.csv")),
        "--rate",
        "0.04",
        "--order",
        "9",
        "--out",
        path(corrected.path()),
    ]);
    let fitted = tempfile::tempdir().unwrap();
    ok(&[
        "fit",
        "--input",
        path(&dir.path().join("g2.csv")),
        "--out",
        path(fitted.path()),
    ]);
    let fit = json(&fitted.path().join("fit.json"));
    assert!((fit["b"].as_f64().unwrap() - 0.626).abs() < 1e-6);
    assert!((fit["tau_c"].as_f64().unwrap() - 0.535).abs() < 1e-6);
    assert_eq!(fit["converged"], true);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = path(dir.path());
    assert_eq!(
        hbt(&["theory", "--rate", "-1", "--out", d]).status.code(),
        Some(1)
    );
    assert_eq!(
        hbt(&["theory", "--tau-c", "soon", "--out", d])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(hbt(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        hbt(&["simulate", "--duration", "1ms", "--out", d])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        hbt(&["fit", "--input", "/nonexistent.csv", "--out", d])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(hbt(&["correct", "--out", d]).status.code(), Some(1));

    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = hbt(&["theory", "--out", path(&blocker.join("sub"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot write"));
    assert_eq!(hbt(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("params.json");
    fs::write(&config, r#"{"rate": 0.03, "tau_c": 0.7}"#).unwrap();
    let out = ok(&[
        "theory",
        "--config",
        path(&config),
        "--rate",
        "0.05",
        "--out",
        path(dir.path()),
    ]);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("--rate overrides"), "{stderr}");
    let run = json(&dir.path().join("run.json"));
    assert_eq!(run["params"]["rate"], 0.05);
    assert_eq!(run["params"]["tau_c"], 0.7);

    fs::write(&config, r#"{"rate": 0.03, "colour": "blue"}"#).unwrap();
    let out = hbt(&[
        "theory",
        "--config",
        path(&config),
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_hbt"))
        .args(["theory", "--window", "10"])
        .env("HBT_OUT_DIR", dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.path().join("g2.csv").exists());
}

#[test]
fn dead_time_diagnostic_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(&[
        "simulate",
        "--detector",
        "ingaas",
        "--duration",
        "1ms",
        "--seed",
        "1",
        "--out",
        path(dir.path()),
    ]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("dead time"));
    let run = json(&dir.path().join("run.json"));
    assert_eq!(run["diagnostics"].as_array().unwrap().len(), 2);
}
