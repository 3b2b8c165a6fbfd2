//! End-to-end checks of the `hom` binary: CSV/JSON shape, exit codes, and
//! byte determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

use tempfile::TempDir;

const BASE_CONFIG: &str = "\
theta0_deg = 90
q = 0
spectrum = rect
bandwidth = 1.0e12
n_pairs = 2000
seed = 7
tau_points = 51
";

fn write_config(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run_with_threads(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hom"));
    cmd.args(args);
    cmd.env_remove("HOM_THREADS");
    if let Some(t) = threads {
        cmd.env("HOM_THREADS", t);
    }
    cmd.output().unwrap()
}

fn run(args: &[&str]) -> Output {
    run_with_threads(args, None)
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr_str(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// Parsed rows of a sweep CSV: (tau, delta_tau, r_raw, r_norm, traces...).
fn parse_sweep(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn sweep_is_byte_deterministic_across_runs_and_thread_counts() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "run.cfg", BASE_CONFIG);
    let args = ["sweep", "--config", cfg.to_str().unwrap()];

    let first = run(&args);
    assert!(first.status.success(), "{}", stderr_str(&first));
    for threads in [None, Some("1"), Some("2"), Some("3")] {
        let other = run_with_threads(&args, threads);
        assert!(other.status.success());
        assert_eq!(other.stdout, first.stdout, "threads = {threads:?}");
    }
}

#[test]
fn sweep_csv_rows_round_trip_exactly() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "run.cfg", &format!("{BASE_CONFIG}i0 = 2.5\n"));
    let out = run(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());

    let text = stdout_str(&out);
    let (header, rows) = parse_sweep(&text);
    assert_eq!(header, ["tau", "delta_tau", "r_raw", "r_norm"]);
    assert_eq!(rows.len(), 51);

    let bandwidth = 1.0e12;
    let i0 = 2.5;
    let mut saw_zero = false;
    for w in rows.windows(2) {
        assert!(w[0][0] < w[1][0], "tau not ascending");
    }
    for row in &rows {
        let (tau, delta_tau, r_raw, r_norm) = (row[0], row[1], row[2], row[3]);
        assert_eq!(delta_tau.to_bits(), (bandwidth * tau).to_bits());
        assert_eq!(r_norm.to_bits(), (r_raw / (0.5 * i0 * i0)).to_bits());
        if tau == 0.0 {
            saw_zero = true;
            assert_eq!(r_raw, 0.0, "dip minimum must be exactly zero");
            assert_eq!(r_norm, 0.0);
        }
    }
    assert!(saw_zero, "grid must contain τ = 0");
}

#[test]
fn sweep_out_file_matches_stdout() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "run.cfg", BASE_CONFIG);
    let out_path = dir.path().join("curve.csv");

    let stdout_run = run(&["sweep", "--config", cfg.to_str().unwrap()]);
    let file_run = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(file_run.status.success());
    assert!(file_run.stdout.is_empty());
    assert_eq!(std::fs::read(&out_path).unwrap(), stdout_run.stdout);
}

#[test]
fn classical_phase_has_flat_zero_delay_value() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "run.cfg",
        "theta0_deg = 45\nbandwidth = 1.0e12\nseed = 7\nn_pairs = 2000\ntau_points = 51\n",
    );
    let out = run(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let (_, rows) = parse_sweep(&stdout_str(&out));
    let zero_row = rows.iter().find(|r| r[0] == 0.0).unwrap();
    assert!((zero_row[3] - 1.0).abs() <= 1e-12, "r_norm(0) = {}", zero_row[3]);
}

#[test]
fn panels_apply_their_presets() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "run.cfg", BASE_CONFIG);
    let targets = [("a", 0.0), ("c", 2.0), ("e", 1.0), ("f", 0.0)];
    for (panel, expect) in targets {
        let out = run(&["panel", "--config", cfg.to_str().unwrap(), "--panel", panel]);
        assert!(out.status.success(), "panel {panel}: {}", stderr_str(&out));
        let (_, rows) = parse_sweep(&stdout_str(&out));
        let zero_row = rows.iter().find(|r| r[0] == 0.0).unwrap();
        assert!(
            (zero_row[3] - expect).abs() <= 1e-12,
            "panel {panel}: r_norm(0) = {} want {expect}",
            zero_row[3]
        );
    }
}

#[test]
fn panel_b_emits_capped_trace_columns() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "run.cfg", BASE_CONFIG);
    let out = run(&[
        "panel",
        "--config",
        cfg.to_str().unwrap(),
        "--panel",
        "b",
        "--traces",
        "8",
    ]);
    assert!(out.status.success());
    let (header, rows) = parse_sweep(&stdout_str(&out));
    assert_eq!(header.len(), 12);
    assert_eq!(header[4], "trace_0");
    assert_eq!(header[11], "trace_7");
    for row in &rows {
        assert_eq!(row.len(), 12);
        for trace in &row[4..] {
            assert!((0.0..=2.0 + 1e-12).contains(trace), "trace value {trace}");
        }
    }
    // trace rows dip to zero with everything else at τ = 0
    let zero_row = rows.iter().find(|r| r[0] == 0.0).unwrap();
    assert!(zero_row[4..].iter().all(|&t| t == 0.0));

    let default_run = run(&["panel", "--config", cfg.to_str().unwrap(), "--panel", "b"]);
    let (header, _) = parse_sweep(&stdout_str(&default_run));
    assert_eq!(header.len(), 4 + 64);

    let no_traces = run(&[
        "panel",
        "--config",
        cfg.to_str().unwrap(),
        "--panel",
        "b",
        "--traces",
        "0",
    ]);
    let (header, _) = parse_sweep(&stdout_str(&no_traces));
    assert_eq!(header.len(), 4);
}

#[test]
fn sweep_honors_keep_traces_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "run.cfg", &format!("{BASE_CONFIG}keep_traces = true\n"));
    let out = run(&["sweep", "--config", cfg.to_str().unwrap(), "--traces", "5"]);
    assert!(out.status.success());
    let (header, _) = parse_sweep(&stdout_str(&out));
    assert_eq!(header.len(), 9);
    assert_eq!(header[4], "trace_0");
}

#[test]
fn unknown_panel_letter_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "run.cfg", BASE_CONFIG);
    let out = run(&["panel", "--config", cfg.to_str().unwrap(), "--panel", "g"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_str(&out).contains("unknown panel"), "{}", stderr_str(&out));
}

#[test]
fn config_errors_exit_one_and_name_the_key() {
    let dir = TempDir::new().unwrap();
    let bad_q = write_config(&dir, "bad_q.cfg", "q = 1.5\nbandwidth = 1e12\nseed = 1\n");
    let out = run(&["sweep", "--config", bad_q.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_str(&out);
    assert!(err.contains("`q`") && err.contains("[0, 1]"), "{err}");

    let unknown = write_config(&dir, "unknown.cfg", "bandwidth = 1e12\nseed = 1\nwat = 1\n");
    let out = run(&["sweep", "--config", unknown.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_str(&out).contains("unknown key"), "{}", stderr_str(&out));

    let missing = write_config(&dir, "missing.cfg", "seed = 1\n");
    let out = run(&["sweep", "--config", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_str(&out).contains("bandwidth"), "{}", stderr_str(&out));
}

#[test]
fn missing_config_file_is_io_error() {
    let out = run(&["sweep", "--config", "/nonexistent/path.cfg"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_out_path_is_io_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "run.cfg", BASE_CONFIG);
    let out = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        "/nonexistent_dir/curve.csv",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_error_exits_one_and_help_exits_zero() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_str(&out).contains("sweep"));
}

#[test]
fn intensities_report_the_configured_i0() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "run.cfg",
        "theta0_deg = 13\nq = 0.7\nbandwidth = 1.0e12\nseed = 7\nn_pairs = 2000\ni0 = 2.5\n",
    );
    let out = run(&["intensities", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "mean_ic,mean_id");
    let values: Vec<f64> = lines
        .next()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(values.len(), 2);
    for v in values {
        assert!((v / 2.5 - 1.0).abs() <= 1e-10, "mean intensity {v}");
    }
}

#[test]
fn compare_passes_and_emits_the_report() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "run.cfg",
        "bandwidth = 1.0e12\nseed = 3\nn_pairs = 100\ntau_points = 41\n",
    );
    let args = ["compare", "--config", cfg.to_str().unwrap()];
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0), "{}", stderr_str(&out));

    let report: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert!(report["max_abs_dev"].as_f64().unwrap() <= 1e-12);
    assert!(report["rms_dev"].as_f64().unwrap() <= 1e-12);
    assert_eq!(report["n_samples"], 100 * 41);
    assert_eq!(report["convention"], "eq8");

    let again = run(&args);
    assert_eq!(again.stdout, out.stdout);
}

#[test]
fn compare_rejects_nonconforming_configs() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("product.cfg", "bandwidth = 1e12\nseed = 3\nn_pairs = 10\nconvention = product45\n", "eq8"),
        ("theta.cfg", "bandwidth = 1e12\nseed = 3\nn_pairs = 10\ntheta0_deg = 45\n", "theta0"),
        ("q.cfg", "bandwidth = 1e12\nseed = 3\nn_pairs = 10\nq = 0.5\n", "q = 0"),
    ];
    for (name, text, needle) in cases {
        let cfg = write_config(&dir, name, text);
        let out = run(&["compare", "--config", cfg.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(1), "{name}");
        assert!(stderr_str(&out).contains(needle), "{name}: {}", stderr_str(&out));
    }
}

#[test]
fn compare_signals_regression_with_exit_3() {
    // at delays where phases reach ~1e18 rad, θ₀ drops below the ulp of the
    // phase argument and the two routes decorrelate: the report must still be
    // emitted, with the deviation exit code
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "extreme.cfg",
        "bandwidth = 1.0e12\nseed = 3\nn_pairs = 50\ntau_points = 21\n\
         tau_max_over_bandwidth = 1e18\n",
    );
    let out = run(&["compare", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let report: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert!(report["max_abs_dev"].as_f64().unwrap() > 1e-9);
}

#[test]
fn invalid_thread_cap_is_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "run.cfg", BASE_CONFIG);
    for bad in ["abc", "0", "-2"] {
        let out = run_with_threads(&["sweep", "--config", cfg.to_str().unwrap()], Some(bad));
        assert_eq!(out.status.code(), Some(1), "HOM_THREADS = {bad}");
        assert!(stderr_str(&out).contains("HOM_THREADS"));
    }
}

#[test]
fn gaussian_product_config_runs() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "run.cfg",
        "spectrum = gaussian\nconvention = product45\nbandwidth = 5.0e11\nseed = 11\n\
         n_pairs = 2000\ntau_points = 41\ntau_max_over_bandwidth = 6\n",
    );
    let out = run(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let (_, rows) = parse_sweep(&stdout_str(&out));
    assert_eq!(rows.len(), 41);
    assert!(rows.iter().all(|r| (0.0..=2.0 + 1e-12).contains(&r[3])));
}

#[test]
fn emitted_csv_uses_lf_line_endings() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "run.cfg", BASE_CONFIG);
    let out = run(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert!(!stdout_str(&out).contains('\r'));
}
