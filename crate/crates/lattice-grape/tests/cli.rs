//! Contract tests for the `lg` binary: exit codes, output shapes, and
//! manifest reproducibility.

use std::path::Path;
use std::process::{Command, Output};

fn lg(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lg"))
        .args(args)
        .current_dir(dir)
        .env_remove("LG_SEED")
        .output()
        .expect("failed to spawn lg")
}

fn read(dir: &Path, rel: &str) -> String {
    std::fs::read_to_string(dir.join(rel))
        .unwrap_or_else(|e| panic!("missing output {rel}: {e}"))
}

#[test]
fn bands_writes_expected_row_count_and_dispersion() {
    let tmp = tempfile::tempdir().unwrap();
    let out = lg(
        &["bands", "--r", "13", "--kpoints", "101", "--bands", "4", "--out", "scan"],
        tmp.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = read(tmp.path(), "scan/bands.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("k,band,energy"));
    assert_eq!(lines.count(), 404, "101 k-points x 4 bands");

    let report: serde_json::Value =
        serde_json::from_str(&read(tmp.path(), "scan/dispersion.json")).unwrap();
    assert_eq!(report["r"], 13.0);
    assert!(report["D"].as_f64().unwrap() > 0.0);
    assert!(report["gap_center"].as_f64().unwrap() > 0.0);

    let manifest: serde_json::Value =
        serde_json::from_str(&read(tmp.path(), "scan/manifest.json")).unwrap();
    assert_eq!(manifest["command"], "bands");
}

#[test]
fn bands_r17_reports_published_dispersion() {
    let tmp = tempfile::tempdir().unwrap();
    let out = lg(&["bands", "--r", "17", "--out", "o"], tmp.path());
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&read(tmp.path(), "o/dispersion.json")).unwrap();
    let d = report["D"].as_f64().unwrap();
    assert!((d - 0.054).abs() < 0.001, "D = {d}");
}

#[test]
fn bands_rejects_bad_arguments_with_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = lg(&["bands", "--r", "-1", "--out", "o"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let out = lg(&["bands", "--r", "5", "--kpoints", "1", "--out", "o"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    // missing required flag: clap usage error
    let out = lg(&["bands"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn optimize_zero_budget_returns_initial_pulse() {
    let tmp = tempfile::tempdir().unwrap();
    let out = lg(
        &[
            "optimize", "--r", "17", "--duration", "1", "--k-samples", "2",
            "--restarts", "1", "--slices-per-period", "8", "--max-iters", "0",
            "--init", "rabi", "--fine-points", "10", "--out", "run",
        ],
        tmp.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&read(tmp.path(), "run/report.json")).unwrap();
    assert_eq!(report["termination"], "iteration_cap");
    assert_eq!(report["iterations"], 0);
    // the pulse file is the untouched Rabi initial guess: alpha identically 0
    let pulse: serde_json::Value =
        serde_json::from_str(&read(tmp.path(), "run/pulse.json")).unwrap();
    let alphas = pulse["alpha"].as_array().unwrap();
    assert_eq!(alphas.len(), 8);
    assert!(alphas.iter().all(|a| a.as_f64().unwrap() == 0.0));
    let trace = read(tmp.path(), "run/trace.csv");
    assert_eq!(trace.lines().count(), 2, "header plus the initial point");
}

#[test]
fn optimize_bundle_is_reproducible_from_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let args = [
        "--jobs", "1", "optimize", "--r", "13", "--duration", "1", "--k-samples", "3",
        "--restarts", "2", "--slices-per-period", "8", "--max-iters", "15",
        "--seed", "99", "--fine-points", "12",
    ];
    let mut first = args.to_vec();
    first.extend(["--out", "a"]);
    let out = lg(&first, tmp.path());
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    // re-run from the manifest itself: flags beat the embedded out dir
    let out = lg(
        &[
            "--jobs", "1", "optimize", "--config", "a/manifest.json", "--out", "b",
        ],
        tmp.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    for file in ["pulse.json", "report.json", "trace.csv"] {
        assert_eq!(
            read(tmp.path(), &format!("a/{file}")),
            read(tmp.path(), &format!("b/{file}")),
            "{file} differs between manifest re-runs"
        );
    }
}

#[test]
fn verify_identity_pulse_scores_unit_fidelity() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(
        tmp.path().join("identity.json"),
        r#"{"r": 13.0, "dt": 0.1, "n_slices": 0, "alpha": [], "beta": [], "meta": {}}"#,
    )
    .unwrap();
    let out = lg(
        &["verify", "identity.json", "--target", "identity", "--kpoints", "10", "--out", "v"],
        tmp.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&read(tmp.path(), "v/summary.json")).unwrap();
    assert!((summary["mean_fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((summary["min_fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let scan = read(tmp.path(), "v/scan.csv");
    assert_eq!(scan.lines().next(), Some("k,fidelity,trace_phase"));
    assert_eq!(scan.lines().count(), 11);
}

#[test]
fn verify_rejects_bad_inputs_with_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("broken.json"), r#"{"r": 13.0, "alpha": []}"#).unwrap();
    let out = lg(&["verify", "broken.json", "--out", "v"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("dt"), "schema violation should name the field, got: {stderr}");

    std::fs::write(
        tmp.path().join("ok.json"),
        r#"{"r": 13.0, "dt": 0.1, "n_slices": 0, "alpha": [], "beta": [], "meta": {}}"#,
    )
    .unwrap();
    let out = lg(&["verify", "ok.json", "--kpoints", "1", "--out", "v"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_single_cell_writes_one_row() {
    let tmp = tempfile::tempdir().unwrap();
    let out = lg(
        &[
            "sweep", "--r-values", "17", "--durations", "1", "--k-samples", "2",
            "--restarts", "1", "--max-iters", "3", "--slices-per-period", "8",
            "--fine-points", "10", "--out", "s",
        ],
        tmp.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = read(tmp.path(), "s/sweep.csv");
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("r,duration_periods,dispersion,phi_fine_best,phi_coarse_best,restart_winner,termination")
    );
    assert_eq!(lines.count(), 1);
}

#[test]
fn sweep_requires_grids() {
    let tmp = tempfile::tempdir().unwrap();
    let out = lg(&["sweep", "--durations", "1", "--out", "s"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn nyquist_writes_scan_and_fwhm_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let out = lg(
        &[
            "nyquist", "--r", "2", "--k", "0.5", "--durations", "1", "--kpoints", "21",
            "--restarts", "1", "--max-iters", "3", "--out", "n",
        ],
        tmp.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = read(tmp.path(), "n/nyquist.csv");
    assert_eq!(csv.lines().next(), Some("duration_periods,k,fidelity"));
    assert_eq!(csv.lines().count(), 22, "header + 21 scan points");
    let summary: serde_json::Value =
        serde_json::from_str(&read(tmp.path(), "n/summary.json")).unwrap();
    assert_eq!(summary["fwhm"].as_array().unwrap().len(), 1);

    let out = lg(&["nyquist", "--k", "1.0", "--out", "n2"], tmp.path());
    assert_eq!(out.status.code(), Some(2), "zone-edge k must be rejected");
}

#[test]
fn pulse_info_prints_laser_parameters() {
    let tmp = tempfile::tempdir().unwrap();
    // alpha = r/2 is the half-site-displaced lattice: eta = 0, phi = pi
    std::fs::write(
        tmp.path().join("p.json"),
        r#"{"r": 12.0, "dt": 0.5, "n_slices": 1, "alpha": [6.0], "beta": [0.0], "meta": {}}"#,
    )
    .unwrap();
    let out = lg(&["pulse-info", "p.json"], tmp.path());
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    let data_line = stdout.lines().last().unwrap();
    let fields: Vec<&str> = data_line.split(',').collect();
    assert_eq!(fields[0], "0");
    let eta: f64 = fields[1].parse().unwrap();
    let phi: f64 = fields[2].parse().unwrap();
    assert!(eta.abs() < 1e-12);
    assert!((phi - std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn lg_seed_env_var_is_the_fallback_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |dir: &str, env_seed: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_lg"));
        cmd.args([
            "--jobs", "1", "optimize", "--r", "13", "--duration", "1", "--k-samples", "2",
            "--restarts", "2", "--slices-per-period", "8", "--max-iters", "4",
            "--fine-points", "10", "--init", "random", "--out", dir,
        ])
        .current_dir(tmp.path());
        match env_seed {
            Some(s) => cmd.env("LG_SEED", s),
            None => cmd.env_remove("LG_SEED"),
        };
        let out = cmd.output().unwrap();
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    };
    run("e1", Some("777"));
    run("e2", Some("777"));
    run("e3", None);
    assert_eq!(read(tmp.path(), "e1/pulse.json"), read(tmp.path(), "e2/pulse.json"));
    assert_ne!(read(tmp.path(), "e1/pulse.json"), read(tmp.path(), "e3/pulse.json"));
    let manifest: serde_json::Value =
        serde_json::from_str(&read(tmp.path(), "e1/manifest.json")).unwrap();
    assert_eq!(manifest["seed"], 777);
}
