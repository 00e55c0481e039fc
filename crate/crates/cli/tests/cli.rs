//! End-to-end tests of the `ergoscope` binary: exit codes, output
//! formats, and determinism of the emitted artifacts.

use std::path::Path;
use std::process::{Command, Output};

use ergoscope_core::io::{cm_from_json, cm_to_json};
use ergoscope_core::CovarianceMatrix;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ergoscope"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

fn write_tmsv(dir: &Path, r: f64) -> std::path::PathBuf {
    let path = dir.join("tmsv.json");
    let cm = CovarianceMatrix::tmsv(r).unwrap();
    std::fs::write(&path, cm_to_json(&cm)).unwrap();
    path
}

#[test]
fn malformed_json_exits_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"n_modes\": 2,\n  \"ordering\"").unwrap();
    let output = run(&[ "compute", path.to_str().unwrap(), "--all" ]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("line") && stderr.contains("column"), "{stderr}");
}

#[test]
fn unphysical_state_exits_3_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("unphysical.json");
    std::fs::write(
        &path,
        r#"{"n_modes": 1, "ordering": "qpqp", "matrix": [[0.5, 0.0], [0.0, 0.5]]}"#,
    )
    .unwrap();
    let output = run(&["compute", path.to_str().unwrap(), "--all"]);
    assert_eq!(output.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("symplectic eigenvalue"), "{stderr}");
}

#[test]
fn exhausted_partition_budget_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_tmsv(dir.path(), 0.3);
    let output = run(&[
        "compute",
        path.to_str().unwrap(),
        "--score",
        "--k",
        "2",
        "--budget",
        "0",
    ]);
    assert_eq!(output.status.code(), Some(4));
}

#[test]
fn unknown_flags_and_suites_exit_2() {
    let output = run(&["compute", "x.json", "--frobnicate"]);
    assert_eq!(output.status.code(), Some(2));
    let output = run(&["verify", "--suite", "bogus"]);
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("available"));
}

#[test]
fn missing_input_file_exits_2() {
    let output = run(&["compute", "/no/such/place.json", "--all"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn vacuum_report_has_all_entanglement_at_zero() {
    let dir = tempfile::tempdir().unwrap();
    let gen = run(&[
        "generate",
        "--modes",
        "3",
        "--energy",
        "6",
        "--samples",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(gen.status.success());
    let state = dir.path().join("state_0000.json");
    let report = stdout_json(&run(&["compute", state.to_str().unwrap(), "--all"]));

    assert_eq!(report["n_modes"], 3);
    assert_eq!(report["pure"], true);
    for entry in report["delta2"].as_array().unwrap() {
        assert!(entry["value"].as_f64().unwrap().abs() < 1e-12);
    }
    for entry in report["scores"].as_array().unwrap() {
        assert!(entry["value"].as_f64().unwrap().abs() < 1e-12);
    }
    assert!(report["ggm"].as_f64().unwrap().abs() < 1e-12);
    assert!(report["gtme"]["value"].as_f64().unwrap().abs() < 1e-9);
    assert!(report["global_ergotropy"].as_f64().unwrap().abs() < 1e-12);
    assert!(report["renyi2_entropy"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn tmsv_bipartite_gap_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_tmsv(dir.path(), 0.5);
    let report = stdout_json(&run(&[
        "compute",
        path.to_str().unwrap(),
        "--delta2",
        "0|1",
    ]));
    let value = report["delta2"][0]["value"].as_f64().unwrap();
    assert!((value - 0.5430806348152437).abs() < 1e-12, "{value}");
}

#[test]
fn partition_strings_drive_k_local_gaps() {
    let dir = tempfile::tempdir().unwrap();
    let gen = run(&[
        "generate",
        "--modes",
        "3",
        "--energy",
        "15",
        "--seed",
        "5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(gen.status.success());
    let state = dir.path().join("state_0000.json");
    let report = stdout_json(&run(&[
        "compute",
        state.to_str().unwrap(),
        "--partition",
        "0,2|1",
        "--partition",
        "0|1|2",
    ]));
    let gaps = report["k_local_gaps"].as_array().unwrap();
    assert_eq!(gaps.len(), 2);
    assert_eq!(gaps[0]["partition"], "0,2|1");
    assert_eq!(gaps[0]["k"], 2);
    assert_eq!(gaps[1]["k"], 3);
    // Wrong mode count is a usage error, not a crash.
    let bad = run(&["compute", state.to_str().unwrap(), "--partition", "0|1"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn generated_states_parse_back_and_repeat() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let output = run(&[
            "generate",
            "--modes",
            "2",
            "--energy",
            "9",
            "--samples",
            "3",
            "--seed",
            "42",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(output.status.success());
    }
    for i in 0..3 {
        let name = format!("state_{i:04}.json");
        let text_a = std::fs::read_to_string(dir_a.path().join(&name)).unwrap();
        let text_b = std::fs::read_to_string(dir_b.path().join(&name)).unwrap();
        assert_eq!(text_a, text_b, "run-to-run file mismatch for {name}");
        let cm = cm_from_json(&text_a).expect("generated file is valid");
        assert_eq!(cm.n_modes(), 2);
        assert!((cm.matrix().trace() - 9.0).abs() < 1e-8);
    }
}

#[test]
fn scatter_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    for out in [&out_a, &out_b] {
        let output = run(&[
            "scatter",
            "--modes",
            "2",
            "--energy",
            "6",
            "--samples",
            "4",
            "--seed",
            "9",
            "--restarts",
            "4",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(
            output.status.success(),
            "stderr: {}",
            String::from_utf8_lossy(&output.stderr)
        );
    }
    let bytes_a = std::fs::read(&out_a).unwrap();
    let bytes_b = std::fs::read(&out_b).unwrap();
    assert_eq!(bytes_a, bytes_b);
    let text = String::from_utf8(bytes_a).unwrap();
    assert!(text.starts_with("sample,n_modes,total_energy,seed,delta2,ggm,deltaN,gtme,gtme_converged\n"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn scatter_at_minimum_energy_reports_zeros() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("edge.csv");
    let output = run(&[
        "scatter", "--modes", "2", "--energy", "4", "--samples", "5", "--seed",
        "1", "--out", out.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    for (row, line) in text.lines().skip(1).enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 9);
        for idx in [4usize, 5, 6, 7] {
            let value: f64 = fields[idx].parse().unwrap();
            assert!(value.abs() < 1e-9, "row {row} field {idx}: {value}");
        }
        assert_eq!(fields[8], "true");
    }
}

#[test]
fn scatter_rejects_out_of_range_modes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never.csv");
    let output = run(&[
        "scatter", "--modes", "9", "--energy", "20", "--samples", "1", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn optimizer_config_file_is_honored_and_validated() {
    let dir = tempfile::tempdir().unwrap();
    let state = write_tmsv(dir.path(), 0.4);
    let config = dir.path().join("opt.json");
    std::fs::write(&config, r#"{"restarts": 3, "seed": 5}"#).unwrap();
    let report = stdout_json(&run(&[
        "compute",
        state.to_str().unwrap(),
        "--gtme",
        "--optimizer-config",
        config.to_str().unwrap(),
    ]));
    assert_eq!(report["gtme"]["restarts_used"], 3);

    std::fs::write(&config, "{broken").unwrap();
    let output = run(&[
        "compute",
        state.to_str().unwrap(),
        "--gtme",
        "--optimizer-config",
        config.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn verify_single_suite_passes_and_reports_json() {
    let output = bin()
        .args(["verify", "--suite", "witness"])
        .env("ERGOSCOPE_THREADS", "2")
        .output()
        .expect("binary runs");
    assert_eq!(output.status.code(), Some(0));
    let summary: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(summary["passed"], true);
    assert_eq!(summary["suites_run"], 1);
    assert_eq!(summary["suites"][0]["suite"], "witness");
    assert!(summary["checked"].as_u64().unwrap() > 0);
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("witness: pass"), "{stderr}");
}

#[test]
fn bad_thread_cap_exits_2() {
    let output = bin()
        .args(["verify", "--suite", "witness"])
        .env("ERGOSCOPE_THREADS", "zero")
        .output()
        .expect("binary runs");
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn mixed_state_all_skips_pure_only_quantities() {
    // A valid thermal (mixed) single-mode state: 2 * identity.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("thermal.json");
    std::fs::write(
        &path,
        r#"{"n_modes": 1, "ordering": "qpqp", "matrix": [[2.0, 0.0], [0.0, 2.0]]}"#,
    )
    .unwrap();
    let report = stdout_json(&run(&["compute", path.to_str().unwrap(), "--all"]));
    assert_eq!(report["pure"], false);
    assert!((report["renyi2_entropy"].as_f64().unwrap() - 2.0f64.ln()).abs() < 1e-12);
    let skipped = report["skipped_pure_only"].as_array().unwrap();
    assert!(skipped.iter().any(|s| s == "gtme"));
    assert!(report.get("gtme").is_none());
    // Explicitly asking for a pure-only quantity on a mixed state fails.
    let output = run(&["compute", path.to_str().unwrap(), "--gtme"]);
    assert_eq!(output.status.code(), Some(3));
}
