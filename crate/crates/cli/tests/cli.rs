//! End-to-end checks of the `polyphase` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn polyphase(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyphase"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

/// Data rows of a CSV document as (header, rows), skipping the schema line.
fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# schema_version=1 command="));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn synth_level_four_is_the_quartic() {
    let v = stdout_json(&polyphase(&["synth", "--level", "4"]));
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "synth");
    assert_eq!(v["display"], "-x^4/48 + x^2/12");
    assert_eq!(v["polynomial"][4], "-1/48");
    assert_eq!(v["polynomial"][2], "1/12");
    assert_eq!(v["degree"], 4);
    assert_eq!(v["verified"], true);
    assert!(v["branch_log"].as_array().unwrap().len() >= 4);
}

#[test]
fn synth_lift_start_agrees_with_power_start() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.json");
    let out = polyphase(&["synth", "--level", "3", "--out", t.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let lifted = stdout_json(&polyphase(&["synth", "--level", "4", "--start", &format!("lift:{}", t.display())]));
    let power = stdout_json(&polyphase(&["synth", "--level", "4"]));
    assert_eq!(lifted["polynomial"], power["polynomial"]);
    assert_eq!(lifted["verified"], true);
}

#[test]
fn synth_poly_reduces_the_original_cubic() {
    let v = stdout_json(&polyphase(&["synth", "--poly", "0,-1/4,1/8,1/4", "--level", "3"]));
    let minima: Vec<Value> = std::iter::once(v["polynomial"].clone())
        .chain(v["alternatives"].as_array().unwrap().iter().cloned())
        .collect();
    let t3 = serde_json::json!(["0/1", "-1/12", "1/8", "1/12"]);
    assert!(minima.contains(&t3), "{minima:?}");
}

#[test]
fn synth_two_qubit_phase_gate() {
    let v = stdout_json(&polyphase(&["synth", "--qubits", "2", "--level", "2"]));
    assert_eq!(v["display"], "-x1^2*x2/4 - x1*x2^2/4 - x1*x2/4");
}

#[test]
fn verify_circuits_passes() {
    let v = stdout_json(&polyphase(&["verify-circuits", "--nogo-count", "30"]));
    assert_eq!(v["all_passed"], true);
    assert!(v["max_identity_residual"].as_f64().unwrap() < 1e-12);
    assert_eq!(v["nogo"].as_array().unwrap().len(), 3);
}

#[test]
fn identity_sweep_prefers_the_square_code() {
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("summary.json");
    let out = polyphase(&[
        "sweep", "--gate", "I", "--nbar-min", "2", "--nbar-max", "6", "--lam-min", "1", "--lam-max", "2.5",
        "--lam-count", "4", "--dinit", "96", "--summary", summary.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = csv_rows(std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(
        header,
        ["gate", "n_bar", "delta", "delta_db", "lam", "avg_infidelity", "t_state_infidelity", "boundary_flag"]
    );
    assert_eq!(rows.len(), 5 * 4);
    assert!(rows.iter().all(|r| r[0] == "I" && r[6].is_empty() && r[7] == "false"));
    let doc: Value = serde_json::from_slice(&std::fs::read(&summary).unwrap()).unwrap();
    let optima = doc["optima"].as_array().unwrap();
    assert_eq!(optima.len(), 5);
    for o in optima {
        assert_eq!(o["lam"].as_f64().unwrap(), 1.0, "{o}");
    }
}

#[test]
fn sweep_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, workers: &str| {
        let path = dir.path().join(name);
        let out = polyphase(&[
            "sweep", "--gate", "T3,sqrtT", "--nbar-min", "3", "--nbar-max", "4", "--lam-count", "3",
            "--dinit", "64", "--workers", workers, "--out", path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read(path).unwrap()
    };
    let a = run("a.csv", "1");
    let b = run("b.csv", "3");
    assert_eq!(a, b);
    let (_, rows) = csv_rows(std::str::from_utf8(&a).unwrap());
    assert_eq!(rows.len(), 2 * 2 * 3);
    assert!(rows.iter().filter(|r| r[0] == "T3").all(|r| !r[6].is_empty()));
    assert!(rows.iter().filter(|r| r[0] == "sqrtT").all(|r| r[6].is_empty()));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let ini = dir.path().join("run.ini");
    std::fs::write(&ini, "[global]\nseed = 7\n\n[vacuum]\ndelta = 0.3,0.35\ngrid = 20\npostselect = 0.5\n").unwrap();
    let cfg = ini.to_str().unwrap();
    let (_, rows) = csv_rows(&String::from_utf8(polyphase(&["--config", cfg, "vacuum"]).stdout).unwrap());
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][0..2], ["0.3", "0.5"]);
    let out = polyphase(&["--config", cfg, "vacuum", "--delta", "0.4", "--postselect", "1"]);
    let (_, rows) = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0..2], ["0.4", "1.0"]);
    let v = stdout_json(&polyphase(&["--config", cfg, "verify-circuits", "--nogo-count", "2"]));
    assert_eq!(v["seed"], 7);
}

#[test]
fn invalid_input_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad_ini = dir.path().join("bad.ini");
    std::fs::write(&bad_ini, "[sweeep]\ngate = T3\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["sweep", "--gate", "T5"],
        vec!["sweep", "--frobnicate"],
        vec!["nonsense"],
        vec!["vacuum", "--delta", "-0.2"],
        vec!["vacuum", "--postselect", "1.5"],
        vec!["synth"],
        vec!["synth", "--level", "3", "--start", "square"],
        vec!["moments", "--delta", "0"],
        vec!["--precision", "32", "moments"],
        vec!["--config", bad_ini.to_str().unwrap(), "moments"],
        vec!["cache", "list"],
    ];
    for args in cases {
        let out = polyphase(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty(), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn unwritable_output_exits_with_two() {
    let out = polyphase(&["ft-bound", "--out", "/nonexistent-dir/bound.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_exits_cleanly() {
    let out = polyphase(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("twirl-density"));
}

#[test]
fn analytic_commands_emit_versioned_documents() {
    let m = stdout_json(&polyphase(&["moments", "--gate", "TGKP", "--delta", "0.3", "--lam", "1.5"]));
    assert_eq!(m["command"], "moments");
    assert!(m["moments"]["e_vp2"].as_f64().unwrap() > m["moments"]["e_vq2"].as_f64().unwrap());
    let b = stdout_json(&polyphase(&["ft-bound", "--delta", "0.05,0.4"]));
    assert_eq!(b["bounds"][0]["validity"], true);
    assert_eq!(b["bounds"][1]["validity"], false);
    let out = polyphase(&["twirl-density", "--grid", "5"]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(header, ["v_q", "v_p", "density"]);
    assert_eq!(rows.len(), 25);
}

fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

fn cache_cmd(dir: &Path, args: &[&str]) -> Value {
    let mut full = vec!["--cache-dir", dir.to_str().unwrap()];
    full.extend_from_slice(args);
    stdout_json(&polyphase(&full))
}

#[test]
fn cache_lifecycle() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(cache_cmd(d, &["cache", "purge"])["removed"], 0);
    assert_eq!(cache_cmd(d, &["cache", "list"])["count"], 0);

    let grid = ["--nbar-min", "4", "--nbar-max", "5", "--lam-min", "1", "--lam-max", "2", "--lam-count", "2", "--dinit", "64"];
    let mut prewarm = vec!["cache", "prewarm"];
    prewarm.extend_from_slice(&grid);
    let warm = cache_cmd(d, &prewarm);
    assert_eq!(warm["built"], 4);
    assert_eq!(warm["files"], 12);

    let listed = cache_cmd(d, &["cache", "list"]);
    let entries = listed["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 12);
    for e in entries {
        let file = e["file"].as_str().unwrap();
        assert_eq!(file, format!("{}.ppop", sha256_hex(e["key"].as_str().unwrap())));
        assert!(d.join(file).exists());
        assert_eq!(e["precision_bits"], 128);
    }

    // A sweep served from the cache agrees with the matrix-free one.
    let mut sweep = vec!["sweep", "--gate", "T3"];
    sweep.extend_from_slice(&grid);
    let cold = polyphase(&sweep);
    let mut cached_args = vec!["--cache-dir", d.to_str().unwrap()];
    cached_args.extend_from_slice(&sweep);
    let warm_run = polyphase(&cached_args);
    assert!(cold.status.success() && warm_run.status.success());
    let (_, a) = csv_rows(std::str::from_utf8(&cold.stdout).unwrap());
    let (_, b) = csv_rows(std::str::from_utf8(&warm_run.stdout).unwrap());
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        let (fx, fy): (f64, f64) = (x[5].parse().unwrap(), y[5].parse().unwrap());
        assert!((fx - fy).abs() < 1e-9, "{fx} vs {fy}");
    }
    assert_eq!(cache_cmd(d, &["cache", "list"])["count"], 12);

    assert_eq!(cache_cmd(d, &["cache", "purge"])["removed"], 12);
    assert_eq!(cache_cmd(d, &["cache", "list"])["count"], 0);
}
