//! CLI contract tests: exit codes, schema rejection, constants plumbing, and
//! the summary table.

use std::path::Path;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_rho-interp")
}

fn write(path: &Path, text: &str) {
    std::fs::create_dir_all(path.parent().unwrap()).unwrap();
    std::fs::write(path, text).unwrap();
}

const CUTTING_CFG: &str = r#"{
    "seed": 7,
    "check": "cutting",
    "params": {"couple": {"preset": "l1_linf", "dim": 2}, "window": 8, "n_max": 4},
    "out": "out/cutting"
}"#;

#[test]
fn run_pass_exits_zero_and_writes_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cutting.json");
    write(&cfg, CUTTING_CFG);
    let out = Command::new(bin()).arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(tmp.path().join("out/cutting.json").exists());
    assert!(tmp.path().join("out/cutting_norms.csv").exists());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("cutting: PASS"));
}

#[test]
fn schema_violation_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.json");
    write(
        &cfg,
        r#"{"seed": 1, "check": "cutting", "params": {"couple": {"preset": "l1_linf", "dim": 2}, "window": 8, "n_max": 4, "extra": true}}"#,
    );
    let out = Command::new(bin()).arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dim_mismatch_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let mut constants = std::collections::BTreeMap::new();
    constants.insert("theorem31".to_string(), 100.0);
    let file = rho_interp_core::report::ConstantsFile::new(vec![1, 2], 1.0, constants);
    file.save(&tmp.path().join("constants.json")).unwrap();
    let cfg = tmp.path().join("mismatch.json");
    // 3x3x3 tensor against dim-2 couples.
    write(
        &cfg,
        r#"{
        "seed": 1,
        "check": "theorem31",
        "params": {
            "tensor": {"kind": "random", "dims": [3, 3, 3]},
            "couple_e": {"preset": "l1_linf", "dim": 2},
            "couple_f": {"preset": "l1_linf", "dim": 3},
            "couple_g": {"preset": "l1_linf", "dim": 3},
            "rho": {"family": "power", "theta": 0.5},
            "p": 1, "q": 1, "count": 1
        },
        "constants_file": "constants.json"
        }"#,
    );
    let out = Command::new(bin()).arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension mismatch"));
}

#[test]
fn missing_constants_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("eq.json");
    write(
        &cfg,
        r#"{
        "seed": 1,
        "check": "equivalence",
        "params": {
            "couple": {"preset": "random", "dim": 2},
            "rho": {"family": "power", "theta": 0.5},
            "q": 1, "samples": 4, "window": 6
        }}"#,
    );
    let out = Command::new(bin()).arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("constants"));
}

#[test]
fn tampered_constants_digest_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let constants = tmp.path().join("constants.json");
    write(
        &constants,
        r#"{
        "version": 1,
        "calibration_seeds": [1, 2],
        "seed_digest": "deadbeefdeadbeef",
        "margin": 1.25,
        "constants": {"eq": 10.0}
    }"#,
    );
    let cfg = tmp.path().join("eq.json");
    write(
        &cfg,
        r#"{
        "seed": 1,
        "check": "equivalence",
        "params": {
            "couple": {"preset": "random", "dim": 2},
            "rho": {"family": "power", "theta": 0.5},
            "q": 1, "samples": 4, "window": 6
        },
        "label": "eq",
        "constants_file": "constants.json"
    }"#,
    );
    let out = Command::new(bin()).arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("digest"));
}

#[test]
fn check_failure_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    // Freeze an absurdly tight bound so the check fails.
    let seeds = vec![1u64, 2];
    let mut constants = std::collections::BTreeMap::new();
    constants.insert("eq".to_string(), 1.0 + 1e-12);
    let file = rho_interp_core::report::ConstantsFile::new(seeds, 1.0, constants);
    file.save(&tmp.path().join("constants.json")).unwrap();
    let cfg = tmp.path().join("eq.json");
    write(
        &cfg,
        r#"{
        "seed": 1,
        "check": "equivalence",
        "params": {
            "couple": {"preset": "random", "dim": 2},
            "rho": {"family": "power", "theta": 0.5},
            "q": 1, "samples": 8, "window": 6
        },
        "label": "eq",
        "constants_file": "constants.json",
        "out": "out/eq"
    }"#,
    );
    let out = Command::new(bin()).arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    // The report is still written for inspection.
    assert!(tmp.path().join("out/eq.json").exists());
}

#[test]
fn summary_merges_reports() {
    let tmp = tempfile::tempdir().unwrap();
    // Empty merge: header only.
    let out = Command::new(bin()).arg("summary").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("check,constant,worst_ratio,pass"));

    // Single report: one row.
    let cfg = tmp.path().join("cutting.json");
    write(&cfg, CUTTING_CFG);
    let run = Command::new(bin()).arg("run").arg(&cfg).output().unwrap();
    assert_eq!(run.status.code(), Some(0));
    let report = tmp.path().join("out/cutting.json");
    let out = Command::new(bin())
        .arg("summary")
        .arg(&report)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.trim_end().lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("cutting,"));
    assert!(lines[1].ends_with(",1"));

    // Malformed report is a usage error.
    let bad = tmp.path().join("bad.json");
    write(&bad, "{not json");
    let out = Command::new(bin()).arg("summary").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn calibrate_writes_verifiable_constants() {
    let tmp = tempfile::tempdir().unwrap();
    let cal = tmp.path().join("calibrate.json");
    write(
        &cal,
        r#"{
        "seeds": [11, 12],
        "margin": 1.5,
        "constants_out": "constants.json",
        "checks": [{
            "seed": 0,
            "check": "equivalence",
            "params": {
                "couple": {"preset": "random", "dim": 2},
                "rho": {"family": "power", "theta": 0.5},
                "q": 1, "samples": 16, "window": 8
            },
            "label": "eq-tiny"
        }]
    }"#,
    );
    let out = Command::new(bin()).arg("calibrate").arg(&cal).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let constants = tmp.path().join("constants.json");
    let file = rho_interp_core::report::ConstantsFile::load(&constants).unwrap();
    assert!(file.get("eq-tiny").unwrap() > 1.0);

    // The frozen value verifies on a fresh seed.
    let cfg = tmp.path().join("eq.json");
    write(
        &cfg,
        r#"{
        "seed": 99,
        "check": "equivalence",
        "params": {
            "couple": {"preset": "random", "dim": 2},
            "rho": {"family": "power", "theta": 0.5},
            "q": 1, "samples": 16, "window": 8
        },
        "label": "eq-tiny",
        "constants_file": "constants.json",
        "out": "out/eq"
    }"#,
    );
    let out = Command::new(bin()).arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}
