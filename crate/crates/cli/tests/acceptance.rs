//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Criteria 3-11 drive the committed verify configs (fresh seeds against the
//! frozen calibration constants); criteria 1-2 run the solver/oracle and
//! property suites at full scale; criterion 12 exercises the binary twice
//! with different worker counts and demands byte-identical reports.

use std::path::{Path, PathBuf};
use std::process::Command;

use rho_interp_cli::checks;
use rho_interp_core::config::{BoydClassParams, KOracleParams, KPropertiesParams};
use rho_interp_core::couples::{FiniteCouple, WeightedNorm};
use rho_interp_core::params::FunctionParameter;
use rho_interp_core::seqspaces;

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run_verify(name: &str) -> rho_interp_core::report::CheckReport {
    let path = configs_dir().join("verify").join(format!("{name}.json"));
    let (report, _) = rho_interp_cli::run_config(&path)
        .unwrap_or_else(|e| panic!("{name}: runner error: {e}"));
    report
}

fn announce(criterion: &str, pass: bool) {
    println!("acceptance {criterion}: {}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{criterion} failed");
}

#[test]
fn criterion_01_k_oracle_agreement() {
    let params = KOracleParams {
        instances: 500,
        max_dim: 6,
        tol_rel: 1e-6,
        closed_form_tol: Some(1e-9),
    };
    let report = checks::k_oracle_check(&params, 271_828).unwrap();
    println!(
        "  worst solver/oracle gap {:?}, closed-form gap {:?}",
        report.get_measurement("worst_rel_gap"),
        report.get_measurement("closed_form_worst"),
    );
    announce("criterion 1 (K oracle equivalence)", report.pass);
}

#[test]
fn criterion_02_k_properties() {
    let params = KPropertiesParams {
        instances: 1000,
        max_dim: 6,
        tol_rel: 1e-6,
    };
    let report = checks::k_properties_check(&params, 314_159).unwrap();
    println!(
        "  worst violation {:?}",
        report.get_measurement("worst_violation")
    );
    announce("criterion 2 (K property suite)", report.pass);
}

#[test]
fn criterion_03_boyd_class_suite() {
    let params = BoydClassParams {
        thetas: (1..10).map(|k| 0.1 * k as f64).collect(),
        boyd_tol: 1e-3,
        integral_tol: 1e-3,
    };
    let report = checks::boyd_class_check(&params).unwrap();
    println!(
        "  worst index error {:?}, integral {:?}",
        report.get_measurement("worst_index_error"),
        report.get_measurement("integral_sqrt"),
    );
    announce("criterion 3 (Boyd/class suite)", report.pass);
}

#[test]
fn criterion_04_equivalence_theorem() {
    let mut pass = true;
    for th in ["03", "05", "07"] {
        for q in ["q1", "q2", "qinf"] {
            let report = run_verify(&format!("eq_pow{th}_{q}"));
            println!(
                "  eq-pow{th}-{q}: spread {:?} (bound {:?})",
                report.get_measurement("spread"),
                report.constants.get("spread_bound"),
            );
            pass &= report.pass;
        }
    }
    let degenerate = run_verify("equivalence_degenerate");
    println!(
        "  degenerate spread {:?}",
        degenerate.get_measurement("spread")
    );
    pass &= degenerate.pass;
    announce("criterion 4 (Equivalence Theorem)", pass);
}

#[test]
fn criterion_05_theorem21_and_embedding() {
    let mut pass = true;
    for name in ["theorem21_q1", "theorem21_q2", "embedding"] {
        let report = run_verify(name);
        println!("  {name}: worst {:?}", report.get_measurement("worst"));
        pass &= report.pass;
    }
    // One-hot hand computations, both sides, to 1e-9.
    let couple = FiniteCouple::new(
        WeightedNorm::uniform(1.0, 2).unwrap(),
        WeightedNorm::uniform(f64::INFINITY, 2).unwrap(),
    )
    .unwrap();
    let rho = FunctionParameter::power(0.5).unwrap();
    let block = vec![1.0, -0.5];
    for m0 in [-2, 0, 3] {
        let (interp, direct) =
            seqspaces::theorem21_one_hot_sides(&couple, &rho, 1.0, 4, 40, m0, &block).unwrap();
        let nu = couple.j((-(m0 as f64)).exp2(), &block).unwrap();
        let mut hand = 0.0;
        for n in -40..=40i32 {
            let t = (n as f64).exp2();
            hand += (1.0_f64).min(t * (-(m0 as f64)).exp2()) / t.powf(0.5);
        }
        pass &= (interp - nu * hand).abs() <= 1e-9 * interp;
        let f_direct = nu / (m0 as f64).exp2().powf(0.5);
        pass &= (direct - f_direct).abs() <= 1e-9 * direct;
    }
    announce("criterion 5 (sequence-space reduction)", pass);
}

#[test]
fn criterion_06_cutting_operators() {
    let report = run_verify("cutting");
    let mut pass = report.pass;
    // Exact dyadic values, asserted directly as well.
    let couple = FiniteCouple::new(
        WeightedNorm::uniform(1.0, 2).unwrap(),
        WeightedNorm::uniform(f64::INFINITY, 2).unwrap(),
    )
    .unwrap();
    for n in 0..=10 {
        let sub = seqspaces::cutting_norm_bounds(&couple, 12, n).unwrap();
        let expect = (-(n as f64 + 1.0)).exp2();
        pass &= sub.get_measurement("plus_0to1") == Some(expect);
        pass &= sub.get_measurement("minus_1to0") == Some(expect);
        pass &= sub.pass;
    }
    announce("criterion 6 (cutting operators)", pass);
}

#[test]
fn criterion_07_theorem31() {
    let report = run_verify("theorem31");
    println!(
        "  worst ratio {:?} (bound {:?}), reconstruction gap {:?}",
        report.get_measurement("worst_ratio"),
        report.constants.get("bound"),
        report.get_measurement("worst_reconstruction_gap"),
    );
    announce("criterion 7 (bilinear interpolation bound)", report.pass);
}

#[test]
fn criterion_08_theorem41_transfer() {
    let report = run_verify("theorem41");
    println!(
        "  modulus top {:?} -> bottom {:?}, transfer margin {:?}",
        report.get_measurement("omega_top"),
        report.get_measurement("omega_bottom"),
        report.get_measurement("transfer_margin"),
    );
    announce("criterion 8 (one-sided compactness transfer)", report.pass);
}

#[test]
fn criterion_09_theorem43_and_51_steps() {
    let mut pass = true;
    for name in ["theorem43", "theorem51_nested", "theorem51_second_reversed"] {
        let report = run_verify(name);
        println!(
            "  {name}: final/initial {:?}",
            report.get_measurement("max_final_over_initial")
        );
        pass &= report.pass;
        let decay = report.get_measurement("max_final_over_initial").unwrap();
        pass &= decay <= 1e-3;
    }
    announce("criterion 9 (cutting-decomposition residuals)", pass);
}

#[test]
fn criterion_10_theorem52_entropy() {
    let report = run_verify("theorem52");
    println!(
        "  entropy stability worst ratio {:?}",
        report.get_measurement("stability_worst_ratio")
    );
    let stable = report.get_measurement("stability_worst_ratio").unwrap();
    announce(
        "criterion 10 (entropy profile stability)",
        report.pass && stable <= 2.0,
    );
}

#[test]
fn criterion_11_persson_residual() {
    let report = run_verify("persson");
    println!(
        "  initial residual {:?}, calibration ratio {:?}",
        report.get_measurement("initial_residual"),
        report.get_measurement("calibration_ratio"),
    );
    announce("criterion 11 (smoothing residual)", report.pass);
}

#[test]
fn criterion_12_bit_identical_reports() {
    let bin = env!("CARGO_BIN_EXE_rho-interp");
    let src = configs_dir();
    let mut trees = Vec::new();
    for workers in ["1", "4"] {
        let tmp = tempfile::tempdir().unwrap();
        // Replicate the configs tree so relative outputs land inside the
        // temp dir.
        let cfgs = tmp.path().join("configs");
        std::fs::create_dir_all(cfgs.join("verify")).unwrap();
        std::fs::copy(src.join("constants.json"), cfgs.join("constants.json")).unwrap();
        for entry in std::fs::read_dir(src.join("verify")).unwrap() {
            let entry = entry.unwrap();
            std::fs::copy(entry.path(), cfgs.join("verify").join(entry.file_name())).unwrap();
        }
        let mut names: Vec<_> = std::fs::read_dir(cfgs.join("verify"))
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        names.sort();
        for cfg in names {
            let out = Command::new(bin)
                .arg("run")
                .arg(&cfg)
                .env("RHO_INTERP_WORKERS", workers)
                .output()
                .unwrap();
            assert!(
                out.status.success(),
                "workers={workers} {}: {}",
                cfg.display(),
                String::from_utf8_lossy(&out.stderr)
            );
        }
        trees.push(tmp);
    }
    // Byte-compare every report file across the two runs.
    let read_all = |root: &Path| -> Vec<(String, Vec<u8>)> {
        let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(root.join("reports"))
            .unwrap()
            .map(|e| {
                let p = e.unwrap().path();
                (
                    p.file_name().unwrap().to_string_lossy().into_owned(),
                    std::fs::read(&p).unwrap(),
                )
            })
            .collect();
        files.sort();
        files
    };
    let a = read_all(trees[0].path());
    let b = read_all(trees[1].path());
    assert_eq!(a.len(), b.len());
    assert!(!a.is_empty());
    let mut pass = true;
    for ((name_a, bytes_a), (name_b, bytes_b)) in a.iter().zip(&b) {
        pass &= name_a == name_b && bytes_a == bytes_b;
    }
    println!("  {} report files compared", a.len());
    announce("criterion 12 (worker-count determinism)", pass);
}
