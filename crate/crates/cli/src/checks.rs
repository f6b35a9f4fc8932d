//! Composite foundation checks driven by the runner: oracle agreement for
//! the K-solver, the K-functional property suite, and the Boyd/class suite.

use rayon::prelude::*;

use rho_interp_core::couples::{FiniteCouple, KOptions, WeightedNorm};
use rho_interp_core::config::{BoydClassParams, KOracleParams, KPropertiesParams};
use rho_interp_core::error::Result;
use rho_interp_core::oracle;
use rho_interp_core::params::{classify, DilationFunction, FunctionParameter};
use rho_interp_core::report::{fmt_f64, CheckReport, Table};
use rho_interp_core::rng;

const EXPONENT_POOL: [f64; 5] = [1.0, 1.5, 2.0, 3.0, f64::INFINITY];

fn random_couple(seed: u64, index: u64, dim: usize) -> Result<FiniteCouple<f64>> {
    let mut r = rng::stream(seed, &[rng::fnv64(b"oracle_couple"), index]);
    let pick = |r: &mut rng::ChaCha8Rng| {
        EXPONENT_POOL[(rng::unit_f64(r) * 5.0) as usize % 5]
    };
    let p0 = pick(&mut r);
    let p1 = pick(&mut r);
    let w = |r: &mut rng::ChaCha8Rng| -> Vec<f64> {
        (0..dim).map(|_| rng::log_uniform(r, 0.25, 4.0)).collect()
    };
    FiniteCouple::new(
        WeightedNorm::new(p0, w(&mut r))?,
        WeightedNorm::new(p1, w(&mut r))?,
    )
}

/// Solver-versus-oracle agreement: random couples and vectors against the
/// split-grid brute force, plus the closed-form check on the unit l1/linf
/// couple.
pub fn k_oracle_check(params: &KOracleParams, seed: u64) -> Result<CheckReport> {
    let opts = KOptions {
        tol: 1e-10,
        max_sweeps: 20_000,
    };
    let gaps: Result<Vec<f64>> = (0..params.instances as u64)
        .into_par_iter()
        .map(|i| {
            let dim = 1 + (i as usize) % params.max_dim;
            let couple = random_couple(seed, i, dim)?;
            let mut r = rng::stream(seed, &[rng::fnv64(b"oracle_vec"), i]);
            let x = rng::sample_vector::<f64>(&mut r, dim);
            let t: f64 = rng::log_uniform(&mut r, 1.0 / 64.0, 64.0);
            let k = couple.k(t, &x, &opts)?;
            let rounds = match dim {
                0..=3 => 60,
                4 => 45,
                5 => 40,
                _ => 32,
            };
            let bf = oracle::k_brute_force(&couple, t, &x, 9, rounds);
            Ok((k - bf).abs() / k.max(bf).max(1e-12))
        })
        .collect();
    let gaps = gaps?;
    let worst = gaps.iter().cloned().fold(0.0_f64, f64::max);

    // Closed-form check on the unit-weight l1/linf couple.
    let cf_tol = params.closed_form_tol.unwrap_or(1e-9);
    let cf_instances = (params.instances / 4).max(32) as u64;
    let cf_gaps: Result<Vec<f64>> = (0..cf_instances)
        .into_par_iter()
        .map(|i| {
            let dim = 2 + (i as usize) % 7;
            let couple = FiniteCouple::new(
                WeightedNorm::uniform(1.0, dim)?,
                WeightedNorm::uniform(f64::INFINITY, dim)?,
            )?;
            let mut r = rng::stream(seed, &[rng::fnv64(b"oracle_cf"), i]);
            let x = rng::sample_vector::<f64>(&mut r, dim);
            let t: f64 = rng::log_uniform(&mut r, 0.25, 2.0 * dim as f64);
            let k = couple.k(t, &x, &opts)?;
            let formula = oracle::k_l1_linf_unit(t, &x);
            Ok((k - formula).abs() / formula.max(1e-12))
        })
        .collect();
    let cf_worst = cf_gaps?.iter().cloned().fold(0.0_f64, f64::max);

    let mut report = CheckReport::new("k_oracle");
    report.measure("worst_rel_gap", worst);
    report.measure("closed_form_worst", cf_worst);
    report.constant("tol_rel", params.tol_rel);
    report.constant("closed_form_tol", cf_tol);
    report.require(worst <= params.tol_rel, "solver/oracle gap exceeded tolerance");
    report.require(cf_worst <= cf_tol, "closed-form gap exceeded tolerance");
    Ok(report)
}

/// K-functional property suite: monotonicity and concavity in t,
/// homogeneity, and the triangle inequality over random instances.
pub fn k_properties_check(params: &KPropertiesParams, seed: u64) -> Result<CheckReport> {
    let opts = KOptions::default();
    let tol = params.tol_rel;
    let violations: Result<Vec<f64>> = (0..params.instances as u64)
        .into_par_iter()
        .map(|i| {
            let dim = 1 + (i as usize) % params.max_dim;
            let couple = random_couple(seed, i * 2 + 1, dim)?;
            let mut r = rng::stream(seed, &[rng::fnv64(b"props_vec"), i]);
            let x = rng::sample_vector::<f64>(&mut r, dim);
            let y = rng::sample_vector::<f64>(&mut r, dim);
            let ts: Vec<f64> = (-4..=4).map(|k| (k as f64).exp2()).collect();
            let ks: Result<Vec<f64>> = ts.iter().map(|&t| couple.k(t, &x, &opts)).collect();
            let ks = ks?;
            let mut worst = 0.0_f64;
            for w in ks.windows(2) {
                worst = worst.max((w[0] - w[1]) / w[0].max(1e-12));
            }
            for idx in 0..ts.len() - 2 {
                let lam = (ts[idx + 2] - ts[idx + 1]) / (ts[idx + 2] - ts[idx]);
                let chord = lam * ks[idx] + (1.0 - lam) * ks[idx + 2];
                worst = worst.max((chord - ks[idx + 1]) / chord.max(1e-12));
            }
            let t = ts[5];
            let kx = ks[5];
            let x4: Vec<f64> = x.iter().map(|v| 4.0 * v).collect();
            let k4 = couple.k(t, &x4, &opts)?;
            worst = worst.max((k4 - 4.0 * kx).abs() / (4.0 * kx).max(1e-12));
            let ky = couple.k(t, &y, &opts)?;
            let xy: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            let kxy = couple.k(t, &xy, &opts)?;
            worst = worst.max((kxy - kx - ky) / (kx + ky).max(1e-12));
            Ok(worst)
        })
        .collect();
    let violations = violations?;
    let worst = violations.iter().cloned().fold(f64::MIN, f64::max);
    let count_beyond = violations.iter().filter(|&&v| v > tol).count();
    let mut report = CheckReport::new("k_properties");
    report.measure("worst_violation", worst.max(0.0));
    report.measure("violations_beyond_tol", count_beyond as f64);
    report.constant("tol_rel", tol);
    report.require(count_beyond == 0, "property violations beyond solver tolerance");
    Ok(report)
}

/// Boyd indices and class membership across the power family, with the
/// closed-form quadrature value for the square-root parameter.
pub fn boyd_class_check(params: &BoydClassParams) -> Result<CheckReport> {
    let mut report = CheckReport::new("boyd_class");
    let mut rows = Vec::new();
    let mut worst_idx_err = 0.0_f64;
    for &theta in &params.thetas {
        let p = FunctionParameter::power(theta)?;
        let d = DilationFunction::compute(&p)?;
        let b = d.boyd();
        let r = classify(&d, 1e-9);
        worst_idx_err = worst_idx_err
            .max((b.alpha - theta).abs())
            .max((b.beta - theta).abs());
        let interior = theta > 0.0 && theta < 1.0;
        report.require(
            r.in_bpm == interior,
            format!("class membership wrong for theta = {theta}"),
        );
        report.require(
            r.upper_index_consistent && r.lower_index_consistent,
            format!("index/integral consistency failed for theta = {theta}"),
        );
        rows.push(vec![
            fmt_f64(theta),
            fmt_f64(b.alpha),
            fmt_f64(b.beta),
            (r.in_bpm as u8).to_string(),
            r.integral_value.map(fmt_f64).unwrap_or_default(),
        ]);
    }
    report.measure("worst_index_error", worst_idx_err);
    report.constant("boyd_tol", params.boyd_tol);
    report.require(
        worst_idx_err <= params.boyd_tol,
        "Boyd indices drifted beyond tolerance",
    );
    // Endpoint powers are rejected.
    for theta in [0.0, 1.0] {
        let p = FunctionParameter::power(theta)?;
        let d = DilationFunction::compute(&p)?;
        let r = classify(&d, 1e-9);
        report.require(!r.in_bpm, format!("theta = {theta} must be rejected"));
        report.require(!r.in_ppm, format!("theta = {theta} fails the little-o test"));
    }
    // Quadrature value for the square-root parameter.
    let p = FunctionParameter::power(0.5)?;
    let d = DilationFunction::compute(&p)?;
    let r = classify(&d, 1e-9);
    let integral = r.integral_value.unwrap_or(f64::NAN);
    report.measure("integral_sqrt", integral);
    report.constant("integral_tol", params.integral_tol);
    report.require(
        (integral - 4.0).abs() <= params.integral_tol,
        "condition-(3) integral for the square-root parameter missed 4",
    );
    report.table(Table {
        name: "family".into(),
        columns: vec![
            "theta".into(),
            "alpha".into(),
            "beta".into(),
            "in_bpm".into(),
            "integral".into(),
        ],
        rows,
    });
    Ok(report)
}
