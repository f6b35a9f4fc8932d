//! Dispatches experiment configs onto the library checks and normalizes the
//! outcome for verification and calibration.

use rho_interp_core::bilinear::{
    reconstruction_gap, theorem31_check, AscentBudget, Theorem31Config,
};
use rho_interp_core::compactness::{
    persson_check, theorem41_check, theorem43_steps, theorem51_ordered_variant, theorem52_check,
    ApSetup, CoupleOrdering, PerssonConfig, Theorem41Config, Theorem43Config, Theorem52Config,
};
use rho_interp_core::config::{CheckConfig, ExperimentConfig, NormSpec};
use rho_interp_core::couples::{FiniteCouple, WeightedNorm};
use rho_interp_core::error::{Error, Result};
use rho_interp_core::interp::{
    class_j_fit, class_k_check, equivalence_check, linear_bound_check, EquivalenceConfig,
    InterpolationSpec, LinearBoundConfig, Method,
};
use rho_interp_core::params::DilationFunction;
use rho_interp_core::report::{fmt_f64, CheckReport, ConstantsFile, Table};
use rho_interp_core::rng;
use rho_interp_core::seqspaces::{
    cutting, cutting_norm_bounds, embedding_check, theorem21_check, SequenceCheckConfig,
    VectorSequence,
};

/// Whether frozen constants gate the run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Verify,
    Calibrate,
}

/// Report plus the value a calibration run would freeze.
pub struct Outcome {
    pub report: CheckReport,
    pub calibration_value: Option<f64>,
}

fn resolve_norm(spec: &NormSpec, couple: Option<&FiniteCouple<f64>>) -> Result<WeightedNorm<f64>> {
    match spec {
        NormSpec::Explicit { .. } => spec.build_explicit(),
        NormSpec::Preset { preset } => {
            let couple = couple
                .ok_or_else(|| Error::config(format!("norm preset '{preset}' needs a couple")))?;
            match preset.as_str() {
                "norm0" => Ok(couple.norm0().clone()),
                "norm1" => Ok(couple.norm1().clone()),
                other => Err(Error::config(format!("unknown norm preset: {other}"))),
            }
        }
    }
}

/// Runs one experiment. In verify mode `bound` comes from the constants
/// file; in calibrate mode checks run unbounded and yield the value to
/// freeze.
pub fn execute(
    cfg: &ExperimentConfig,
    mode: Mode,
    constants: Option<&ConstantsFile>,
) -> Result<Outcome> {
    let seed = cfg.seed;
    let key = cfg.constant_key();
    let bound = match mode {
        Mode::Calibrate => None,
        Mode::Verify => match constants {
            Some(file) => Some(file.get(&key).ok_or_else(|| {
                Error::config(format!("constants file has no entry for key '{key}'"))
            })?),
            None => None,
        },
    };
    if mode == Mode::Verify && cfg.spec.needs_constant() && constants.is_none() {
        return Err(Error::config(format!(
            "check '{}' requires a constants file",
            cfg.spec.name()
        )));
    }

    let (mut report, calibration_value): (CheckReport, Option<f64>) = match &cfg.spec {
        CheckConfig::KOracle(p) => (crate::checks::k_oracle_check(p, seed)?, None),
        CheckConfig::KProperties(p) => (crate::checks::k_properties_check(p, seed)?, None),
        CheckConfig::BoydClass(p) => (crate::checks::boyd_class_check(p)?, None),
        CheckConfig::Cutting(p) => {
            let couple = p.couple.build(seed, 0)?;
            let mut report = CheckReport::new("cutting");
            let mut rows = Vec::new();
            for n in 0..=p.n_max {
                let sub = cutting_norm_bounds(&couple, p.window, n)?;
                for flag in &sub.flags {
                    if !sub.pass {
                        report.flag(format!("n={n}: {flag}"));
                    }
                }
                report.require(sub.pass, format!("cutting bounds failed at n = {n}"));
                rows.push(vec![
                    n.to_string(),
                    fmt_f64(sub.get_measurement("plus_0to1").unwrap_or(f64::NAN)),
                    fmt_f64(sub.get_measurement("minus_1to0").unwrap_or(f64::NAN)),
                    fmt_f64(sub.get_measurement("plus_1to0").unwrap_or(f64::NAN)),
                    fmt_f64(sub.get_measurement("minus_0to1").unwrap_or(f64::NAN)),
                ]);
            }
            // Partition identity on a few random sequences, exact.
            for i in 0..8u64 {
                let mut r = rng::stream(seed, &[rng::fnv64(b"cutting_ap2"), i]);
                let blocks = (2 * p.window + 1) as usize;
                let flat = rng::sample_vector::<f64>(&mut r, blocks * couple.dim());
                let seq = VectorSequence::unflatten(p.window, couple.dim(), &flat)?;
                let n = (i as i32) % (p.n_max + 1);
                let (mid, plus, minus) = cutting(&seq, n)?;
                let back = mid.add(&plus)?.add(&minus)?;
                report.require(back == seq, "cutting parts must sum back exactly");
            }
            report.table(Table {
                name: "norms".into(),
                columns: vec![
                    "n".into(),
                    "plus_0to1".into(),
                    "minus_1to0".into(),
                    "plus_1to0".into(),
                    "minus_0to1".into(),
                ],
                rows,
            });
            (report, None)
        }
        CheckConfig::Equivalence(p) => {
            let rho = p.rho.build()?;
            let spec = InterpolationSpec::new(&rho, p.q.0, Method::J, p.window)?;
            let couple_spec = p.couple.clone();
            let econfig = EquivalenceConfig {
                samples: p.samples,
                seed,
                spread_bound: bound,
            };
            let mut report =
                equivalence_check(|i| couple_spec.build(seed, i), &spec, &econfig)?;
            if let Some(tol) = p.degenerate_tol {
                let spread = report.get_measurement("spread").unwrap_or(f64::NAN);
                report.require(
                    spread <= 1.0 + tol,
                    "degenerate-couple ratios must be constant",
                );
            }
            let value = report.get_measurement("spread");
            (report, value)
        }
        CheckConfig::Theorem21(p) => {
            let couple = p.couple.build(seed, 0)?;
            let rho = p.rho.build()?;
            let scfg = SequenceCheckConfig {
                seq_window: p.seq_window,
                interp_window: p.interp_window,
                samples: p.samples,
                seed,
                bound,
            };
            let report = theorem21_check(&couple, &rho, p.q.0, &scfg)?;
            let value = report.get_measurement("spread");
            (report, value)
        }
        CheckConfig::Embedding(p) => {
            let couple = p.couple.build(seed, 0)?;
            let rho = p.rho.build()?;
            let scfg = SequenceCheckConfig {
                seq_window: p.seq_window,
                interp_window: p.interp_window,
                samples: p.samples,
                seed,
                bound,
            };
            let report = embedding_check(&couple, &rho, p.q.0, &scfg)?;
            let value = report.get_measurement("fitted_c");
            (report, value)
        }
        CheckConfig::ClassJ(p) => {
            let couple = p.couple.build(seed, 0)?;
            let rho = p.rho.build()?;
            let dil = DilationFunction::compute(&rho)?;
            let fit = |norm: Box<dyn Fn(&[f64]) -> Result<f64> + Sync>| -> Result<CheckReport> {
                let (c, ratios) = class_j_fit(|x| norm(x), &couple, &dil, p.samples, seed)?;
                let mut report = CheckReport::new("class_j");
                report.measure("fitted_c", c);
                report.require(c.is_finite(), "fitted constant must be finite");
                if let Some(b) = bound {
                    report.constant("bound", b);
                    report.require(c <= b, "fitted constant exceeded the frozen bound");
                }
                report.table(Table {
                    name: "ratios".into(),
                    columns: vec!["sample".into(), "ratio".into()],
                    rows: ratios
                        .iter()
                        .enumerate()
                        .map(|(i, r)| vec![i.to_string(), fmt_f64(*r)])
                        .collect(),
                });
                Ok(report)
            };
            let report = match &p.e_norm {
                NormSpec::Preset { preset } if preset == "intersection" => {
                    let c2 = couple.clone();
                    fit(Box::new(move |x| c2.intersection_norm(x)))?
                }
                other => {
                    let norm = resolve_norm(other, Some(&couple))?;
                    fit(Box::new(move |x| Ok(norm.eval(x))))?
                }
            };
            let value = report.get_measurement("fitted_c");
            (report, value)
        }
        CheckConfig::ClassK(p) => {
            let couple = p.couple.build(seed, 0)?;
            let rho = p.rho.build()?;
            let spec = InterpolationSpec::new(&rho, p.q_eval.0, Method::K, p.window)?;
            let norm = resolve_norm(&p.e_norm, Some(&couple))?;
            let report = class_k_check(&norm, &couple, &spec, p.samples, seed, bound)?;
            let value = report.get_measurement("fitted_c");
            (report, value)
        }
        CheckConfig::LinearBound(p) => {
            let couple_e = p.couple_e.build(seed, 0)?;
            let couple_f = p.couple_f.build(seed, 1)?;
            let rho = p.rho.build()?;
            let spec = InterpolationSpec::new(&rho, p.q.0, Method::K, p.window)?;
            let lcfg = LinearBoundConfig {
                samples: p.samples,
                restarts: p.restarts,
                iters: p.iters,
                seed,
                bound,
            };
            let mut report = CheckReport::new("linear_bound");
            let mut worst = 0.0_f64;
            let mut rows = Vec::new();
            for idx in 0..p.count as u64 {
                let t = p.matrix.build(seed, idx)?;
                let sub = linear_bound_check(&t, &couple_e, &couple_f, &spec, &lcfg)?;
                let ratio = sub.get_measurement("ratio").unwrap_or(f64::NAN);
                worst = worst.max(ratio);
                report.require(sub.pass, format!("instance {idx} failed"));
                rows.push(vec![idx.to_string(), fmt_f64(ratio)]);
            }
            report.measure("worst_ratio", worst);
            if let Some(b) = bound {
                report.constant("bound", b);
            }
            report.table(Table {
                name: "ratios".into(),
                columns: vec!["instance".into(), "ratio".into()],
                rows,
            });
            (report, Some(worst))
        }
        CheckConfig::Theorem31(p) => {
            let couple_e = p.couple_e.build(seed, 0)?;
            let couple_f = p.couple_f.build(seed, 1)?;
            let couple_g = p.couple_g.build(seed, 2)?;
            let rho = p.rho.build()?;
            let tcfg = Theorem31Config {
                p: p.p.0,
                q: p.q.0,
                window: p.window,
                samples: p.samples,
                budget: AscentBudget {
                    restarts: p.restarts,
                    iters: 50,
                },
                seed,
                bound,
            };
            let mut report = CheckReport::new("theorem31");
            let mut worst = 0.0_f64;
            let mut worst_recon = 0.0_f64;
            let mut rows = Vec::new();
            let recon_w = p.recon_window.unwrap_or(3);
            let dims = p.tensor.dims();
            for idx in 0..p.count as u64 {
                let t = p.tensor.build(seed, idx)?;
                let sub = theorem31_check(&t, &couple_e, &couple_f, &couple_g, &rho, &tcfg)?;
                let ratio = sub.get_measurement("ratio").unwrap_or(f64::NAN);
                worst = worst.max(ratio);
                report.require(sub.pass, format!("instance {idx} failed"));
                // Reconstruction identity on random windows.
                let mut r = rng::stream(seed, &[rng::fnv64(b"recon"), idx]);
                let blocks_u = (2 * recon_w + 1) as usize * dims[1];
                let blocks_v = (2 * recon_w + 1) as usize * dims[2];
                let u = VectorSequence::unflatten(
                    recon_w,
                    dims[1],
                    &rng::sample_vector::<f64>(&mut r, blocks_u),
                )?;
                let v = VectorSequence::unflatten(
                    recon_w,
                    dims[2],
                    &rng::sample_vector::<f64>(&mut r, blocks_v),
                )?;
                let gap = reconstruction_gap(&t, &u, &v)?;
                worst_recon = worst_recon.max(gap);
                rows.push(vec![idx.to_string(), fmt_f64(ratio), fmt_f64(gap)]);
            }
            report.measure("worst_ratio", worst);
            report.measure("worst_reconstruction_gap", worst_recon);
            report.constant("recon_tol", p.recon_tol);
            report.require(
                worst_recon <= p.recon_tol,
                "convolution reconstruction drifted beyond tolerance",
            );
            if let Some(b) = bound {
                report.constant("bound", b);
            }
            report.table(Table {
                name: "ratios".into(),
                columns: vec!["instance".into(), "ratio".into(), "recon_gap".into()],
                rows,
            });
            (report, Some(worst))
        }
        CheckConfig::Theorem41(p) => {
            let couple_g = p.couple_g.build(seed, 0)?;
            let e_norm = resolve_norm(&p.e_norm, None)?;
            let f_norm = resolve_norm(&p.f_norm, None)?;
            let t = p.tensor.build(seed, 0)?;
            let rho = p.rho.build()?;
            let tcfg = Theorem41Config {
                q: p.q.0,
                window: p.window,
                cloud: p.cloud,
                pairs: p.pairs,
                octaves: p.octaves,
                seed,
                bound,
            };
            let report = theorem41_check(&t, &e_norm, &f_norm, &couple_g, &rho, &tcfg)?;
            let value = report.get_measurement("calibration_ratio");
            (report, value)
        }
        CheckConfig::Theorem43(p) => {
            let couple_e = p.couple_e.build(seed, 0)?;
            let couple_f = p.couple_f.build(seed, 1)?;
            let g_norm = resolve_norm(&p.g_norm, None)?;
            let t = p.tensor.build(seed, 0)?;
            let rho = p.rho.build()?;
            let setup = ApSetup {
                couple_e,
                couple_f,
                window: p.seq_window,
            };
            let tcfg = Theorem43Config {
                p: p.p.0,
                q: p.q.0,
                interp_window: p.interp_window,
                m_grid: p
                    .m_grid
                    .clone()
                    .unwrap_or_else(|| (0..=p.seq_window).collect()),
                samples: p.samples,
                seed,
                decay_tol: p.decay_tol,
                sigma_window: p.sigma_window,
                bound,
            };
            let report = theorem43_steps(&t, &setup, &g_norm, &rho, &tcfg)?;
            let value = report.get_measurement("calibration_ratio");
            (report, value)
        }
        CheckConfig::Theorem51(p) => {
            let g_norm = resolve_norm(&p.g_norm, None)?;
            let t = p.tensor.build(seed, 0)?;
            let rho = p.rho.build()?;
            let ordering = match p.ordering.as_str() {
                "nested" => CoupleOrdering::Nested,
                "second_reversed" => CoupleOrdering::SecondReversed,
                other => {
                    return Err(Error::config(format!("unknown ordering: {other}")));
                }
            };
            let tcfg = Theorem43Config {
                p: p.p.0,
                q: p.q.0,
                interp_window: p.interp_window,
                m_grid: p
                    .m_grid
                    .clone()
                    .unwrap_or_else(|| (0..=p.seq_window).collect()),
                samples: p.samples,
                seed,
                decay_tol: p.decay_tol,
                sigma_window: None,
                bound,
            };
            let report = theorem51_ordered_variant(
                &t,
                p.dim_e,
                p.dim_f,
                p.seq_window,
                ordering,
                &g_norm,
                &rho,
                &tcfg,
            )?;
            let value = report.get_measurement("calibration_ratio");
            (report, value)
        }
        CheckConfig::Theorem52(p) => {
            let rho = p.rho.build()?;
            let tcfg = Theorem52Config {
                p: p.p.0,
                q: p.q.0,
                window: p.window,
                dims: (p.dims[0], p.dims[1]),
                decay_alpha: p.alpha,
                cloud: p.cloud,
                m_max: p.m_max,
                octaves: p.octaves,
                seed,
                bound,
            };
            let report = theorem52_check(&rho, &tcfg)?;
            let value = report.get_measurement("calibration_ratio");
            (report, value)
        }
        CheckConfig::Persson(p) => {
            let couple_e = p.couple_e.build(seed, 0)?;
            let couple_f = p.couple_f.build(seed, 1)?;
            let couple_g = p.couple_g.build(seed, 2)?;
            let t = p.tensor.build(seed, 0)?;
            let rho = p.rho.build()?;
            let pcfg = PerssonConfig {
                p: p.p.0,
                q: p.q.0,
                window: p.window,
                samples: p.samples,
                octaves: p.octaves,
                seed,
                decay_tol: p.decay_tol,
                bound,
            };
            let report = persson_check(&t, &couple_e, &couple_f, &couple_g, &rho, &pcfg)?;
            let value = report.get_measurement("calibration_ratio");
            (report, value)
        }
    };

    // Headline value for summaries.
    let headline = calibration_value
        .or_else(|| report.get_measurement("worst_rel_gap"))
        .or_else(|| report.get_measurement("worst_violation"))
        .or_else(|| report.get_measurement("worst_index_error"))
        .unwrap_or(if report.pass { 0.0 } else { f64::MAX });
    report.measure("worst", headline);
    Ok(Outcome {
        report,
        calibration_value,
    })
}
