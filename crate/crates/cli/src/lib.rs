//! Runner library behind the `rho-interp` binary; exposed so integration
//! suites can drive experiments in-process.

pub mod checks;
pub mod runner;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rho_interp_core::config::{CalibrateConfig, ExperimentConfig};
use rho_interp_core::error::{Error, Result};
use rho_interp_core::report::{fmt_f64, CheckReport, ConstantsFile};
use rho_interp_core::rng::fnv_hex;

/// Loads a config, runs it in verify mode, and writes the report files.
/// Returns the report and the paths written.
pub fn run_config(path: &Path) -> Result<(CheckReport, Vec<PathBuf>)> {
    let text = std::fs::read_to_string(path)?;
    let cfg = ExperimentConfig::from_json(&text)?;
    let constants = load_constants(&cfg, path)?;
    let mut outcome = runner::execute(&cfg, runner::Mode::Verify, constants.as_ref())?;
    outcome.report.inputs_digest = fnv_hex(text.as_bytes());
    let base = resolve_relative(path, &cfg.out_base());
    let json_path = base.with_extension("json");
    outcome.report.write_json(&json_path)?;
    let mut written = vec![json_path.clone()];
    written.extend(outcome.report.write_csv_tables(&json_path)?);
    Ok((outcome.report, written))
}

/// Runs a calibration config: measures every check over the seed set and
/// freezes `max * margin` per constant key.
pub fn run_calibrate(path: &Path) -> Result<(ConstantsFile, PathBuf)> {
    let cal = CalibrateConfig::from_path(path)?;
    if cal.seeds.is_empty() {
        return Err(Error::config("calibration needs at least one seed"));
    }
    let mut constants: BTreeMap<String, f64> = BTreeMap::new();
    for check in &cal.checks {
        let key = check.constant_key();
        let mut worst: Option<f64> = None;
        for &seed in &cal.seeds {
            let mut cfg = check.clone();
            cfg.seed = seed;
            let outcome = runner::execute(&cfg, runner::Mode::Calibrate, None)?;
            if !outcome.report.pass {
                return Err(Error::config(format!(
                    "calibration run failed structurally for '{key}' at seed {seed}: {:?}",
                    outcome.report.flags
                )));
            }
            let value = outcome.calibration_value.ok_or_else(|| {
                Error::config(format!("check '{key}' does not produce a calibration value"))
            })?;
            worst = Some(worst.map_or(value, |w: f64| w.max(value)));
        }
        constants.insert(key, worst.unwrap() * cal.margin);
    }
    let file = ConstantsFile::new(cal.seeds.clone(), cal.margin, constants);
    let out = resolve_relative(path, &cal.constants_out);
    file.save(&out)?;
    Ok((file, out))
}

/// Merges report JSONs into the summary CSV: check, constant, worst_ratio,
/// pass.
pub fn summarize(reports: &[PathBuf]) -> Result<String> {
    let mut lines = vec!["check,constant,worst_ratio,pass".to_string()];
    for path in reports {
        let text = std::fs::read_to_string(path)?;
        let report: CheckReport = serde_json::from_str(&text)?;
        let constant = report
            .constants
            .get("bound")
            .map(|v| fmt_f64(*v))
            .unwrap_or_default();
        let worst = report
            .get_measurement("worst")
            .map(fmt_f64)
            .unwrap_or_default();
        lines.push(format!(
            "{},{},{},{}",
            report.check,
            constant,
            worst,
            if report.pass { "1" } else { "0" }
        ));
    }
    lines.push(String::new());
    Ok(lines.join("\n"))
}

fn load_constants(
    cfg: &ExperimentConfig,
    config_path: &Path,
) -> Result<Option<ConstantsFile>> {
    let Some(rel) = &cfg.constants_file else {
        return Ok(None);
    };
    let path = resolve_relative(config_path, rel);
    let file = ConstantsFile::load(&path)?;
    if let Some(pin) = &cfg.constants_digest {
        if *pin != file.seed_digest {
            return Err(Error::config(format!(
                "constants digest pin mismatch: config pins {pin}, file has {}",
                file.seed_digest
            )));
        }
    }
    Ok(Some(file))
}

/// Paths inside configs resolve relative to the config file itself.
fn resolve_relative(config_path: &Path, rel: &str) -> PathBuf {
    let p = Path::new(rel);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        config_path.parent().unwrap_or(Path::new(".")).join(p)
    }
}
