//! Structured results of theorem-verification runs, plus the frozen
//! calibration constants file.
//!
//! Reports serialize to JSON (maps are ordered, floats use the shortest
//! round-trip form) and to CSV tables, so identical inputs produce
//! byte-identical outputs regardless of worker count.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::fnv_hex;

/// One named scalar produced by a check.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Measurement {
    pub name: String,
    pub value: f64,
}

/// A CSV payload: column names plus stringly-typed rows.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Structured result of a theorem-verification run.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CheckReport {
    pub check: String,
    /// Digest of the canonicalized inputs; filled in by the runner.
    pub inputs_digest: String,
    /// Constants in play: frozen bounds and fitted values.
    pub constants: BTreeMap<String, f64>,
    pub measurements: Vec<Measurement>,
    pub pass: bool,
    /// Deterministic warnings and notes.
    pub flags: Vec<String>,
    pub tables: Vec<Table>,
}

/// Formats a float the way reports do (shortest round-trip form).
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

impl CheckReport {
    pub fn new(check: impl Into<String>) -> Self {
        CheckReport {
            check: check.into(),
            inputs_digest: String::new(),
            constants: BTreeMap::new(),
            measurements: Vec::new(),
            pass: true,
            flags: Vec::new(),
            tables: Vec::new(),
        }
    }

    /// Records a measurement; non-finite values are clamped and flagged (and
    /// fail the check) so the JSON stays well-formed.
    pub fn measure(&mut self, name: impl Into<String>, value: f64) -> &mut Self {
        let name = name.into();
        let v = if value.is_finite() {
            value
        } else {
            self.flags.push(format!("non-finite measurement: {name}"));
            self.pass = false;
            if value.is_sign_negative() {
                -f64::MAX
            } else {
                f64::MAX
            }
        };
        self.measurements.push(Measurement { name, value: v });
        self
    }

    pub fn constant(&mut self, name: impl Into<String>, value: f64) -> &mut Self {
        self.constants.insert(name.into(), value);
        self
    }

    pub fn flag(&mut self, msg: impl Into<String>) -> &mut Self {
        self.flags.push(msg.into());
        self
    }

    pub fn require(&mut self, ok: bool, msg: impl Into<String>) -> &mut Self {
        if !ok {
            self.pass = false;
            self.flags.push(msg.into());
        }
        self
    }

    pub fn table(&mut self, table: Table) -> &mut Self {
        self.tables.push(table);
        self
    }

    pub fn get_measurement(&self, name: &str) -> Option<f64> {
        self.measurements
            .iter()
            .find(|m| m.name == name)
            .map(|m| m.value)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_json()?.as_bytes())?;
        f.write_all(b"\n")?;
        Ok(())
    }

    /// Writes each table as `<stem>_<table>.csv` next to `json_path`; returns
    /// the paths written.
    pub fn write_csv_tables(&self, json_path: &Path) -> Result<Vec<std::path::PathBuf>> {
        let stem = json_path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("report")
            .to_string();
        let dir = json_path.parent().unwrap_or(Path::new("."));
        let mut written = Vec::new();
        for t in &self.tables {
            let path = dir.join(format!("{stem}_{}.csv", t.name));
            let mut f = std::fs::File::create(&path)?;
            writeln!(f, "{}", t.columns.join(","))?;
            for row in &t.rows {
                writeln!(f, "{}", row.join(","))?;
            }
            written.push(path);
        }
        Ok(written)
    }
}

/// Frozen suite constants with the digest of the calibration seed set.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ConstantsFile {
    pub version: u32,
    pub calibration_seeds: Vec<u64>,
    /// Digest binding the constants to the seed set and key list.
    pub seed_digest: String,
    /// Multiplier applied to calibration maxima before freezing.
    pub margin: f64,
    pub constants: BTreeMap<String, f64>,
}

impl ConstantsFile {
    pub fn digest_for(seeds: &[u64], keys: &[String]) -> String {
        let mut buf = Vec::new();
        for s in seeds {
            buf.extend_from_slice(&s.to_le_bytes());
        }
        for k in keys {
            buf.extend_from_slice(k.as_bytes());
            buf.push(0);
        }
        fnv_hex(&buf)
    }

    pub fn new(seeds: Vec<u64>, margin: f64, constants: BTreeMap<String, f64>) -> Self {
        let keys: Vec<String> = constants.keys().cloned().collect();
        let seed_digest = Self::digest_for(&seeds, &keys);
        ConstantsFile {
            version: 1,
            calibration_seeds: seeds,
            seed_digest,
            margin,
            constants,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let file: ConstantsFile = serde_json::from_str(&text)?;
        file.verify_digest()?;
        Ok(file)
    }

    /// The digest must match before constants may be used as thresholds.
    pub fn verify_digest(&self) -> Result<()> {
        let keys: Vec<String> = self.constants.keys().cloned().collect();
        let expect = Self::digest_for(&self.calibration_seeds, &keys);
        if expect != self.seed_digest {
            return Err(Error::config(format!(
                "constants file digest mismatch: stored {}, recomputed {expect}",
                self.seed_digest
            )));
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let mut f = std::fs::File::create(path)?;
        f.write_all(serde_json::to_string_pretty(self)?.as_bytes())?;
        f.write_all(b"\n")?;
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.constants.get(key).copied()
    }
}
