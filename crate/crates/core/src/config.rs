//! JSON experiment configuration: strictly validated specs for function
//! parameters, couples, norms, tensors, and the named checks, plus builders
//! into the concrete `f64` objects the runner executes.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer};

use crate::bilinear::BilinearMap;
use crate::couples::{FiniteCouple, WeightedNorm};
use crate::error::{Error, Result};
use crate::interp::DenseMatrix;
use crate::params::FunctionParameter;
use crate::rng;

/// An exponent in `[1, inf]`; accepts a number or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QValue(pub f64);

impl<'de> Deserialize<'de> for QValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(QValue(v)),
            Raw::Text(s) => match s.as_str() {
                "inf" | "infinity" | "Inf" => Ok(QValue(f64::INFINITY)),
                other => Err(D::Error::custom(format!("invalid exponent: {other}"))),
            },
        }
    }
}

/// Parameter family declaration.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ParamSpec {
    Power { theta: f64 },
    Powerlog { theta: f64, a: f64 },
    Piecewise { theta_minus: f64, theta_plus: f64 },
    Table { points: Vec<(f64, f64)> },
}

impl ParamSpec {
    pub fn build(&self) -> Result<FunctionParameter<f64>> {
        match self {
            ParamSpec::Power { theta } => FunctionParameter::power(*theta),
            ParamSpec::Powerlog { theta, a } => FunctionParameter::power_log(*theta, *a),
            ParamSpec::Piecewise {
                theta_minus,
                theta_plus,
            } => FunctionParameter::piecewise(*theta_minus, *theta_plus),
            ParamSpec::Table { points } => FunctionParameter::table(points.clone()),
        }
    }
}

/// Couple declaration: explicit weighted norms or a named preset.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum CoupleSpec {
    Explicit {
        dim: usize,
        p0: QValue,
        w0: Vec<f64>,
        p1: QValue,
        w1: Vec<f64>,
    },
    Preset {
        preset: String,
        dim: usize,
        #[serde(default)]
        alpha: Option<f64>,
        #[serde(default)]
        seed: Option<u64>,
    },
}

impl CoupleSpec {
    /// Builds the couple; preset randomness derives from
    /// `(root_seed, index)` unless the spec pins its own seed.
    pub fn build(&self, root_seed: u64, index: u64) -> Result<FiniteCouple<f64>> {
        match self {
            CoupleSpec::Explicit { dim, p0, w0, p1, w1 } => {
                if w0.len() != *dim || w1.len() != *dim {
                    return Err(Error::config("weight lengths must equal dim"));
                }
                FiniteCouple::new(WeightedNorm::new(p0.0, w0.clone())?, WeightedNorm::new(p1.0, w1.clone())?)
            }
            CoupleSpec::Preset {
                preset,
                dim,
                alpha,
                seed,
            } => {
                let dim = *dim;
                if dim == 0 {
                    return Err(Error::config("dim must be positive"));
                }
                let a = alpha.unwrap_or(1.0);
                let sd = seed.unwrap_or_else(|| rng::child_seed(root_seed, &[index]));
                let dyadic: Vec<f64> = (0..dim).map(|i| (-(a * i as f64)).exp2()).collect();
                match preset.as_str() {
                    "l1_linf" => FiniteCouple::new(
                        WeightedNorm::uniform(1.0, dim)?,
                        WeightedNorm::uniform(f64::INFINITY, dim)?,
                    ),
                    "dyadic_weights" | "ordered" => FiniteCouple::new(
                        WeightedNorm::uniform(1.0, dim)?,
                        WeightedNorm::new(1.0, dyadic)?,
                    ),
                    "ordered_reversed" => FiniteCouple::new(
                        WeightedNorm::new(1.0, dyadic)?,
                        WeightedNorm::uniform(1.0, dim)?,
                    ),
                    "degenerate" => {
                        let mut r = rng::stream(sd, &[rng::fnv64(b"degenerate")]);
                        let ps = [1.0, 2.0, f64::INFINITY];
                        let p = ps[(rng::unit_f64(&mut r) * 3.0) as usize % 3];
                        let w: Vec<f64> =
                            (0..dim).map(|_| rng::log_uniform(&mut r, 0.25, 4.0)).collect();
                        let norm = WeightedNorm::new(p, w)?;
                        FiniteCouple::new(norm.clone(), norm)
                    }
                    "random" => {
                        let mut r = rng::stream(sd, &[rng::fnv64(b"random_couple")]);
                        let ps = [1.0, 2.0, f64::INFINITY];
                        let pick = |r: &mut rand_chacha::ChaCha8Rng| {
                            ps[(rng::unit_f64(r) * 3.0) as usize % 3]
                        };
                        let p0 = pick(&mut r);
                        let p1 = pick(&mut r);
                        let w = |r: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
                            (0..dim).map(|_| rng::log_uniform(r, 0.25, 4.0)).collect()
                        };
                        FiniteCouple::new(
                            WeightedNorm::new(p0, w(&mut r))?,
                            WeightedNorm::new(p1, w(&mut r))?,
                        )
                    }
                    other => Err(Error::config(format!("unknown couple preset: {other}"))),
                }
            }
        }
    }

    /// True when the preset draws fresh randomness per index.
    pub fn per_index(&self) -> bool {
        matches!(
            self,
            CoupleSpec::Preset { preset, seed: None, .. }
                if preset == "random" || preset == "degenerate"
        )
    }
}

/// A single weighted norm, explicit or derived from a couple.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum NormSpec {
    Preset { preset: String },
    Explicit { p: QValue, weights: Vec<f64> },
}

impl NormSpec {
    pub fn build_explicit(&self) -> Result<WeightedNorm<f64>> {
        match self {
            NormSpec::Explicit { p, weights } => WeightedNorm::new(p.0, weights.clone()),
            NormSpec::Preset { preset } => Err(Error::config(format!(
                "norm preset '{preset}' needs a couple context"
            ))),
        }
    }
}

/// Tensor declaration.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TensorSpec {
    Dense {
        dims: [usize; 3],
        coeffs: Vec<f64>,
    },
    Rank1 {
        a: Vec<f64>,
        b: Vec<f64>,
        c: Vec<f64>,
    },
    DiagonalDecay {
        dim: usize,
        alpha: f64,
    },
    Random {
        dims: [usize; 3],
        #[serde(default)]
        seed: Option<u64>,
    },
}

impl TensorSpec {
    pub fn build(&self, root_seed: u64, index: u64) -> Result<BilinearMap<f64>> {
        match self {
            TensorSpec::Dense { dims, coeffs } => {
                BilinearMap::new(dims[0], dims[1], dims[2], coeffs.clone())
            }
            TensorSpec::Rank1 { a, b, c } => BilinearMap::rank_one(a, b, c),
            TensorSpec::DiagonalDecay { dim, alpha } => {
                BilinearMap::diagonal_decay(*dim, *alpha)
            }
            TensorSpec::Random { dims, seed } => {
                let sd = seed.unwrap_or_else(|| rng::child_seed(root_seed, &[index]));
                BilinearMap::random(dims[0], dims[1], dims[2], sd)
            }
        }
    }

    pub fn dims(&self) -> [usize; 3] {
        match self {
            TensorSpec::Dense { dims, .. } | TensorSpec::Random { dims, .. } => *dims,
            TensorSpec::Rank1 { a, b, c } => [c.len(), a.len(), b.len()],
            TensorSpec::DiagonalDecay { dim, .. } => [*dim; 3],
        }
    }
}

/// Dense matrix declaration for the linear bound check.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    Preset {
        preset: String,
        rows: usize,
        cols: usize,
        #[serde(default)]
        seed: Option<u64>,
    },
    Dense {
        rows: usize,
        cols: usize,
        data: Vec<f64>,
    },
}

impl MatrixSpec {
    pub fn build(&self, root_seed: u64, index: u64) -> Result<DenseMatrix<f64>> {
        match self {
            MatrixSpec::Dense { rows, cols, data } => DenseMatrix::new(*rows, *cols, data.clone()),
            MatrixSpec::Preset {
                preset,
                rows,
                cols,
                seed,
            } => match preset.as_str() {
                "identity" => {
                    if rows != cols {
                        return Err(Error::config("identity preset needs rows == cols"));
                    }
                    Ok(DenseMatrix::identity(*rows))
                }
                "random" => {
                    let sd = seed.unwrap_or_else(|| rng::child_seed(root_seed, &[index]));
                    let mut r = rng::stream(sd, &[rng::fnv64(b"matrix")]);
                    let data = (0..rows * cols).map(|_| rng::symmetric(&mut r)).collect();
                    DenseMatrix::new(*rows, *cols, data)
                }
                other => Err(Error::config(format!("unknown matrix preset: {other}"))),
            },
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        match self {
            MatrixSpec::Dense { rows, cols, .. } | MatrixSpec::Preset { rows, cols, .. } => {
                (*rows, *cols)
            }
        }
    }
}

fn default_window() -> i32 {
    12
}
fn default_samples() -> usize {
    100
}
fn default_tol_rel() -> f64 {
    1e-6
}
fn default_decay_tol() -> f64 {
    1e-3
}
fn default_octaves() -> usize {
    10
}
fn default_restarts() -> usize {
    32
}
fn default_iters() -> usize {
    50
}
fn default_count() -> usize {
    1
}
fn default_m_max() -> usize {
    9
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KOracleParams {
    pub instances: usize,
    pub max_dim: usize,
    #[serde(default = "default_tol_rel")]
    pub tol_rel: f64,
    #[serde(default)]
    pub closed_form_tol: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KPropertiesParams {
    pub instances: usize,
    pub max_dim: usize,
    #[serde(default = "default_tol_rel")]
    pub tol_rel: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoydClassParams {
    pub thetas: Vec<f64>,
    #[serde(default = "default_boyd_tol")]
    pub boyd_tol: f64,
    #[serde(default = "default_boyd_tol")]
    pub integral_tol: f64,
}
fn default_boyd_tol() -> f64 {
    1e-3
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquivalenceParams {
    pub couple: CoupleSpec,
    pub rho: ParamSpec,
    pub q: QValue,
    #[serde(default = "default_window")]
    pub window: i32,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Degenerate-couple runs additionally pin the spread to 1 within this
    /// tolerance.
    #[serde(default)]
    pub degenerate_tol: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceParams {
    pub couple: CoupleSpec,
    pub rho: ParamSpec,
    pub q: QValue,
    pub seq_window: i32,
    pub interp_window: i32,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CuttingParams {
    pub couple: CoupleSpec,
    pub window: i32,
    pub n_max: i32,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassJParams {
    pub e_norm: NormSpec,
    pub couple: CoupleSpec,
    pub rho: ParamSpec,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassKParams {
    pub e_norm: NormSpec,
    pub couple: CoupleSpec,
    pub rho: ParamSpec,
    pub q_eval: QValue,
    #[serde(default = "default_window")]
    pub window: i32,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearBoundParams {
    pub matrix: MatrixSpec,
    pub couple_e: CoupleSpec,
    pub couple_f: CoupleSpec,
    pub rho: ParamSpec,
    pub q: QValue,
    #[serde(default = "default_window")]
    pub window: i32,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_iters")]
    pub iters: usize,
    /// Number of operator instances (random presets draw one per index).
    #[serde(default = "default_count")]
    pub count: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Theorem31Params {
    pub tensor: TensorSpec,
    pub couple_e: CoupleSpec,
    pub couple_f: CoupleSpec,
    pub couple_g: CoupleSpec,
    pub rho: ParamSpec,
    pub p: QValue,
    pub q: QValue,
    #[serde(default = "default_window")]
    pub window: i32,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_count")]
    pub count: usize,
    /// Window of the random sequences in the reconstruction subcheck.
    #[serde(default)]
    pub recon_window: Option<i32>,
    #[serde(default = "default_recon_tol")]
    pub recon_tol: f64,
}
fn default_recon_tol() -> f64 {
    1e-12
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Theorem41Params {
    pub tensor: TensorSpec,
    pub e_norm: NormSpec,
    pub f_norm: NormSpec,
    pub couple_g: CoupleSpec,
    pub rho: ParamSpec,
    pub q: QValue,
    #[serde(default = "default_window")]
    pub window: i32,
    pub cloud: usize,
    pub pairs: usize,
    #[serde(default = "default_octaves")]
    pub octaves: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Theorem43Params {
    pub tensor: TensorSpec,
    pub couple_e: CoupleSpec,
    pub couple_f: CoupleSpec,
    pub g_norm: NormSpec,
    pub rho: ParamSpec,
    pub p: QValue,
    pub q: QValue,
    pub seq_window: i32,
    pub interp_window: i32,
    #[serde(default)]
    pub m_grid: Option<Vec<i32>>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_decay_tol")]
    pub decay_tol: f64,
    #[serde(default)]
    pub sigma_window: Option<i32>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Theorem51Params {
    pub tensor: TensorSpec,
    pub dim_e: usize,
    pub dim_f: usize,
    pub g_norm: NormSpec,
    pub rho: ParamSpec,
    pub p: QValue,
    pub q: QValue,
    pub seq_window: i32,
    pub interp_window: i32,
    /// "nested" or "second_reversed".
    pub ordering: String,
    #[serde(default)]
    pub m_grid: Option<Vec<i32>>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_decay_tol")]
    pub decay_tol: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Theorem52Params {
    pub rho: ParamSpec,
    pub p: QValue,
    pub q: QValue,
    #[serde(default = "default_window")]
    pub window: i32,
    pub dims: [usize; 2],
    pub alpha: f64,
    pub cloud: usize,
    #[serde(default = "default_m_max")]
    pub m_max: usize,
    #[serde(default = "default_octaves")]
    pub octaves: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerssonParams {
    pub tensor: TensorSpec,
    pub couple_e: CoupleSpec,
    pub couple_f: CoupleSpec,
    pub couple_g: CoupleSpec,
    pub rho: ParamSpec,
    pub p: QValue,
    pub q: QValue,
    #[serde(default = "default_window")]
    pub window: i32,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_octaves")]
    pub octaves: usize,
    #[serde(default = "default_decay_tol")]
    pub decay_tol: f64,
}

/// The named check with its parameters.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "check", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckConfig {
    KOracle(KOracleParams),
    KProperties(KPropertiesParams),
    BoydClass(BoydClassParams),
    Equivalence(EquivalenceParams),
    Theorem21(SequenceParams),
    Embedding(SequenceParams),
    Cutting(CuttingParams),
    ClassJ(ClassJParams),
    ClassK(ClassKParams),
    LinearBound(LinearBoundParams),
    Theorem31(Theorem31Params),
    Theorem41(Theorem41Params),
    Theorem43(Theorem43Params),
    Theorem51(Theorem51Params),
    Theorem52(Theorem52Params),
    Persson(PerssonParams),
}

impl CheckConfig {
    pub fn name(&self) -> &'static str {
        match self {
            CheckConfig::KOracle(_) => "k_oracle",
            CheckConfig::KProperties(_) => "k_properties",
            CheckConfig::BoydClass(_) => "boyd_class",
            CheckConfig::Equivalence(_) => "equivalence",
            CheckConfig::Theorem21(_) => "theorem21",
            CheckConfig::Embedding(_) => "embedding",
            CheckConfig::Cutting(_) => "cutting",
            CheckConfig::ClassJ(_) => "class_j",
            CheckConfig::ClassK(_) => "class_k",
            CheckConfig::LinearBound(_) => "linear_bound",
            CheckConfig::Theorem31(_) => "theorem31",
            CheckConfig::Theorem41(_) => "theorem41",
            CheckConfig::Theorem43(_) => "theorem43",
            CheckConfig::Theorem51(_) => "theorem51",
            CheckConfig::Theorem52(_) => "theorem52",
            CheckConfig::Persson(_) => "persson",
        }
    }

    /// True when the check compares against a frozen calibrated constant.
    pub fn needs_constant(&self) -> bool {
        !matches!(
            self,
            CheckConfig::KOracle(_)
                | CheckConfig::KProperties(_)
                | CheckConfig::BoydClass(_)
                | CheckConfig::Cutting(_)
        )
    }
}

/// One experiment: a seed, a check, and output/constants plumbing.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(flatten)]
    pub spec: CheckConfig,
    #[serde(default)]
    pub constants_file: Option<String>,
    #[serde(default)]
    pub constants_digest: Option<String>,
    /// Output basename (without extension) for report files.
    #[serde(default)]
    pub out: Option<String>,
    /// Key under which the check's calibrated constant is stored; defaults
    /// to the check name.
    #[serde(default)]
    pub label: Option<String>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn constant_key(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.spec.name().to_string())
    }

    pub fn out_base(&self) -> String {
        self.out
            .clone()
            .unwrap_or_else(|| format!("{}_{}", self.spec.name(), self.seed))
    }
}

/// A calibration run: the check configs to measure and the seed set to
/// measure them over.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrateConfig {
    pub seeds: Vec<u64>,
    #[serde(default = "default_margin")]
    pub margin: f64,
    pub constants_out: String,
    pub checks: Vec<ExperimentConfig>,
}
fn default_margin() -> f64 {
    1.25
}

impl CalibrateConfig {
    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_equivalence_config() {
        let text = r#"{
            "seed": 42,
            "check": "equivalence",
            "params": {
                "couple": {"preset": "random", "dim": 3},
                "rho": {"family": "power", "theta": 0.5},
                "q": 1,
                "window": 10,
                "samples": 50
            },
            "label": "eq-pow05-q1"
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.spec.name(), "equivalence");
        assert_eq!(cfg.constant_key(), "eq-pow05-q1");
        match &cfg.spec {
            CheckConfig::Equivalence(p) => {
                assert_eq!(p.q.0, 1.0);
                assert!(p.couple.per_index());
            }
            _ => panic!("wrong variant"),
        }
    }

    #[test]
    fn rejects_unknown_keys() {
        let text = r#"{
            "seed": 1,
            "check": "cutting",
            "params": {"couple": {"preset": "l1_linf", "dim": 2}, "window": 8, "n_max": 4, "bogus": 1}
        }"#;
        assert!(ExperimentConfig::from_json(text).is_err());
        let text2 = r#"{"seed": 1, "check": "nonsense", "params": {}}"#;
        assert!(ExperimentConfig::from_json(text2).is_err());
        let text3 = r#"{
            "seed": 1,
            "check": "cutting",
            "params": {"couple": {"preset": "l1_linf", "dim": 2}, "window": 8, "n_max": 4},
            "top_level_junk": true
        }"#;
        assert!(ExperimentConfig::from_json(text3).is_err());
    }

    #[test]
    fn q_accepts_inf() {
        let text = r#"{
            "seed": 1,
            "check": "equivalence",
            "params": {
                "couple": {"dim": 2, "p0": 1, "w0": [1.0, 1.0], "p1": "inf", "w1": [1.0, 1.0]},
                "rho": {"family": "power", "theta": 0.3},
                "q": "inf"
            }
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        match &cfg.spec {
            CheckConfig::Equivalence(p) => {
                assert!(p.q.0.is_infinite());
                let c = p.couple.build(1, 0).unwrap();
                assert!(c.norm1().is_inf());
            }
            _ => panic!(),
        }
    }

    #[test]
    fn couple_presets_build() {
        for preset in ["l1_linf", "dyadic_weights", "ordered_reversed", "degenerate", "random"] {
            let spec = CoupleSpec::Preset {
                preset: preset.into(),
                dim: 3,
                alpha: None,
                seed: None,
            };
            let c = spec.build(7, 0).unwrap();
            assert_eq!(c.dim(), 3);
        }
        let bad = CoupleSpec::Preset {
            preset: "nope".into(),
            dim: 3,
            alpha: None,
            seed: None,
        };
        assert!(bad.build(7, 0).is_err());
        // Identical (seed, index) pairs give identical couples.
        let spec = CoupleSpec::Preset {
            preset: "random".into(),
            dim: 3,
            alpha: None,
            seed: None,
        };
        let a = spec.build(7, 3).unwrap();
        let b = spec.build(7, 3).unwrap();
        assert_eq!(a.norm0().weights(), b.norm0().weights());
    }

    #[test]
    fn tensor_specs_build() {
        let d = TensorSpec::DiagonalDecay { dim: 4, alpha: 0.5 };
        assert_eq!(d.build(0, 0).unwrap().dims(), (4, 4, 4));
        let r = TensorSpec::Random {
            dims: [2, 3, 4],
            seed: None,
        };
        assert_eq!(r.build(5, 1).unwrap().dims(), (2, 3, 4));
        assert_eq!(r.dims(), [2, 3, 4]);
    }
}
