//! Real interpolation with function parameters on finite-dimensional weighted
//! sequence-space couples, together with the verification harnesses that
//! measure the quantitative content of the associated bilinear interpolation
//! and compactness theorems.
//!
//! The numeric kernels are generic over the scalar type (see [`scalar::Real`]);
//! the aliases at the crate root fix `f64`, which is what the CLI and the
//! verification suites use.

pub mod bilinear;
pub mod compactness;
pub mod config;
pub mod couples;
pub mod error;
pub mod interp;
pub mod oracle;
pub mod params;
pub mod report;
pub mod rng;
pub mod scalar;
pub mod seqspaces;

pub use error::{Error, Result};
pub use scalar::Real;

/// Function parameter over `f64`.
pub type Param = params::FunctionParameter<f64>;
/// Dilation function over `f64`.
pub type Dilation = params::DilationFunction<f64>;
/// Weighted `l^p` norm over `f64`.
pub type WNorm = couples::WeightedNorm<f64>;
/// Finite couple over `f64`.
pub type Couple = couples::FiniteCouple<f64>;
/// Order-3 coefficient tensor over `f64`.
pub type Tensor = bilinear::BilinearMap<f64>;
/// Windowed vector sequence over `f64`.
pub type Sequence = seqspaces::VectorSequence<f64>;
