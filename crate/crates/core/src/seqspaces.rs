//! Windowed vector sequences, the block-norm families built from J-values,
//! the summation map, cutting operators, and the sequence-space couple whose
//! K-functional reduces exactly to a scalar weighted couple.
//!
//! Two dyadic weight conventions appear side by side, kept as printed: the
//! sequence norms weight block `n` by `rho(2^{-n})`, while the dyadic method
//! norms of `interp` weight by `rho(2^n)^{-1}`; the reflection
//! `f(t) = 1/rho(1/t)` converts between them. Block norms can likewise be
//! indexed as printed, `J(2^{-m}, .)`, or reflected, `J(2^m, .)`; the
//! reflected indexing is the one under which the summation map is bounded on
//! both weighted endpoints, so the compactness harnesses use it.

use rayon::prelude::*;

use crate::couples::{CoupleNorms, FiniteCouple, KOptions, WeightedNorm};
use crate::error::{Error, Result};
use crate::interp::{k_method_norm, InterpolationSpec};
use crate::params::FunctionParameter;
use crate::report::{fmt_f64, CheckReport, Table};
use crate::rng;
use crate::scalar::{lq_norm, Real};

/// A finite doubly-indexed sequence of vectors, `m in [-window, window]`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorSequence<R: Real> {
    window: i32,
    dim: usize,
    entries: Vec<Vec<R>>,
}

impl<R: Real> VectorSequence<R> {
    pub fn zero(window: i32, dim: usize) -> Result<Self> {
        if window < 0 {
            return Err(Error::domain("window must be nonnegative"));
        }
        let n = (2 * window + 1) as usize;
        Ok(VectorSequence {
            window,
            dim,
            entries: vec![vec![R::zero(); dim]; n],
        })
    }

    pub fn from_entries(window: i32, entries: Vec<Vec<R>>) -> Result<Self> {
        if window < 0 || entries.len() != (2 * window + 1) as usize {
            return Err(Error::domain("entry count must match the window"));
        }
        let dim = entries.first().map(|e| e.len()).unwrap_or(0);
        if entries.iter().any(|e| e.len() != dim) {
            return Err(Error::domain("all entries must share one dimension"));
        }
        Ok(VectorSequence {
            window,
            dim,
            entries,
        })
    }

    pub fn one_hot(window: i32, m: i32, v: Vec<R>) -> Result<Self> {
        let mut s = Self::zero(window, v.len())?;
        if m.abs() > window {
            return Err(Error::domain("one-hot index outside the window"));
        }
        *s.entry_mut(m) = v;
        Ok(s)
    }

    pub fn window(&self) -> i32 {
        self.window
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, m: i32) -> &[R] {
        &self.entries[(m + self.window) as usize]
    }

    pub fn entry_mut(&mut self, m: i32) -> &mut Vec<R> {
        &mut self.entries[(m + self.window) as usize]
    }

    pub fn indices(&self) -> impl Iterator<Item = i32> {
        -self.window..=self.window
    }

    pub fn scaled(&self, c: R) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|e| e.iter().map(|&v| v * c).collect())
            .collect();
        VectorSequence {
            window: self.window,
            dim: self.dim,
            entries,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.window != other.window || self.dim != other.dim {
            return Err(Error::domain("sequence shapes differ"));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| x + y).collect())
            .collect();
        Ok(VectorSequence {
            window: self.window,
            dim: self.dim,
            entries,
        })
    }

    /// Concatenates the blocks, lowest index first.
    pub fn flatten(&self) -> Vec<R> {
        let mut out = Vec::with_capacity(self.entries.len() * self.dim);
        for e in &self.entries {
            out.extend_from_slice(e);
        }
        out
    }

    pub fn unflatten(window: i32, dim: usize, flat: &[R]) -> Result<Self> {
        let blocks = (2 * window + 1) as usize;
        if flat.len() != blocks * dim {
            return Err(Error::domain("flat length does not match window and dim"));
        }
        let entries = (0..blocks)
            .map(|b| flat[b * dim..(b + 1) * dim].to_vec())
            .collect();
        Ok(VectorSequence {
            window,
            dim,
            entries,
        })
    }
}

/// Which dyadic scale renorms block `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeltaIndexing {
    /// `J(2^{-m}, .)`, as printed in the sequence-space definitions.
    AsPrinted,
    /// `J(2^{m}, .)`; the summation map is bounded on both endpoints under
    /// this indexing.
    Reflected,
}

/// A family of norms on the block space, one per index.
pub trait BlockNormFamily<R: Real>: Sync {
    fn block_norm(&self, m: i32, u: &[R]) -> R;
}

/// The intersection renormed by dyadic J-values.
#[derive(Clone, Debug)]
pub struct DeltaNormFamily<'a, R: Real> {
    couple: &'a FiniteCouple<R>,
    indexing: DeltaIndexing,
}

impl<'a, R: Real> DeltaNormFamily<'a, R> {
    pub fn new(couple: &'a FiniteCouple<R>, indexing: DeltaIndexing) -> Self {
        DeltaNormFamily { couple, indexing }
    }

    fn scale(&self, m: i32) -> R {
        match self.indexing {
            DeltaIndexing::AsPrinted => R::of((-m as f64).exp2()),
            DeltaIndexing::Reflected => R::of((m as f64).exp2()),
        }
    }
}

impl<'a, R: Real> BlockNormFamily<R> for DeltaNormFamily<'a, R> {
    fn block_norm(&self, m: i32, u: &[R]) -> R {
        let t = self.scale(m);
        self.couple.norm0().eval(u).max(t * self.couple.norm1().eval(u))
    }
}

/// `[sum_n (rho(2^{-n}) |u_n|_n)^q]^{1/q}` over the window, as printed.
pub fn ell_rho_q_norm<R: Real>(
    seq: &VectorSequence<R>,
    family: &dyn BlockNormFamily<R>,
    rho: &FunctionParameter<R>,
    q: R,
) -> Result<R> {
    let mut terms = Vec::with_capacity((2 * seq.window() + 1) as usize);
    for m in seq.indices() {
        let w = rho.eval(R::of((-m as f64).exp2()))?;
        terms.push(w * family.block_norm(m, seq.entry(m)));
    }
    Ok(lq_norm(&terms, q))
}

/// Coordinate-wise sum of the blocks.
pub fn sigma<R: Real>(seq: &VectorSequence<R>) -> Vec<R> {
    let mut out = vec![R::zero(); seq.dim()];
    for m in seq.indices() {
        for (o, &v) in out.iter_mut().zip(seq.entry(m)) {
            *o += v;
        }
    }
    out
}

/// Cutting operators: `middle` keeps `|m| <= n`, `plus` keeps `m >= n+1`,
/// `minus` keeps `m <= -n-1`. The three parts sum back to the input.
pub fn cutting<R: Real>(
    seq: &VectorSequence<R>,
    n: i32,
) -> Result<(VectorSequence<R>, VectorSequence<R>, VectorSequence<R>)> {
    if n < 0 {
        return Err(Error::domain("cutting index must be nonnegative"));
    }
    let mut middle = VectorSequence::zero(seq.window(), seq.dim())?;
    let mut plus = middle.clone();
    let mut minus = middle.clone();
    for m in seq.indices() {
        let target = if m.abs() <= n {
            &mut middle
        } else if m > n {
            &mut plus
        } else {
            &mut minus
        };
        *target.entry_mut(m) = seq.entry(m).to_vec();
    }
    Ok((middle, plus, minus))
}

/// The couple `(l_0^q(blocks), l_1^q(blocks))`: block norms from a
/// [`DeltaNormFamily`], endpoint `k` weighting block `m` by `2^{-km}`.
///
/// Its K-functional reduces exactly to the K-functional of a scalar weighted
/// `l^q` couple applied to the vector of block norms: block-proportional
/// splits are optimal because the block norms are absolutely homogeneous and
/// satisfy the triangle inequality.
#[derive(Clone, Debug)]
pub struct SequenceCouple<'a, R: Real> {
    couple: &'a FiniteCouple<R>,
    window: i32,
    inner_q: R,
    indexing: DeltaIndexing,
    scalar_couple: FiniteCouple<R>,
}

impl<'a, R: Real> SequenceCouple<'a, R> {
    pub fn new(
        couple: &'a FiniteCouple<R>,
        window: i32,
        inner_q: R,
        indexing: DeltaIndexing,
    ) -> Result<Self> {
        if window < 0 {
            return Err(Error::domain("window must be nonnegative"));
        }
        let block_weight = |k: i32, m: i32| -> R {
            let c = R::of((-(k * m) as f64).exp2());
            if inner_q.is_infinite() {
                c
            } else {
                c.powf(inner_q)
            }
        };
        let w0: Vec<R> = (-window..=window).map(|m| block_weight(0, m)).collect();
        let w1: Vec<R> = (-window..=window).map(|m| block_weight(1, m)).collect();
        let scalar_couple = FiniteCouple::new(
            WeightedNorm::new(inner_q, w0)?,
            WeightedNorm::new(inner_q, w1)?,
        )?;
        Ok(SequenceCouple {
            couple,
            window,
            inner_q,
            indexing,
            scalar_couple,
        })
    }

    pub fn window(&self) -> i32 {
        self.window
    }

    pub fn base(&self) -> &FiniteCouple<R> {
        self.couple
    }

    pub fn family(&self) -> DeltaNormFamily<'_, R> {
        DeltaNormFamily::new(self.couple, self.indexing)
    }

    fn block_norms(&self, flat: &[R]) -> Result<Vec<R>> {
        let seq = VectorSequence::unflatten(self.window, self.couple.dim(), flat)?;
        let family = self.family();
        Ok(seq
            .indices()
            .map(|m| family.block_norm(m, seq.entry(m)))
            .collect())
    }

    /// Endpoint norm `k in {0, 1}` of a flattened sequence.
    pub fn endpoint_norm(&self, k: i32, flat: &[R]) -> Result<R> {
        let nu = self.block_norms(flat)?;
        let mut terms = Vec::with_capacity(nu.len());
        for (idx, m) in (-self.window..=self.window).enumerate() {
            terms.push(R::of((-(k * m) as f64).exp2()) * nu[idx]);
        }
        Ok(lq_norm(&terms, self.inner_q))
    }
}

impl<'a, R: Real> CoupleNorms<R> for SequenceCouple<'a, R> {
    fn dim(&self) -> usize {
        (2 * self.window + 1) as usize * self.couple.dim()
    }
    fn norm0(&self, x: &[R]) -> R {
        self.endpoint_norm(0, x).expect("shape checked by caller")
    }
    fn norm1(&self, x: &[R]) -> R {
        self.endpoint_norm(1, x).expect("shape checked by caller")
    }
    fn k_functional(&self, t: R, x: &[R], opts: &KOptions<R>) -> Result<R> {
        let nu = self.block_norms(x)?;
        self.scalar_couple.k(t, &nu, opts)
    }
}

/// Measured operator norms of the cutting operators between the two
/// `l^1`-type endpoint norms, in all four direction pairings. Exact on the
/// weighted block-`l^1` sums: the suprema are attained at one-hot sequences
/// and the block norms cancel in the ratios.
pub fn cutting_norm_bounds<R: Real>(
    couple: &FiniteCouple<R>,
    window: i32,
    n: i32,
) -> Result<CheckReport> {
    if n < 0 || window < 0 {
        return Err(Error::domain("indices must be nonnegative"));
    }
    let probe = {
        let mut v = vec![R::zero(); couple.dim()];
        v[0] = R::one();
        v
    };
    let family = DeltaNormFamily::new(couple, DeltaIndexing::AsPrinted);
    let rho0 = FunctionParameter::power(R::zero())?;
    let rho1 = FunctionParameter::power(R::one())?;
    let endpoint = |seq: &VectorSequence<R>, k: i32| -> Result<R> {
        let rho = if k == 0 { &rho0 } else { &rho1 };
        ell_rho_q_norm(seq, &family, rho, R::one())
    };
    // One-hot supremum of out-norm / in-norm over the blocks each part keeps.
    let ratio_sup = |keep: &dyn Fn(i32) -> bool, from_k: i32, to_k: i32| -> Result<f64> {
        let mut best = 0.0_f64;
        for m in -window..=window {
            if !keep(m) {
                continue;
            }
            let one = VectorSequence::one_hot(window, m, probe.clone())?;
            let num = endpoint(&one, to_k)?.lossy();
            let den = endpoint(&one, from_k)?.lossy();
            best = best.max(num / den);
        }
        Ok(best)
    };
    let keep_plus = |m: i32| m > n;
    let keep_minus = |m: i32| m < -n;
    let keep_mid = |m: i32| m.abs() <= n.min(window);

    let mut report = CheckReport::new("cutting");
    let plus_01 = ratio_sup(&keep_plus, 0, 1)?;
    let plus_10 = ratio_sup(&keep_plus, 1, 0)?;
    let minus_01 = ratio_sup(&keep_minus, 0, 1)?;
    let minus_10 = ratio_sup(&keep_minus, 1, 0)?;
    let mid_00 = ratio_sup(&keep_mid, 0, 0)?;
    let mid_11 = ratio_sup(&keep_mid, 1, 1)?;
    report.measure("plus_0to1", plus_01);
    report.measure("plus_1to0", plus_10);
    report.measure("minus_0to1", minus_01);
    report.measure("minus_1to0", minus_10);
    report.measure("middle_0to0", mid_00);
    report.measure("middle_1to1", mid_11);
    let bound = (-(n as f64)).exp2();
    report.constant("dyadic_bound", bound);
    // The decaying typings are plus: 0 -> 1 and minus: 1 -> 0; record which
    // direction actually decays rather than deciding the printed typing.
    if n < window {
        let expect = (-((n + 1) as f64)).exp2();
        report.require(plus_01 == expect, "plus 0->1 must equal 2^-(n+1) exactly");
        report.require(minus_10 == expect, "minus 1->0 must equal 2^-(n+1) exactly");
        report.require(plus_01 <= bound, "plus 0->1 exceeded 2^-n");
        report.require(minus_10 <= bound, "minus 1->0 exceeded 2^-n");
        report.flag(if plus_01 < plus_10 {
            "decaying direction: plus maps endpoint 0 into endpoint 1"
        } else {
            "decaying direction: plus maps endpoint 1 into endpoint 0"
        });
    } else {
        report.require(plus_01 == 0.0, "plus must vanish beyond the window");
        report.require(minus_10 == 0.0, "minus must vanish beyond the window");
    }
    report.require(mid_00 <= 1.0 && mid_11 <= 1.0, "middle part must be a contraction");
    Ok(report)
}

/// Configuration for the sequence-space interpolation checks.
#[derive(Clone, Debug)]
pub struct SequenceCheckConfig {
    pub seq_window: i32,
    pub interp_window: i32,
    pub samples: usize,
    pub seed: u64,
    pub bound: Option<f64>,
}

/// Compares the K-method interpolation norm of the couple
/// `(l_0^q(blocks), l_1^q(blocks))` against the direct `l_f^q` norm with
/// `f(t) = 1/rho(1/t)`; the ratio spread over random sequences must stay
/// under the frozen bound.
pub fn theorem21_check<R: Real>(
    couple: &FiniteCouple<R>,
    rho: &FunctionParameter<R>,
    q: R,
    cfg: &SequenceCheckConfig,
) -> Result<CheckReport> {
    let seq_couple = SequenceCouple::new(couple, cfg.seq_window, q, DeltaIndexing::AsPrinted)?;
    let spec = InterpolationSpec::new(rho, q, crate::interp::Method::K, cfg.interp_window)?;
    let f = rho.reciprocal_reflect()?;
    let tag = rng::fnv64(b"theorem21");
    let ratios: Result<Vec<f64>> = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(cfg.seed, &[tag, i]);
            let dim = couple.dim();
            let blocks = (2 * cfg.seq_window + 1) as usize;
            let flat = rng::sample_vector::<R>(&mut r, blocks * dim);
            let seq = VectorSequence::unflatten(cfg.seq_window, dim, &flat)?;
            let interp = k_method_norm(&seq_couple, &spec, &flat)?.value;
            let direct = ell_rho_q_norm(&seq, &seq_couple.family(), &f, q)?;
            Ok((interp / direct).lossy())
        })
        .collect();
    let ratios = ratios?;
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = ratios.iter().cloned().fold(0.0_f64, f64::max);
    let mut report = CheckReport::new("theorem21");
    report.measure("ratio_min", min);
    report.measure("ratio_max", max);
    report.measure("spread", max / min);
    report.require(
        ratios.iter().all(|r| r.is_finite() && *r > 0.0),
        "ratios must be finite and positive",
    );
    if let Some(b) = cfg.bound {
        report.constant("spread_bound", b);
        report.require(max / min <= b, "spread exceeded the frozen bound");
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
}

/// Hand-computable sides of the one-hot theorem-2.1 comparison; used by the
/// test suites.
pub fn theorem21_one_hot_sides<R: Real>(
    couple: &FiniteCouple<R>,
    rho: &FunctionParameter<R>,
    q: R,
    seq_window: i32,
    interp_window: i32,
    m0: i32,
    block: &[R],
) -> Result<(R, R)> {
    let seq_couple = SequenceCouple::new(couple, seq_window, q, DeltaIndexing::AsPrinted)?;
    let spec = InterpolationSpec::new(rho, q, crate::interp::Method::K, interp_window)?;
    let seq = VectorSequence::one_hot(seq_window, m0, block.to_vec())?;
    let flat = seq.flatten();
    let interp = k_method_norm(&seq_couple, &spec, &flat)?.value;
    let f = rho.reciprocal_reflect()?;
    let direct = ell_rho_q_norm(&seq, &seq_couple.family(), &f, q)?;
    Ok((interp, direct))
}

/// Fits the smallest `C` with the `(rho, q)` interpolation norm of the
/// `l^1`-endpoint sequence couple bounded by `C` times the direct `l_f^q`
/// norm over random sequences.
pub fn embedding_check<R: Real>(
    couple: &FiniteCouple<R>,
    rho: &FunctionParameter<R>,
    q: R,
    cfg: &SequenceCheckConfig,
) -> Result<CheckReport> {
    let seq_couple = SequenceCouple::new(couple, cfg.seq_window, R::one(), DeltaIndexing::AsPrinted)?;
    let spec = InterpolationSpec::new(rho, q, crate::interp::Method::K, cfg.interp_window)?;
    let f = rho.reciprocal_reflect()?;
    let tag = rng::fnv64(b"embedding");
    let ratios: Result<Vec<f64>> = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(cfg.seed, &[tag, i]);
            let dim = couple.dim();
            let blocks = (2 * cfg.seq_window + 1) as usize;
            let flat = rng::sample_vector::<R>(&mut r, blocks * dim);
            let seq = VectorSequence::unflatten(cfg.seq_window, dim, &flat)?;
            let rhs = k_method_norm(&seq_couple, &spec, &flat)?.value;
            let lhs = ell_rho_q_norm(&seq, &seq_couple.family(), &f, q)?;
            Ok((rhs / lhs).lossy())
        })
        .collect();
    let ratios = ratios?;
    let c = ratios.iter().cloned().fold(0.0_f64, f64::max);
    let mut report = CheckReport::new("embedding");
    report.measure("fitted_c", c);
    report.require(c.is_finite(), "fitted constant must be finite");
    if let Some(b) = cfg.bound {
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
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l1_linf(dim: usize) -> FiniteCouple<f64> {
        FiniteCouple::new(
            WeightedNorm::uniform(1.0, dim).unwrap(),
            WeightedNorm::uniform(f64::INFINITY, dim).unwrap(),
        )
        .unwrap()
    }

    fn random_seq(seed: u64, window: i32, dim: usize) -> VectorSequence<f64> {
        let mut r = rng::stream(seed, &[99]);
        let blocks = (2 * window + 1) as usize;
        let flat = rng::sample_vector::<f64>(&mut r, blocks * dim);
        VectorSequence::unflatten(window, dim, &flat).unwrap()
    }

    #[test]
    fn ell_norm_one_hot_and_zero() {
        let c = l1_linf(2);
        let family = DeltaNormFamily::new(&c, DeltaIndexing::AsPrinted);
        let rho = FunctionParameter::power(0.5).unwrap();
        let u = vec![1.0, -2.0];
        let seq = VectorSequence::one_hot(4, 0, u.clone()).unwrap();
        let got = ell_rho_q_norm(&seq, &family, &rho, 1.0).unwrap();
        // rho(1) = 1 and the block norm at m = 0 is J(1, u).
        let expect = c.j(1.0, &u).unwrap();
        assert_eq!(got, expect);
        let z = VectorSequence::zero(4, 2).unwrap();
        assert_eq!(ell_rho_q_norm(&z, &family, &rho, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn ell_norm_two_entry_hand_sum() {
        let c = l1_linf(2);
        let family = DeltaNormFamily::new(&c, DeltaIndexing::AsPrinted);
        let rho = FunctionParameter::power(0.5).unwrap();
        let mut seq = VectorSequence::zero(3, 2).unwrap();
        *seq.entry_mut(-1) = vec![1.0, 0.5];
        *seq.entry_mut(2) = vec![-0.25, 2.0];
        let got = ell_rho_q_norm(&seq, &family, &rho, 1.0).unwrap();
        // weights rho(2^{-m}): m=-1 -> sqrt(2); m=2 -> 1/2. Block norms are
        // J(2^{-m}, u) = max(l1, 2^{-m} linf).
        let j_m1 = (1.5_f64).max(2.0 * 1.0);
        let j_p2 = (2.25_f64).max(0.25 * 2.0);
        let expect = 2.0_f64.sqrt() * j_m1 + 0.5 * j_p2;
        assert!((got - expect).abs() < 1e-12);
    }

    #[test]
    fn sigma_linear_and_one_hot() {
        let seq = random_seq(1, 3, 2);
        let other = random_seq(2, 3, 2);
        let lin = sigma(&seq.scaled(2.0).add(&other.scaled(-3.0)).unwrap());
        let direct: Vec<f64> = sigma(&seq)
            .iter()
            .zip(sigma(&other))
            .map(|(&a, b)| 2.0 * a - 3.0 * b)
            .collect();
        for (x, y) in lin.iter().zip(&direct) {
            assert!((x - y).abs() < 1e-12);
        }
        let u = vec![0.7, -0.1];
        let one = VectorSequence::one_hot(3, -2, u.clone()).unwrap();
        assert_eq!(sigma(&one), u);
    }

    #[test]
    fn cutting_partition_identities() {
        let seq = random_seq(3, 4, 3);
        for n in [0, 2, 4, 7] {
            let (mid, plus, minus) = cutting(&seq, n).unwrap();
            // AP2: the parts sum to the identity, exactly.
            let back = mid.add(&plus).unwrap().add(&minus).unwrap();
            assert_eq!(back, seq);
            // Disjoint supports.
            for m in seq.indices() {
                let nz = |s: &VectorSequence<f64>| s.entry(m).iter().any(|&v| v != 0.0);
                let count = [nz(&mid), nz(&plus), nz(&minus)].iter().filter(|&&b| b).count();
                assert!(count <= 1);
            }
            // sigma additivity across the parts.
            let s: Vec<f64> = sigma(&mid)
                .iter()
                .zip(sigma(&plus))
                .zip(sigma(&minus))
                .map(|((&a, b), c)| a + b + c)
                .collect();
            for (x, y) in s.iter().zip(sigma(&seq)) {
                assert!((x - y).abs() < 1e-12);
            }
        }
        let (mid, plus, minus) = cutting(&seq, 9).unwrap();
        assert_eq!(mid, seq);
        assert_eq!(plus, VectorSequence::zero(4, 3).unwrap());
        assert_eq!(minus, VectorSequence::zero(4, 3).unwrap());
        let (mid0, _, _) = cutting(&seq, 0).unwrap();
        for m in seq.indices() {
            if m != 0 {
                assert!(mid0.entry(m).iter().all(|&v| v == 0.0));
            }
        }
    }

    #[test]
    fn cutting_norms_exact_dyadic() {
        let c = l1_linf(2);
        for n in 0..=10 {
            let report = cutting_norm_bounds(&c, 12, n).unwrap();
            assert!(report.pass, "n = {n}: {:?}", report.flags);
            let expect = (-(n as f64 + 1.0)).exp2();
            assert_eq!(report.get_measurement("plus_0to1").unwrap(), expect);
            assert_eq!(report.get_measurement("minus_1to0").unwrap(), expect);
            assert_eq!(report.get_measurement("middle_0to0").unwrap(), 1.0);
        }
        // Beyond the window the tails vanish.
        let report = cutting_norm_bounds(&c, 4, 6).unwrap();
        assert!(report.pass);
        assert_eq!(report.get_measurement("plus_0to1").unwrap(), 0.0);
    }

    #[test]
    fn sequence_couple_k_reduction_matches_direct_definition() {
        // With dim-1 blocks the block norm is max(1, 2^{-m}) |u|, a plain
        // weight, so the sequence couple equals an explicit weighted couple.
        let c = l1_linf(1);
        let sc = SequenceCouple::new(&c, 1, 1.0, DeltaIndexing::AsPrinted).unwrap();
        let seq = random_seq(7, 1, 1);
        let flat = seq.flatten();
        let opts = KOptions::default();
        for t in [0.3f64, 1.0, 2.5] {
            let got = sc.k_functional(t, &flat, &opts).unwrap();
            let w: Vec<f64> = (-1..=1)
                .map(|m| (1.0_f64).max((-m as f64).exp2()))
                .collect();
            let n0 = WeightedNorm::new(1.0, w.clone()).unwrap();
            let w1: Vec<f64> = (-1..=1)
                .zip(&w)
                .map(|(m, &wm)| (-m as f64).exp2() * wm)
                .collect();
            let n1 = WeightedNorm::new(1.0, w1).unwrap();
            let direct = FiniteCouple::new(n0, n1).unwrap();
            let expect = direct.k(t, &flat, &opts).unwrap();
            assert!(
                (got - expect).abs() < 1e-9 * expect.max(1e-9),
                "t={t}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn theorem21_one_hot_ratio_constant_for_powers() {
        let c = l1_linf(2);
        let rho = FunctionParameter::power(0.5).unwrap();
        let block = vec![1.0, -0.5];
        let mut ratios = Vec::new();
        for m0 in [-3, 0, 2] {
            let (interp, direct) =
                theorem21_one_hot_sides(&c, &rho, 1.0, 4, 40, m0, &block).unwrap();
            // Hand recomputation of both sides.
            let nu = c.j((-(m0 as f64)).exp2(), &block).unwrap();
            let mut hand = 0.0;
            for n in -40..=40 {
                let t = (n as f64).exp2();
                hand += (1.0_f64).min(t * (-(m0 as f64)).exp2()) / t.powf(0.5);
            }
            assert!((interp - nu * hand).abs() < 1e-9 * interp);
            let f_direct = nu * ((m0 as f64).exp2()).powf(0.5).recip();
            assert!((direct - f_direct).abs() < 1e-12 * direct.max(1e-12));
            ratios.push(interp / direct);
        }
        let spread = ratios.iter().cloned().fold(0.0_f64, f64::max)
            / ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(spread < 1.0 + 1e-6, "spread = {spread}");
    }

    #[test]
    fn theorem21_zero_sequence_both_sides_zero() {
        let c = l1_linf(2);
        let sc = SequenceCouple::new(&c, 3, 1.0, DeltaIndexing::AsPrinted).unwrap();
        let rho = FunctionParameter::power(0.5).unwrap();
        let spec = InterpolationSpec::new(&rho, 1.0, crate::interp::Method::K, 8).unwrap();
        let z = VectorSequence::zero(3, 2).unwrap();
        let flat = z.flatten();
        assert_eq!(k_method_norm(&sc, &spec, &flat).unwrap().value, 0.0);
        let f = rho.reciprocal_reflect().unwrap();
        assert_eq!(ell_rho_q_norm(&z, &sc.family(), &f, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn theorem21_random_spread_bounded() {
        let c = l1_linf(2);
        let rho = FunctionParameter::power(0.5).unwrap();
        let cfg = SequenceCheckConfig {
            seq_window: 3,
            interp_window: 16,
            samples: 12,
            seed: 17,
            bound: None,
        };
        let report = theorem21_check(&c, &rho, 1.0, &cfg).unwrap();
        assert!(report.pass);
        let spread = report.get_measurement("spread").unwrap();
        assert!(spread < 100.0, "spread = {spread}");
    }

    #[test]
    fn embedding_one_hot_hand_value() {
        let c = l1_linf(2);
        let rho = FunctionParameter::power(0.5).unwrap();
        let q = 2.0;
        let (w_seq, w_interp, m0) = (4, 40, 1);
        let sc = SequenceCouple::new(&c, w_seq, 1.0, DeltaIndexing::AsPrinted).unwrap();
        let spec = InterpolationSpec::new(&rho, q, crate::interp::Method::K, w_interp).unwrap();
        let block = vec![0.5, 1.0];
        let seq = VectorSequence::one_hot(w_seq, m0, block.clone()).unwrap();
        let flat = seq.flatten();
        let rhs = k_method_norm(&sc, &spec, &flat).unwrap().value;
        let nu = c.j((-(m0 as f64)).exp2(), &block).unwrap();
        let mut hand = 0.0;
        for n in -w_interp..=w_interp {
            let t = (n as f64).exp2();
            let term = (1.0_f64).min(t * (-(m0 as f64)).exp2()) / t.powf(0.5);
            hand += term * term;
        }
        let expect = nu * hand.sqrt();
        assert!((rhs - expect).abs() < 1e-9 * expect);
    }

    #[test]
    fn embedding_random_c_finite() {
        let c = l1_linf(2);
        let rho = FunctionParameter::power(0.5).unwrap();
        let cfg = SequenceCheckConfig {
            seq_window: 3,
            interp_window: 16,
            samples: 10,
            seed: 23,
            bound: None,
        };
        let report = embedding_check(&c, &rho, 2.0, &cfg).unwrap();
        assert!(report.pass);
    }
}
