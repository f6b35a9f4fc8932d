//! Interpolation norms for a function parameter: truncated dyadic K- and
//! J-method norms, the J/K equivalence check, class membership fits, and the
//! linear interpolation bound.
//!
//! K-method sums run over the dyadic window `|n| <= W` with a certified tail
//! bound derived from `K(t,x) <= min(|x|_0, t |x|_1)` and geometric decay of
//! the dilation weights. J-method values are upper bounds: the infimum over
//! windowed representations is approached from feasible candidates
//! (single-term, scalar-proportional, K-split differences) polished by
//! block-coordinate descent.

use rayon::prelude::*;

use crate::couples::{golden_min, CoupleNorms, FiniteCouple, KOptions, WeightedNorm};
use crate::error::{Error, Result};
use crate::params::{classify, ClassReport, DilationFunction, FunctionParameter};
use crate::report::{fmt_f64, CheckReport, Table};
use crate::rng;
use crate::scalar::{lq_norm, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    J,
    K,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailMode {
    Estimate,
    Ignore,
}

/// Everything a rho-method norm evaluation needs: the parameter, its
/// dilation, the exponent, the method, and the dyadic window.
#[derive(Clone, Debug)]
pub struct InterpolationSpec<R: Real> {
    rho: FunctionParameter<R>,
    dilation: DilationFunction<R>,
    class_report: ClassReport<R>,
    pub q: R,
    pub method: Method,
    pub window: i32,
    pub tail_mode: TailMode,
    pub k_opts: KOptions<R>,
    /// Block-coordinate-descent sweeps for the J-method representation.
    pub bcd_sweeps: usize,
}

impl<R: Real> InterpolationSpec<R> {
    pub fn new(rho: &FunctionParameter<R>, q: R, method: Method, window: i32) -> Result<Self> {
        if !((q.is_finite() && q >= R::one()) || q.is_infinite()) {
            return Err(Error::domain(format!("q must be in [1, inf], got {q}")));
        }
        if window < 1 {
            return Err(Error::domain("window must be at least 1"));
        }
        let dilation = DilationFunction::compute(rho)?;
        let class_report = classify(&dilation, R::of(1e-9));
        if !class_report.in_b {
            return Err(Error::precondition("rho must be of class B"));
        }
        if method == Method::J && !class_report.in_bpm {
            return Err(Error::precondition(
                "the J-method requires rho in the plus-minus class",
            ));
        }
        Ok(InterpolationSpec {
            rho: rho.clone(),
            dilation,
            class_report,
            q,
            method,
            window,
            tail_mode: TailMode::Estimate,
            k_opts: KOptions::default(),
            bcd_sweeps: 3,
        })
    }

    pub fn rho(&self) -> &FunctionParameter<R> {
        &self.rho
    }

    pub fn dilation(&self) -> &DilationFunction<R> {
        &self.dilation
    }

    pub fn class_report(&self) -> &ClassReport<R> {
        &self.class_report
    }

    /// `rho(2^n)`.
    pub fn rho_dyadic(&self, n: i32) -> R {
        self.rho.eval(R::of((n as f64).exp2())).expect("dyadic points are positive")
    }

    pub fn with_window(mut self, window: i32) -> Self {
        self.window = window;
        self
    }

    pub fn with_tail_mode(mut self, mode: TailMode) -> Self {
        self.tail_mode = mode;
        self
    }
}

/// Value of a truncated interpolation norm with its certified tail bound.
#[derive(Clone, Copy, Debug)]
pub struct NormResult<R> {
    pub value: R,
    pub tail_bound: R,
    pub converged: bool,
}

fn geometric_lq<R: Real>(r: R, q: R) -> R {
    if !(r < R::one()) {
        return R::infinity();
    }
    if q.is_infinite() {
        r
    } else {
        r * (R::one() - r.powf(q)).powf(-q.recip())
    }
}

/// K-method norm: the `l^q` norm of `rho(2^n)^{-1} K(2^n, x)` over the
/// window, plus the tail bound for `|n| > W`.
pub fn k_method_norm<R: Real, C: CoupleNorms<R> + ?Sized>(
    couple: &C,
    spec: &InterpolationSpec<R>,
    x: &[R],
) -> Result<NormResult<R>> {
    if x.iter().all(|&v| v == R::zero()) {
        return Ok(NormResult {
            value: R::zero(),
            tail_bound: R::zero(),
            converged: true,
        });
    }
    let w = spec.window;
    let mut terms = Vec::with_capacity((2 * w + 1) as usize);
    for n in -w..=w {
        let t = R::of((n as f64).exp2());
        let k = couple.k_functional(t, x, &spec.k_opts)?;
        terms.push(k / spec.rho_dyadic(n));
    }
    let value = lq_norm(&terms, spec.q);
    let (tail, converged) = match spec.tail_mode {
        TailMode::Ignore => (R::zero(), true),
        TailMode::Estimate => {
            let d = spec.dilation.eval(R::of(0.5))?;
            let e = spec.dilation.eval(R::of(2.0))? / R::of(2.0);
            let up = couple.norm0(x) / spec.rho_dyadic(w) * geometric_lq(d, spec.q);
            let low = R::of((-w as f64).exp2()) * couple.norm1(x) / spec.rho_dyadic(-w)
                * geometric_lq(e, spec.q);
            let tail = up + low;
            (tail, tail.is_finite())
        }
    };
    Ok(NormResult {
        value,
        tail_bound: if converged { tail } else { R::infinity() },
        converged,
    })
}

/// J-method outcome: the upper bound, which candidate route was best, and the
/// K-norm of the same vector for equivalence bookkeeping.
#[derive(Clone, Debug)]
pub struct JNormDetail<R> {
    pub upper: R,
    pub single_term: R,
    pub k_norm: R,
    /// Lower bound `k_norm / c` when an equivalence constant is supplied.
    pub lower: Option<R>,
    /// Set when no candidate improved on the single-term representation.
    pub stalled: bool,
}

/// J-method norm of `x`: an upper bound on the infimum over windowed
/// representations `x = sum_{|n|<=W} u_n` of the weighted `l^q` norm of
/// `rho(2^n)^{-1} J(2^n, u_n)`.
pub fn j_method_norm<R: Real>(
    couple: &FiniteCouple<R>,
    spec: &InterpolationSpec<R>,
    x: &[R],
) -> Result<NormResult<R>> {
    let d = j_method_norm_detailed(couple, spec, x, None)?;
    Ok(NormResult {
        value: d.upper,
        tail_bound: R::zero(),
        converged: !d.stalled,
    })
}

pub fn j_method_norm_detailed<R: Real>(
    couple: &FiniteCouple<R>,
    spec: &InterpolationSpec<R>,
    x: &[R],
    equivalence_constant: Option<R>,
) -> Result<JNormDetail<R>> {
    if spec.method != Method::J {
        return Err(Error::precondition("spec method must be J"));
    }
    if x.iter().all(|&v| v == R::zero()) {
        return Ok(JNormDetail {
            upper: R::zero(),
            single_term: R::zero(),
            k_norm: R::zero(),
            lower: Some(R::zero()),
            stalled: false,
        });
    }
    let w = spec.window;
    let ns: Vec<i32> = (-w..=w).collect();
    let weights: Vec<R> = ns.iter().map(|&n| spec.rho_dyadic(n).recip()).collect();
    let j_of = |n_idx: usize, u: &[R]| -> R {
        let t = R::of((ns[n_idx] as f64).exp2());
        weights[n_idx] * couple.norm0().eval(u).max(t * couple.norm1().eval(u))
    };

    // Candidate 1: one-term representation at the minimizing n.
    let mut single = R::infinity();
    for (i, &n) in ns.iter().enumerate() {
        let t = R::of((n as f64).exp2());
        let v = weights[i] * (couple.norm0().eval(x).max(t * couple.norm1().eval(x)));
        if v < single {
            single = v;
        }
    }

    // Candidate 2: proportional representation u_n = c_n x with the exact
    // scalar optimum for the given q.
    let wn: Vec<R> = ns
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let t = R::of((n as f64).exp2());
            weights[i] * couple.norm0().eval(x).max(t * couple.norm1().eval(x)) * R::one()
        })
        .collect();
    let proportional = if spec.q == R::one() {
        single
    } else if spec.q.is_infinite() {
        wn.iter().map(|&v| v.recip()).sum::<R>().recip()
    } else {
        let qp = spec.q / (spec.q - R::one());
        wn.iter()
            .map(|&v| v.powf(-qp))
            .sum::<R>()
            .powf(-qp.recip())
    };

    // Candidate 3: differences of near-optimal K-splits across the window.
    let mut reps: Vec<Vec<R>> = Vec::with_capacity(ns.len());
    {
        let mut prev: Vec<R> = vec![R::zero(); x.len()];
        for &n in &ns {
            let t = R::of((n as f64).exp2());
            let (_, s) = couple.k_with_split(t, x, &spec.k_opts)?;
            let x0: Vec<R> = x
                .iter()
                .zip(&s)
                .map(|(&xi, &si)| xi.signum() * si)
                .collect();
            let diff: Vec<R> = x0.iter().zip(&prev).map(|(&a, &b)| a - b).collect();
            reps.push(diff);
            prev = x0;
        }
        // Remainder goes to the top block.
        let last = reps.len() - 1;
        for i in 0..x.len() {
            let covered: R = reps.iter().map(|u| u[i]).sum();
            reps[last][i] += x[i] - covered;
        }
    }
    let eval_rep = |rep: &[Vec<R>]| -> R {
        let terms: Vec<R> = rep.iter().enumerate().map(|(i, u)| j_of(i, u)).collect();
        lq_norm(&terms, spec.q)
    };
    let ksplit_val = eval_rep(&reps);

    // Polish the best explicit representation by pairwise block-coordinate
    // transfers.
    let mut best_rep: Vec<Vec<R>> = if ksplit_val <= single {
        reps
    } else {
        let mut r = vec![vec![R::zero(); x.len()]; ns.len()];
        let argmin = ns
            .iter()
            .enumerate()
            .map(|(i, &n)| {
                let t = R::of((n as f64).exp2());
                weights[i] * couple.norm0().eval(x).max(t * couple.norm1().eval(x))
            })
            .enumerate()
            .fold((0usize, R::infinity()), |acc, (i, v)| {
                if v < acc.1 {
                    (i, v)
                } else {
                    acc
                }
            })
            .0;
        r[argmin] = x.to_vec();
        r
    };
    let mut best_val = eval_rep(&best_rep).min(single);
    let span = x.iter().fold(R::zero(), |m, &v| m.max(v.abs()));
    for _ in 0..spec.bcd_sweeps {
        let before = eval_rep(&best_rep);
        for pair in 0..ns.len() - 1 {
            for coord in 0..x.len() {
                let (lo_block, hi_block) = (pair, pair + 1);
                let bracket =
                    best_rep[lo_block][coord].abs() + best_rep[hi_block][coord].abs() + span;
                if bracket == R::zero() {
                    continue;
                }
                let base_lo = best_rep[lo_block].clone();
                let base_hi = best_rep[hi_block].clone();
                let others_q: R = if spec.q.is_infinite() {
                    best_rep
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != lo_block && *i != hi_block)
                        .map(|(i, u)| j_of(i, u))
                        .fold(R::zero(), |m, v| m.max(v))
                } else {
                    R::zero()
                };
                let phi = |delta: R| {
                    let mut ulo = base_lo.clone();
                    let mut uhi = base_hi.clone();
                    ulo[coord] -= delta;
                    uhi[coord] += delta;
                    let a = j_of(lo_block, &ulo);
                    let b = j_of(hi_block, &uhi);
                    if spec.q.is_infinite() {
                        others_q.max(a).max(b)
                    } else if spec.q == R::one() {
                        a + b
                    } else {
                        a.powf(spec.q) + b.powf(spec.q)
                    }
                };
                let delta = golden_min(phi, -bracket, bracket, 48);
                best_rep[lo_block][coord] -= delta;
                best_rep[hi_block][coord] += delta;
            }
        }
        let after = eval_rep(&best_rep);
        if before - after <= spec.k_opts.tol * after.max(R::of(1e-300)) {
            break;
        }
    }
    best_val = best_val.min(eval_rep(&best_rep)).min(proportional);

    let k_res = k_method_norm(couple, spec, x)?;
    let stalled = !(best_val < single) && spec.q != R::one();
    Ok(JNormDetail {
        upper: best_val,
        single_term: single,
        k_norm: k_res.value,
        lower: equivalence_constant.map(|c| k_res.value / c),
        stalled,
    })
}

/// Configuration for the equivalence-theorem check.
#[derive(Clone, Debug)]
pub struct EquivalenceConfig {
    pub samples: usize,
    pub seed: u64,
    /// Frozen spread bound; `None` records the spread without asserting.
    pub spread_bound: Option<f64>,
}

/// Ratio statistics of J-norm over K-norm across sampled vectors; pass iff
/// every ratio is finite and positive and the spread stays under the frozen
/// bound.
pub fn equivalence_check<R: Real>(
    couple_for: impl Fn(u64) -> Result<FiniteCouple<R>> + Sync,
    spec: &InterpolationSpec<R>,
    cfg: &EquivalenceConfig,
) -> Result<CheckReport> {
    let tag = rng::fnv64(b"equivalence");
    let ratios: Result<Vec<f64>> = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|i| {
            let couple = couple_for(i)?;
            let mut r = rng::stream(cfg.seed, &[tag, i]);
            let x = rng::sample_vector::<R>(&mut r, couple.dim());
            let detail = j_method_norm_detailed(&couple, spec, &x, None)?;
            if detail.k_norm <= R::zero() {
                return Err(Error::domain("sampled vector has zero K-norm"));
            }
            Ok((detail.upper / detail.k_norm).lossy())
        })
        .collect();
    let ratios = ratios?;
    let mut report = CheckReport::new("equivalence");
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = ratios.iter().cloned().fold(0.0_f64, f64::max);
    let spread = max / min;
    report.measure("ratio_min", min);
    report.measure("ratio_max", max);
    report.measure("spread", spread);
    report.require(
        ratios.iter().all(|r| r.is_finite() && *r > 0.0),
        "all ratios must be finite and positive",
    );
    if let Some(bound) = cfg.spread_bound {
        report.constant("spread_bound", bound);
        report.require(spread <= bound, "spread exceeded the frozen bound");
    }
    let rows: Vec<Vec<String>> = ratios
        .iter()
        .enumerate()
        .map(|(i, r)| vec![i.to_string(), fmt_f64(*r)])
        .collect();
    report.table(Table {
        name: "ratios".into(),
        columns: vec!["sample".into(), "ratio".into()],
        rows,
    });
    Ok(report)
}

/// Fits the smallest `C` with `norm_e(x) <= C |x|_0 dil(|x|_1/|x|_0)` over
/// sampled nonzero vectors; the class-J membership inequality.
pub fn class_j_fit<R: Real>(
    norm_e: impl Fn(&[R]) -> Result<R> + Sync,
    couple: &FiniteCouple<R>,
    dil: &DilationFunction<R>,
    samples: usize,
    seed: u64,
) -> Result<(f64, Vec<f64>)> {
    let tag = rng::fnv64(b"class_j");
    let ratios: Result<Vec<f64>> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, &[tag, i]);
            let x = rng::sample_vector::<R>(&mut r, couple.dim());
            let n0 = couple.norm0().eval(&x);
            let n1 = couple.norm1().eval(&x);
            let e = norm_e(&x)?;
            if n0 <= R::zero() {
                return if e > R::zero() {
                    Err(Error::precondition(
                        "norm_e does not vanish where the zero-endpoint norm does",
                    ))
                } else {
                    Ok(0.0)
                };
            }
            let denom = n0 * dil.eval(n1 / n0)?;
            Ok((e / denom).lossy())
        })
        .collect();
    let ratios = ratios?;
    let c = ratios.iter().cloned().fold(0.0_f64, f64::max);
    Ok((c, ratios))
}

/// Class-J membership check for a weighted norm.
pub fn class_j_check<R: Real>(
    e_norm: &WeightedNorm<R>,
    couple: &FiniteCouple<R>,
    rho: &FunctionParameter<R>,
    samples: usize,
    seed: u64,
    bound: Option<f64>,
) -> Result<CheckReport> {
    if e_norm.dim() != couple.dim() {
        return Err(Error::DimMismatch {
            expected: couple.dim(),
            got: e_norm.dim(),
        });
    }
    let dil = DilationFunction::compute(rho)?;
    let (c, ratios) = class_j_fit(|x| Ok(e_norm.eval(x)), couple, &dil, samples, seed)?;
    let mut report = CheckReport::new("class_j");
    report.measure("fitted_c", c);
    report.require(c.is_finite(), "fitted constant must be finite");
    if let Some(b) = bound {
        report.constant("bound", b);
        report.require(c <= b, "fitted constant exceeded the frozen bound");
    }
    report.table(ratio_table(&ratios));
    Ok(report)
}

/// Fits the smallest `C` with `k_method_norm(x) <= C norm_e(x)`; the class-K
/// membership inequality (the K-norm defaults to `q = inf` per the class
/// definition, but the caller picks the spec).
pub fn class_k_check<R: Real>(
    e_norm: &WeightedNorm<R>,
    couple: &FiniteCouple<R>,
    spec: &InterpolationSpec<R>,
    samples: usize,
    seed: u64,
    bound: Option<f64>,
) -> Result<CheckReport> {
    if e_norm.dim() != couple.dim() {
        return Err(Error::DimMismatch {
            expected: couple.dim(),
            got: e_norm.dim(),
        });
    }
    let tag = rng::fnv64(b"class_k");
    let ratios: Result<Vec<f64>> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, &[tag, i]);
            let x = rng::sample_vector::<R>(&mut r, couple.dim());
            let e = e_norm.eval(&x);
            if e <= R::zero() {
                return Err(Error::precondition("norm_e vanished on a nonzero sample"));
            }
            let k = k_method_norm(couple, spec, &x)?;
            Ok((k.value / e).lossy())
        })
        .collect();
    let ratios = ratios?;
    let c = ratios.iter().cloned().fold(0.0_f64, f64::max);
    let mut report = CheckReport::new("class_k");
    report.measure("fitted_c", c);
    report.require(c.is_finite(), "fitted constant must be finite");
    if let Some(b) = bound {
        report.constant("bound", b);
        report.require(c <= b, "fitted constant exceeded the frozen bound");
    }
    report.table(ratio_table(&ratios));
    Ok(report)
}

fn ratio_table(ratios: &[f64]) -> Table {
    Table {
        name: "ratios".into(),
        columns: vec!["sample".into(), "ratio".into()],
        rows: ratios
            .iter()
            .enumerate()
            .map(|(i, r)| vec![i.to_string(), fmt_f64(*r)])
            .collect(),
    }
}

/// Dense row-major matrix.
#[derive(Clone, Debug)]
pub struct DenseMatrix<R> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<R>,
}

impl<R: Real> DenseMatrix<R> {
    pub fn new(rows: usize, cols: usize, data: Vec<R>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::domain("matrix data length mismatch"));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![R::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = R::one();
        }
        DenseMatrix {
            rows: n,
            cols: n,
            data,
        }
    }

    pub fn apply(&self, x: &[R]) -> Vec<R> {
        debug_assert_eq!(x.len(), self.cols);
        let mut y = vec![R::zero(); self.rows];
        for (i, yi) in y.iter_mut().enumerate() {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            *yi = row.iter().zip(x).map(|(&a, &b)| a * b).sum();
        }
        y
    }

    pub fn apply_transpose(&self, y: &[R]) -> Vec<R> {
        debug_assert_eq!(y.len(), self.rows);
        let mut x = vec![R::zero(); self.cols];
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            for (j, &a) in row.iter().enumerate() {
                x[j] += a * y[i];
            }
        }
        x
    }

    pub fn column(&self, j: usize) -> Vec<R> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    pub fn scaled(&self, c: R) -> Self {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v * c).collect(),
        }
    }
}

impl<R: Real> WeightedNorm<R> {
    /// A subgradient of the norm at `y` (ties toward the lowest index).
    pub fn subgradient(&self, y: &[R]) -> Vec<R> {
        let n = self.dim();
        let sgn = |v: R| if v < R::zero() { -R::one() } else { R::one() };
        if self.p().is_infinite() {
            let mut best = 0usize;
            let mut val = R::neg_infinity();
            for i in 0..n {
                let v = self.weights()[i] * y[i].abs();
                if v > val {
                    val = v;
                    best = i;
                }
            }
            let mut g = vec![R::zero(); n];
            g[best] = self.weights()[best] * sgn(y[best]);
            return g;
        }
        if self.p() == R::one() {
            return (0..n).map(|i| self.weights()[i] * sgn(y[i])).collect();
        }
        let norm = self.eval(y);
        if norm == R::zero() {
            return vec![R::zero(); n];
        }
        let p = self.p();
        (0..n)
            .map(|i| {
                self.weights()[i] * y[i].abs().powf(p - R::one()) * sgn(y[i])
                    * norm.powf(R::one() - p)
            })
            .collect()
    }
}

/// Estimated operator norm: a lower bound (exact when the source exponent
/// admits extreme-point enumeration).
#[derive(Clone, Copy, Debug)]
pub struct OpNormEstimate<R> {
    pub lower: R,
    pub exact: bool,
}

/// Lower-bounds `|T|_{from -> to}` for weighted norms. Exact by column
/// enumeration when `p_from = 1` and by sign-vertex enumeration when
/// `p_from = inf` with few columns; dual-scaled power ascent otherwise.
pub fn op_norm_lower<R: Real>(
    t: &DenseMatrix<R>,
    from: &WeightedNorm<R>,
    to: &WeightedNorm<R>,
    restarts: usize,
    iters: usize,
    seed: u64,
) -> OpNormEstimate<R> {
    debug_assert_eq!(from.dim(), t.cols);
    debug_assert_eq!(to.dim(), t.rows);
    if from.p() == R::one() {
        let mut best = R::zero();
        for j in 0..t.cols {
            let v = to.eval(&t.column(j)) / from.weights()[j];
            best = best.max(v);
        }
        return OpNormEstimate {
            lower: best,
            exact: true,
        };
    }
    if from.p().is_infinite() && t.cols <= 20 {
        // Gray-code walk over sign vertices; the first coordinate is pinned
        // positive by symmetry.
        let n = t.cols;
        let mut x: Vec<R> = (0..n).map(|j| from.weights()[j].recip()).collect();
        let mut y = t.apply(&x);
        let mut best = to.eval(&y);
        let steps = 1u64 << (n - 1);
        let mut gray = 0u64;
        for k in 1..steps {
            let g = k ^ (k >> 1);
            let flip = (g ^ gray).trailing_zeros() as usize + 1;
            gray = g;
            let old = x[flip];
            x[flip] = -old;
            let col = t.column(flip);
            for (yi, ci) in y.iter_mut().zip(&col) {
                *yi += (x[flip] - old) * *ci;
            }
            best = best.max(to.eval(&y));
        }
        return OpNormEstimate {
            lower: best,
            exact: true,
        };
    }
    let tag = rng::fnv64(b"op_norm");
    let best = (0..restarts as u64)
        .into_par_iter()
        .map(|ridx| {
            let mut r = rng::stream(seed, &[tag, ridx]);
            let mut x = rng::sample_vector::<R>(&mut r, t.cols);
            let nx = from.eval(&x);
            x.iter_mut().for_each(|v| *v /= nx);
            let mut best = to.eval(&t.apply(&x));
            for _ in 0..iters {
                let y = t.apply(&x);
                let g = t.apply_transpose(&to.subgradient(&y));
                let cand = from.dual_attainer(&g);
                let val = to.eval(&t.apply(&cand));
                if val <= best * (R::one() + R::of(1e-12)) {
                    break;
                }
                best = val;
                x = cand;
            }
            best
        })
        .collect::<Vec<R>>()
        .into_iter()
        .fold(R::zero(), |m, v| m.max(v));
    OpNormEstimate {
        lower: best,
        exact: false,
    }
}

/// Configuration for the linear interpolation bound check.
#[derive(Clone, Debug)]
pub struct LinearBoundConfig {
    pub samples: usize,
    pub restarts: usize,
    pub iters: usize,
    pub seed: u64,
    pub bound: Option<f64>,
}

/// Verifies `|T|_{interp} <= C |T|_0 dil(|T|_1/|T|_0)` with a sampled lower
/// bound on the left and endpoint estimates on the right.
pub fn linear_bound_check<R: Real>(
    t: &DenseMatrix<R>,
    couple_e: &FiniteCouple<R>,
    couple_f: &FiniteCouple<R>,
    spec: &InterpolationSpec<R>,
    cfg: &LinearBoundConfig,
) -> Result<CheckReport> {
    if t.cols != couple_e.dim() || t.rows != couple_f.dim() {
        return Err(Error::DimMismatch {
            expected: couple_e.dim(),
            got: t.cols,
        });
    }
    let mut report = CheckReport::new("linear_bound");
    let zero = t.data.iter().all(|&v| v == R::zero());
    if zero {
        report.measure("ratio", 0.0);
        report.flag("zero operator: trivial pass");
        return Ok(report);
    }
    let m0 = op_norm_lower(t, couple_e.norm0(), couple_f.norm0(), cfg.restarts, cfg.iters, cfg.seed);
    let m1 = op_norm_lower(t, couple_e.norm1(), couple_f.norm1(), cfg.restarts, cfg.iters, cfg.seed);
    let tag = rng::fnv64(b"linear_bound");
    let interp_lb = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(cfg.seed, &[tag, i]);
            let x = rng::sample_vector::<R>(&mut r, couple_e.dim());
            let nx = k_method_norm(couple_e, spec, &x)?.value;
            let y = t.apply(&x);
            let ny = k_method_norm(couple_f, spec, &y)?.value;
            Ok(ny / nx)
        })
        .collect::<Result<Vec<R>>>()?
        .into_iter()
        .fold(R::zero(), |m, v| m.max(v));
    let denom = m0.lower * spec.dilation().eval(m1.lower / m0.lower)?;
    let ratio = (interp_lb / denom).lossy();
    report.measure("m0", m0.lower.lossy());
    report.measure("m1", m1.lower.lossy());
    report.measure("interp_lower_bound", interp_lb.lossy());
    report.measure("ratio", ratio);
    if m0.exact && m1.exact {
        report.flag("endpoint norms exact");
    }
    if let Some(b) = cfg.bound {
        report.constant("bound", b);
        report.require(ratio <= b, "ratio exceeded the frozen bound");
    }
    Ok(report)
}
