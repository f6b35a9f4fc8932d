//! Covering and entropy machinery on sampled image clouds, plus the
//! compactness-theorem harnesses.
//!
//! Finite dimension makes literal compactness vacuous, so the harnesses
//! measure its quantitative content instead: greedy covering profiles,
//! entropy numbers, Cauchy-transfer moduli, residual trajectories of cutting
//! decompositions, and smoothing residuals. Every inequality is checked with
//! a sampled lower bound on the left and an exactly computed (or frozen,
//! calibrated) quantity on the right.

use rayon::prelude::*;

use crate::bilinear::{bil_norm, AscentBudget, BilNormEstimate, BilinearMap};
use crate::couples::{FiniteCouple, WeightedNorm};
use crate::error::{Error, Result};
use crate::interp::{k_method_norm, InterpolationSpec, Method};
use crate::params::{gamma_from_rho, DilationFunction, FunctionParameter};
use crate::report::{fmt_f64, CheckReport, Table};
use crate::rng;
use crate::scalar::Real;
use crate::seqspaces::{cutting, sigma, DeltaIndexing, SequenceCouple, VectorSequence};

/// A finite set of points with the sampling spec that produced it.
#[derive(Clone, Debug)]
pub struct PointCloud<R> {
    pub points: Vec<Vec<R>>,
    pub provenance: String,
}

/// Farthest-point traversal: center order and the covering radius after each
/// center. The order is independent of any epsilon, so one traversal serves
/// every scale; ties break toward the lowest index.
pub fn farthest_point_radii<R: Real>(
    points: &[Vec<R>],
    dist: impl Fn(&[R], &[R]) -> R + Sync,
    max_centers: usize,
) -> (Vec<usize>, Vec<R>) {
    if points.is_empty() {
        return (Vec::new(), Vec::new());
    }
    let n = points.len();
    let mut centers = Vec::with_capacity(max_centers.min(n));
    let mut radii = Vec::with_capacity(max_centers.min(n));
    let mut min_dist: Vec<R> = (0..n)
        .into_par_iter()
        .map(|i| dist(&points[i], &points[0]))
        .collect();
    centers.push(0usize);
    loop {
        let mut far = 0usize;
        let mut far_d = R::neg_infinity();
        for (i, &d) in min_dist.iter().enumerate() {
            if d > far_d {
                far_d = d;
                far = i;
            }
        }
        radii.push(far_d.max(R::zero()));
        if centers.len() >= max_centers.min(n) || far_d <= R::zero() {
            break;
        }
        centers.push(far);
        let new_d: Vec<R> = (0..n)
            .into_par_iter()
            .map(|i| dist(&points[i], &points[far]))
            .collect();
        for (d, nd) in min_dist.iter_mut().zip(new_d) {
            if nd < *d {
                *d = nd;
            }
        }
    }
    (centers, radii)
}

/// Greedy covering count at radius `eps`: the number of farthest-point
/// centers needed before the covering radius drops to `eps`. An upper bound
/// on the true covering number; the greedy centers also form a packing, so
/// the count at `2 eps` lower-bounds it.
pub fn covering_number<R: Real>(
    cloud: &PointCloud<R>,
    norm: impl Fn(&[R]) -> R + Sync,
    eps: R,
) -> usize {
    if cloud.points.is_empty() {
        return 0;
    }
    let dist = |a: &[R], b: &[R]| {
        let diff: Vec<R> = a.iter().zip(b).map(|(&x, &y)| x - y).collect();
        norm(&diff)
    };
    let (_, radii) = farthest_point_radii(&cloud.points, dist, cloud.points.len());
    count_from_radii(&radii, eps).unwrap_or(cloud.points.len())
}

/// First center count whose covering radius is at most `eps`; `None` when the
/// recorded traversal never got that fine.
pub fn count_from_radii<R: Real>(radii: &[R], eps: R) -> Option<usize> {
    radii.iter().position(|&r| r <= eps).map(|k| k + 1)
}

/// Covering profile on a geometric epsilon grid, with entropy numbers read
/// off the traversal radii.
#[derive(Clone, Debug)]
pub struct CoveringProfile {
    pub epsilons: Vec<f64>,
    /// Greedy counts; `None` when the traversal depth did not reach the
    /// scale.
    pub counts: Vec<Option<usize>>,
    /// Size of the greedy packing with separation > 2 eps: a lower bound for
    /// the covering number at eps.
    pub packing_lb: Vec<usize>,
    /// `e_m = r_{2^{m-1}}`, m = 1..; nonincreasing by construction.
    pub entropy: Vec<f64>,
    pub radii: Vec<f64>,
}

impl CoveringProfile {
    /// Builds the profile from traversal radii: the grid runs from the cloud
    /// radius down `octaves` halvings.
    pub fn from_radii<R: Real>(radii: &[R], octaves: usize, m_max: usize) -> CoveringProfile {
        let radii64: Vec<f64> = radii.iter().map(|r| r.lossy()).collect();
        let top = radii64.first().copied().unwrap_or(0.0);
        let epsilons: Vec<f64> = (0..=octaves).map(|j| top / (j as f64).exp2()).collect();
        let counts: Vec<Option<usize>> = epsilons
            .iter()
            .map(|&e| radii64.iter().position(|&r| r <= e).map(|k| k + 1))
            .collect();
        let packing_lb: Vec<usize> = epsilons
            .iter()
            .map(|&e| {
                // centers 1..k are pairwise farther than radii[k-2]
                let mut k = 1usize;
                while k < radii64.len() + 1 {
                    if k >= 2 && !(radii64[k - 2] > 2.0 * e) {
                        break;
                    }
                    k += 1;
                }
                k.saturating_sub(1).max(1)
            })
            .collect();
        let mut entropy = Vec::new();
        let mut m = 1usize;
        loop {
            let k = 1usize << (m - 1);
            if k > radii64.len() || m > m_max {
                break;
            }
            entropy.push(radii64[k - 1]);
            m += 1;
        }
        CoveringProfile {
            epsilons,
            counts,
            packing_lb,
            entropy,
            radii: radii64,
        }
    }

    pub fn table(&self, name: &str) -> Table {
        let rows = self
            .epsilons
            .iter()
            .zip(&self.counts)
            .zip(&self.packing_lb)
            .map(|((&e, c), &p)| {
                vec![
                    fmt_f64(e),
                    c.map(|v| v.to_string()).unwrap_or_else(|| "unreached".into()),
                    p.to_string(),
                ]
            })
            .collect();
        Table {
            name: name.into(),
            columns: vec!["epsilon".into(), "count".into(), "packing_lb".into()],
            rows,
        }
    }
}

/// Witnesses realizing the norm estimates of a sequence of bilinear maps
/// within the given slacks.
pub struct Lemma42Witness<R> {
    pub estimate: R,
    pub value_at_witness: R,
    pub witness_x: Vec<R>,
    pub witness_y: Vec<R>,
}

/// For each map, a unit-ball pair whose image norm reaches the map's norm
/// estimate up to `eps_seq[i]`; constructive counterpart of picking
/// near-supremum arguments.
pub fn lemma42_witness<R: Real>(
    tensors: &[BilinearMap<R>],
    nx: &WeightedNorm<R>,
    ny: &WeightedNorm<R>,
    nz: &WeightedNorm<R>,
    eps_seq: &[R],
    budget: &AscentBudget,
    seed: u64,
) -> Result<Vec<Lemma42Witness<R>>> {
    if eps_seq.len() != tensors.len() {
        return Err(Error::domain("eps sequence length must match tensors"));
    }
    let mut out = Vec::with_capacity(tensors.len());
    for (i, t) in tensors.iter().enumerate() {
        let est: BilNormEstimate<R> = bil_norm(t, nx, ny, nz, budget, rng::child_seed(seed, &[i as u64]))?;
        let value = nz.eval(&t.apply(&est.witness_x, &est.witness_y)?);
        if est.lower - value > eps_seq[i] {
            return Err(Error::domain(format!(
                "witness {i} missed its estimate by more than eps"
            )));
        }
        out.push(Lemma42Witness {
            estimate: est.lower,
            value_at_witness: value,
            witness_x: est.witness_x,
            witness_y: est.witness_y,
        });
    }
    Ok(out)
}

/// Configuration for the one-sided compactness transfer check.
#[derive(Clone, Debug)]
pub struct Theorem41Config {
    pub q: f64,
    pub window: i32,
    pub cloud: usize,
    pub pairs: usize,
    pub octaves: usize,
    pub seed: u64,
    /// Frozen transfer constant; `None` records the fitted value only.
    pub bound: Option<f64>,
}

/// Quantitative Cauchy-transfer test: differences of image points satisfy
/// the class-J inequality with modulus `w(d) = C d dil(2 M1 / d)`, and a
/// greedy cover in the zero-endpoint norm is a `w(eps)`-cover in the
/// interpolated norm.
pub fn theorem41_check<R: Real>(
    t: &BilinearMap<R>,
    e_norm: &WeightedNorm<R>,
    f_norm: &WeightedNorm<R>,
    couple_g: &FiniteCouple<R>,
    rho: &FunctionParameter<R>,
    cfg: &Theorem41Config,
) -> Result<CheckReport> {
    let (l, n, m) = t.dims();
    if e_norm.dim() != n || f_norm.dim() != m || couple_g.dim() != l {
        return Err(Error::DimMismatch {
            expected: l,
            got: couple_g.dim(),
        });
    }
    let spec_g = InterpolationSpec::new(rho, R::of(cfg.q), Method::K, cfg.window)?;
    let dil = spec_g.dilation().clone();
    let g_interp = |v: &[R]| -> Result<R> { Ok(k_method_norm(couple_g, &spec_g, v)?.value) };

    let mut report = CheckReport::new("theorem41");

    // Precondition: the interpolated norm is of class J for the target
    // couple (fitted constant must exist).
    let (c_class, _) = crate::interp::class_j_fit(
        |x| g_interp(x),
        couple_g,
        &dil,
        64,
        rng::child_seed(cfg.seed, &[1]),
    )?;
    if !c_class.is_finite() {
        return Err(Error::precondition(
            "interpolated norm failed the class-J fit on the target couple",
        ));
    }
    report.measure("class_j_constant", c_class);

    // Image cloud of the product unit ball.
    let tag = rng::fnv64(b"theorem41");
    let points: Result<Vec<Vec<R>>> = (0..cfg.cloud as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(cfg.seed, &[tag, i]);
            let mut x = rng::sample_vector::<R>(&mut r, n);
            let nx = e_norm.eval(&x);
            x.iter_mut().for_each(|v| *v /= nx);
            let mut y = rng::sample_vector::<R>(&mut r, m);
            let ny = f_norm.eval(&y);
            y.iter_mut().for_each(|v| *v /= ny);
            t.apply(&x, &y)
        })
        .collect();
    let points = points?;
    let m1_cloud = points
        .iter()
        .map(|z| couple_g.norm1().eval(z))
        .fold(R::zero(), |a, b| a.max(b));
    report.measure("m1_cloud", m1_cloud.lossy());

    // Difference-pair inequality: fit the constant over sampled pairs.
    let pair_tag = rng::fnv64(b"theorem41_pairs");
    let pair_ratios: Result<Vec<f64>> = (0..cfg.pairs as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(cfg.seed, &[pair_tag, i]);
            let a = (rng::unit_f64(&mut r) * points.len() as f64) as usize % points.len();
            let b = (rng::unit_f64(&mut r) * points.len() as f64) as usize % points.len();
            let u: Vec<R> = points[a].iter().zip(&points[b]).map(|(&x, &y)| x - y).collect();
            let n0 = couple_g.norm0().eval(&u);
            if n0 <= R::zero() {
                return Ok(0.0);
            }
            let g = g_interp(&u)?;
            let denom = n0 * dil.eval(R::of(2.0) * m1_cloud / n0)?;
            Ok((g / denom).lossy())
        })
        .collect();
    let pair_ratios = pair_ratios?;
    let c_pairs = pair_ratios.iter().cloned().fold(0.0_f64, f64::max);
    report.measure("pair_constant", c_pairs);

    // C-free core of the transfer modulus; the frozen constant multiplies it.
    let omega_core = |delta: R| -> Result<R> {
        if delta <= R::zero() {
            return Ok(R::zero());
        }
        Ok(delta * dil.eval(R::of(2.0) * m1_cloud / delta)?)
    };

    // Traversal under the zero-endpoint norm.
    let g0_dist = |a: &[R], b: &[R]| {
        let diff: Vec<R> = a.iter().zip(b).map(|(&x, &y)| x - y).collect();
        couple_g.norm0().eval(&diff)
    };
    let (centers, radii) = farthest_point_radii(&points, g0_dist, points.len());
    let profile = CoveringProfile::from_radii(&radii, cfg.octaves, 12);
    report.table(profile.table("covering_g0"));

    // Modulus on the grid: nondecreasing in delta and vanishing at the fine
    // end (a constant factor does not affect either property).
    let mut omega_vals = Vec::with_capacity(profile.epsilons.len());
    for &e in &profile.epsilons {
        omega_vals.push(omega_core(R::of(e))?.lossy());
    }
    let monotone = omega_vals.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    report.require(monotone, "modulus must be nondecreasing in delta");
    if let (Some(&first), Some(&last)) = (omega_vals.first(), omega_vals.last()) {
        report.measure("omega_top", first);
        report.measure("omega_bottom", last);
        report.require(
            last <= 0.5 * first,
            "modulus must vanish along the epsilon grid",
        );
    }

    // Covering transfer: the greedy G0-cover at eps is a C*w(eps)-cover in
    // the interpolated norm; verified center-by-center.
    let mut transfer_rows = Vec::new();
    let mut worst_margin = 0.0_f64;
    for (gi, &eps) in profile.epsilons.iter().enumerate() {
        let Some(k) = profile.counts[gi] else { continue };
        let active = &centers[..k.min(centers.len())];
        // assignment by zero-endpoint distance, then measure in the
        // interpolated norm
        let worst: Result<Vec<f64>> = points
            .par_iter()
            .map(|z| {
                let mut best = R::infinity();
                let mut arg = 0usize;
                for (ci, &c) in active.iter().enumerate() {
                    let d = g0_dist(z, &points[c]);
                    if d < best {
                        best = d;
                        arg = ci;
                    }
                }
                let u: Vec<R> = z
                    .iter()
                    .zip(&points[active[arg]])
                    .map(|(&x, &y)| x - y)
                    .collect();
                g_interp(&u).map(|v| v.lossy())
            })
            .collect();
        let d_interp = worst?.into_iter().fold(0.0_f64, f64::max);
        let core = omega_core(R::of(eps))?.lossy();
        if core > 0.0 {
            worst_margin = worst_margin.max(d_interp / core);
        }
        transfer_rows.push(vec![
            fmt_f64(eps),
            k.to_string(),
            fmt_f64(d_interp),
            fmt_f64(core),
        ]);
    }
    report.table(Table {
        name: "transfer".into(),
        columns: vec![
            "epsilon".into(),
            "g0_count".into(),
            "interp_dist".into(),
            "omega_core".into(),
        ],
        rows: transfer_rows,
    });
    report.measure("transfer_margin", worst_margin);
    let calibration = c_pairs.max(worst_margin);
    report.measure("calibration_ratio", calibration);
    if let Some(b) = cfg.bound {
        report.constant("bound", b);
        report.require(
            calibration <= b,
            "transfer constant exceeded the frozen bound",
        );
    }
    Ok(report)
}

/// Which of the three cutting parts enters a residual factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutPart {
    Middle,
    Plus,
    Minus,
}

impl CutPart {
    fn label(self) -> &'static str {
        match self {
            CutPart::Middle => "mid",
            CutPart::Plus => "plus",
            CutPart::Minus => "minus",
        }
    }

    fn kept_range(self, m: i32, window: i32) -> Option<(i32, i32)> {
        let r = match self {
            CutPart::Middle => (-m.min(window), m.min(window)),
            CutPart::Plus => (m + 1, window),
            CutPart::Minus => (-window, -m - 1),
        };
        if r.0 > r.1 {
            None
        } else {
            Some(r)
        }
    }
}

/// The eight residual factor pairs of the cutting decomposition.
pub const RESIDUAL_TERMS: [(CutPart, CutPart); 8] = [
    (CutPart::Plus, CutPart::Plus),
    (CutPart::Plus, CutPart::Minus),
    (CutPart::Minus, CutPart::Plus),
    (CutPart::Minus, CutPart::Minus),
    (CutPart::Plus, CutPart::Middle),
    (CutPart::Minus, CutPart::Middle),
    (CutPart::Middle, CutPart::Plus),
    (CutPart::Middle, CutPart::Minus),
];

/// Windowed sequence-space realization of a couple pair carrying the cutting
/// structure.
#[derive(Clone, Debug)]
pub struct ApSetup<R: Real> {
    pub couple_e: FiniteCouple<R>,
    pub couple_f: FiniteCouple<R>,
    pub window: i32,
}

/// Configuration for the cutting-decomposition residual check.
#[derive(Clone, Debug)]
pub struct Theorem43Config {
    pub p: f64,
    pub q: f64,
    pub interp_window: i32,
    pub m_grid: Vec<i32>,
    pub samples: usize,
    pub seed: u64,
    pub decay_tol: f64,
    /// Restrict both summation maps to blocks `|m| <= sigma_window`.
    pub sigma_window: Option<i32>,
    /// Frozen constant for the rho-type bound on each residual.
    pub bound: Option<f64>,
}

/// Measures the eight residual terms `T(sigma P^a u, sigma P^b v)` of the
/// cutting decomposition over the interpolated unit balls, checks each
/// trajectory against its proof-derived upper bound (cutting-norm products
/// through the endpoint bil-norms), and asserts geometric decay.
pub fn theorem43_steps<R: Real>(
    t: &BilinearMap<R>,
    setup: &ApSetup<R>,
    g_norm: &WeightedNorm<R>,
    rho: &FunctionParameter<R>,
    cfg: &Theorem43Config,
) -> Result<CheckReport> {
    let (l, n, m) = t.dims();
    if setup.couple_e.dim() != n || setup.couple_f.dim() != m || g_norm.dim() != l {
        return Err(Error::DimMismatch {
            expected: n,
            got: setup.couple_e.dim(),
        });
    }
    let mw = setup.window;
    let gamma = gamma_from_rho(rho)?;
    let dil = DilationFunction::compute(rho)?;
    let sc_e = SequenceCouple::new(&setup.couple_e, mw, R::one(), DeltaIndexing::Reflected)?;
    let sc_f = SequenceCouple::new(&setup.couple_f, mw, R::one(), DeltaIndexing::Reflected)?;
    let spec_e = InterpolationSpec::new(&gamma, R::of(cfg.p), Method::K, cfg.interp_window)?;
    let spec_f = InterpolationSpec::new(rho, R::of(cfg.q), Method::K, cfg.interp_window)?;
    let sigma_cap = cfg.sigma_window.unwrap_or(mw).min(mw);

    let mut report = CheckReport::new("theorem43");

    // AP1/AP3 on the endpoint sequence norms, via exact one-hot suprema of
    // the weight ratios.
    for &mm in &cfg.m_grid {
        let ap3 = if mm < mw {
            (-(mm as f64 + 1.0)).exp2()
        } else {
            0.0
        };
        let one_hot_ratio = |kept: Option<(i32, i32)>, from_k: i32, to_k: i32| -> f64 {
            let Some((lo, hi)) = kept else { return 0.0 };
            let mut best = 0.0_f64;
            for b in lo..=hi {
                let ratio = (-(b * (to_k - from_k)) as f64).exp2();
                best = best.max(ratio);
            }
            best
        };
        let plus01 = one_hot_ratio(CutPart::Plus.kept_range(mm, mw), 0, 1);
        let minus10 = one_hot_ratio(CutPart::Minus.kept_range(mm, mw), 1, 0);
        let mid00 = one_hot_ratio(CutPart::Middle.kept_range(mm, mw), 0, 0);
        if (plus01 - ap3).abs() > 0.0 {
            report.require(false, format!("AP3 plus norm at m={mm} must be 2^-(m+1)"));
        }
        if (minus10 - ap3).abs() > 0.0 {
            report.require(false, format!("AP3 minus norm at m={mm} must be 2^-(m+1)"));
        }
        report.require(mid00 <= 1.0, format!("AP1 middle bound violated at m={mm}"));
    }

    // Endpoint bil-norms of T over the base couples; exact for l1 endpoints.
    let mut m_end = [[R::zero(); 2]; 2];
    let mut all_exact = true;
    let budget = AscentBudget::default();
    for (j, ej) in [setup.couple_e.norm0(), setup.couple_e.norm1()].iter().enumerate() {
        for (k, fk) in [setup.couple_f.norm0(), setup.couple_f.norm1()].iter().enumerate() {
            let est = bil_norm(t, ej, fk, g_norm, &budget, rng::child_seed(cfg.seed, &[j as u64, k as u64]))?;
            m_end[j][k] = est.lower;
            all_exact &= est.exact;
        }
    }
    if all_exact {
        report.flag("endpoint bil-norms exact");
    } else {
        report.flag("endpoint bil-norms are ascent lower bounds");
    }

    // Sampled pairs on the interpolated unit balls.
    let tag = rng::fnv64(b"theorem43");
    let block_dim_e = (2 * mw + 1) as usize * n;
    let block_dim_f = (2 * mw + 1) as usize * m;
    let pairs: Result<Vec<(VectorSequence<R>, VectorSequence<R>)>> = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(cfg.seed, &[tag, i]);
            let flat_u = rng::sample_vector::<R>(&mut r, block_dim_e);
            let nu = k_method_norm(&sc_e, &spec_e, &flat_u)?.value;
            let flat_v = rng::sample_vector::<R>(&mut r, block_dim_f);
            let nv = k_method_norm(&sc_f, &spec_f, &flat_v)?.value;
            let u = VectorSequence::unflatten(mw, n, &flat_u)?.scaled(nu.recip());
            let v = VectorSequence::unflatten(mw, m, &flat_v)?.scaled(nv.recip());
            Ok((u, v))
        })
        .collect();
    let pairs = pairs?;

    let sigma_windowed = |seq: &VectorSequence<R>| -> Result<Vec<R>> {
        let (mid, _, _) = cutting(seq, sigma_cap)?;
        Ok(sigma(&mid))
    };

    // Proof-derived endpoint bound for one factor pair at index mm.
    let endpoint_bound = |part_e: CutPart, part_f: CutPart, mm: i32, k: i32| -> R {
        let range_e = part_e.kept_range(mm, mw.min(sigma_cap));
        let range_f = part_f.kept_range(mm, mw.min(sigma_cap));
        let (Some(re), Some(rf)) = (range_e, range_f) else {
            return R::zero();
        };
        let mut best = R::zero();
        for be in re.0..=re.1 {
            for bf in rf.0..=rf.1 {
                let mut term = R::infinity();
                for j in 0..2i32 {
                    for jf in 0..2i32 {
                        let factor = R::of((((k - j) * be + (k - jf) * bf) as f64).exp2());
                        term = term.min(m_end[j as usize][jf as usize] * factor);
                    }
                }
                best = best.max(term);
            }
        }
        best
    };

    let mut rows = Vec::new();
    let mut worst_cal = 0.0_f64;
    let mut term_first: Vec<f64> = vec![0.0; RESIDUAL_TERMS.len()];
    let mut term_last: Vec<f64> = vec![0.0; RESIDUAL_TERMS.len()];
    let mut bounds_ok = true;
    for (gi, &mm) in cfg.m_grid.iter().enumerate() {
        for (ti, &(pe, pf)) in RESIDUAL_TERMS.iter().enumerate() {
            let measured: Result<Vec<f64>> = pairs
                .par_iter()
                .map(|(u, v)| {
                    let cut_u = match pe {
                        CutPart::Middle => cutting(u, mm)?.0,
                        CutPart::Plus => cutting(u, mm)?.1,
                        CutPart::Minus => cutting(u, mm)?.2,
                    };
                    let cut_v = match pf {
                        CutPart::Middle => cutting(v, mm)?.0,
                        CutPart::Plus => cutting(v, mm)?.1,
                        CutPart::Minus => cutting(v, mm)?.2,
                    };
                    let z = t.apply(&sigma_windowed(&cut_u)?, &sigma_windowed(&cut_v)?)?;
                    Ok(g_norm.eval(&z).lossy())
                })
                .collect();
            let measured = measured?.into_iter().fold(0.0_f64, f64::max);
            let b0 = endpoint_bound(pe, pf, mm, 0);
            let b1 = endpoint_bound(pe, pf, mm, 1);
            let rho_bound = if b0 > R::zero() {
                (b0 * dil.eval(b1 / b0)?).lossy()
            } else {
                0.0
            };
            if rho_bound > 0.0 {
                worst_cal = worst_cal.max(measured / rho_bound);
            } else if measured > 1e-12 {
                bounds_ok = false;
            }
            if let Some(c) = cfg.bound {
                if measured > c * rho_bound + 1e-12 {
                    bounds_ok = false;
                }
            }
            if gi == 0 {
                term_first[ti] = measured;
            }
            if gi == cfg.m_grid.len() - 1 {
                term_last[ti] = measured;
            }
            rows.push(vec![
                mm.to_string(),
                format!("{}_{}", pe.label(), pf.label()),
                fmt_f64(measured),
                fmt_f64(rho_bound),
            ]);
        }
    }
    report.table(Table {
        name: "trajectories".into(),
        columns: vec!["m".into(), "term".into(), "measured".into(), "bound".into()],
        rows,
    });
    report.measure("calibration_ratio", worst_cal);
    if let Some(c) = cfg.bound {
        report.constant("bound", c);
        report.require(bounds_ok, "a residual exceeded its rho-type bound");
    }
    // Geometric decay of every trajectory.
    let mut decay_ok = true;
    for ti in 0..RESIDUAL_TERMS.len() {
        if term_first[ti] > 0.0 && term_last[ti] > cfg.decay_tol * term_first[ti] {
            decay_ok = false;
            report.flag(format!(
                "term {}_{} decayed only to {:.3e} of its initial value",
                RESIDUAL_TERMS[ti].0.label(),
                RESIDUAL_TERMS[ti].1.label(),
                term_last[ti] / term_first[ti]
            ));
        }
    }
    report.require(decay_ok, "residual trajectories must decay below tolerance");
    report.measure(
        "max_final_over_initial",
        (0..RESIDUAL_TERMS.len())
            .map(|ti| {
                if term_first[ti] > 0.0 {
                    term_last[ti] / term_first[ti]
                } else {
                    0.0
                }
            })
            .fold(0.0_f64, f64::max),
    );
    Ok(report)
}

/// Ordering preset for the one-sided variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoupleOrdering {
    /// `E0` into `E1` and `F0` into `F1` (as the theorem statement reads).
    Nested,
    /// `E0` into `E1` with the second couple reversed (as the proof remark
    /// reads).
    SecondReversed,
}

/// One-sided variant: ordered couples, only zero-endpoint compactness data;
/// runs the same residual harness and reports the ordering used.
pub fn theorem51_ordered_variant<R: Real>(
    t: &BilinearMap<R>,
    dim_e: usize,
    dim_f: usize,
    window: i32,
    ordering: CoupleOrdering,
    g_norm: &WeightedNorm<R>,
    rho: &FunctionParameter<R>,
    cfg: &Theorem43Config,
) -> Result<CheckReport> {
    let ordered = |dim: usize, reversed: bool| -> Result<FiniteCouple<R>> {
        let w0 = vec![R::one(); dim];
        let w1: Vec<R> = (0..dim).map(|i| R::of((-(i as f64)).exp2())).collect();
        if reversed {
            FiniteCouple::new(WeightedNorm::new(R::one(), w1)?, WeightedNorm::new(R::one(), w0)?)
        } else {
            FiniteCouple::new(WeightedNorm::new(R::one(), w0)?, WeightedNorm::new(R::one(), w1)?)
        }
    };
    let couple_e = ordered(dim_e, false)?;
    let couple_f = ordered(dim_f, ordering == CoupleOrdering::SecondReversed)?;
    let setup = ApSetup {
        couple_e,
        couple_f,
        window,
    };
    let mut report = theorem43_steps(t, &setup, g_norm, rho, cfg)?;
    report.check = "theorem51".into();
    report.flag(match ordering {
        CoupleOrdering::Nested => "ordering: both couples nested downward",
        CoupleOrdering::SecondReversed => "ordering: second couple reversed",
    });
    Ok(report)
}

/// Configuration for the end-to-end entropy-profile check.
#[derive(Clone, Debug)]
pub struct Theorem52Config {
    pub p: f64,
    pub q: f64,
    pub window: i32,
    pub dims: (usize, usize),
    pub decay_alpha: f64,
    pub cloud: usize,
    pub m_max: usize,
    pub octaves: usize,
    pub seed: u64,
    pub bound: Option<f64>,
}

struct DimProfile {
    entropy_interp: Vec<f64>,
    profile_interp: CoveringProfile,
    profile_g0: CoveringProfile,
    transfer_rows: Vec<Vec<String>>,
    transfer_margin: f64,
}

/// Entropy profiles of diagonal-decay image clouds under the interpolated
/// norm at two truncation dimensions; profiles must be stable within a
/// factor of two and satisfy the covering transfer from the zero-endpoint
/// norm.
pub fn theorem52_check<R: Real>(rho: &FunctionParameter<R>, cfg: &Theorem52Config) -> Result<CheckReport> {
    if cfg.dims.0 == 0 || cfg.dims.0 > cfg.dims.1 {
        return Err(Error::domain("dims must be ordered and positive"));
    }
    let inv_r = 1.0 / cfg.p + 1.0 / cfg.q - 1.0;
    if inv_r < -1e-12 {
        return Err(Error::precondition("1/p + 1/q must be at least 1"));
    }
    let r_exp = if inv_r <= 1e-12 { f64::INFINITY } else { 1.0 / inv_r };
    let gamma = gamma_from_rho(rho)?;
    let dil = DilationFunction::compute(rho)?;

    let mut report = CheckReport::new("theorem52");
    let mut per_dim: Vec<DimProfile> = Vec::new();
    for &dim in &[cfg.dims.0, cfg.dims.1] {
        let w1: Vec<R> = (0..dim).map(|i| R::of((-(i as f64)).exp2())).collect();
        let couple = FiniteCouple::new(
            WeightedNorm::new(R::one(), vec![R::one(); dim])?,
            WeightedNorm::new(R::one(), w1)?,
        )?;
        let t = BilinearMap::diagonal_decay(dim, R::of(cfg.decay_alpha))?;
        let spec_e = InterpolationSpec::new(&gamma, R::of(cfg.p), Method::K, cfg.window)?;
        let spec_f = InterpolationSpec::new(rho, R::of(cfg.q), Method::K, cfg.window)?;
        let spec_g = InterpolationSpec::new(rho, R::of(r_exp), Method::K, cfg.window)?;
        // Matched sampling: coordinate i of sample s is identical across the
        // two dimensions, so the small-dim cloud is a coordinate prefix of
        // the large-dim cloud.
        let tag = rng::fnv64(b"theorem52");
        let points: Result<Vec<Vec<R>>> = (0..cfg.cloud as u64)
            .into_par_iter()
            .map(|s| {
                let mut rx = rng::stream(cfg.seed, &[tag, s, 0]);
                let mut ry = rng::stream(cfg.seed, &[tag, s, 1]);
                let x: Vec<R> = (0..dim).map(|_| rng::symmetric(&mut rx)).collect();
                let y: Vec<R> = (0..dim).map(|_| rng::symmetric(&mut ry)).collect();
                let nx = k_method_norm(&couple, &spec_e, &x)?.value;
                let ny = k_method_norm(&couple, &spec_f, &y)?.value;
                let xs: Vec<R> = x.iter().map(|&v| v / nx).collect();
                let ys: Vec<R> = y.iter().map(|&v| v / ny).collect();
                t.apply(&xs, &ys)
            })
            .collect();
        let points = points?;
        let m1_cloud = points
            .iter()
            .map(|z| couple.norm1().eval(z))
            .fold(R::zero(), |a, b| a.max(b));

        let interp_dist = |a: &[R], b: &[R]| {
            let diff: Vec<R> = a.iter().zip(b).map(|(&x, &y)| x - y).collect();
            k_method_norm(&couple, &spec_g, &diff).map(|n| n.value).unwrap_or(R::infinity())
        };
        let g0_dist = |a: &[R], b: &[R]| {
            let diff: Vec<R> = a.iter().zip(b).map(|(&x, &y)| x - y).collect();
            couple.norm0().eval(&diff)
        };
        let depth = (1usize << (cfg.m_max - 1)).min(cfg.cloud);
        let (_, radii_interp) = farthest_point_radii(&points, interp_dist, depth);
        let (centers_g0, radii_g0) = farthest_point_radii(&points, g0_dist, depth);
        let profile_interp = CoveringProfile::from_radii(&radii_interp, cfg.octaves, cfg.m_max);
        let profile_g0 = CoveringProfile::from_radii(&radii_g0, cfg.octaves, cfg.m_max);

        // Transfer at entropy scales: with 2^{m-1} zero-endpoint centers the
        // interpolated assignment radius obeys the modulus up to the frozen
        // constant.
        let mut transfer_rows = Vec::new();
        let mut margin = 0.0_f64;
        for mexp in 1..=cfg.m_max {
            let k = 1usize << (mexp - 1);
            if k > centers_g0.len() {
                break;
            }
            let active = &centers_g0[..k];
            let d_interp: Result<Vec<f64>> = points
                .par_iter()
                .map(|z| {
                    let mut best = R::infinity();
                    let mut arg = 0usize;
                    for (ci, &c) in active.iter().enumerate() {
                        let d = g0_dist(z, &points[c]);
                        if d < best {
                            best = d;
                            arg = ci;
                        }
                    }
                    let u: Vec<R> =
                        z.iter().zip(&points[active[arg]]).map(|(&x, &y)| x - y).collect();
                    Ok(k_method_norm(&couple, &spec_g, &u)?.value.lossy())
                })
                .collect();
            let d_interp = d_interp?.into_iter().fold(0.0_f64, f64::max);
            let delta = radii_g0[k - 1];
            let core = if delta > R::zero() {
                (delta * dil.eval(R::of(2.0) * m1_cloud / delta)?).lossy()
            } else {
                0.0
            };
            if core > 0.0 {
                margin = margin.max(d_interp / core);
            }
            transfer_rows.push(vec![
                mexp.to_string(),
                fmt_f64(delta.lossy()),
                fmt_f64(d_interp),
                fmt_f64(core),
            ]);
        }
        per_dim.push(DimProfile {
            entropy_interp: profile_interp.entropy.clone(),
            profile_interp,
            profile_g0,
            transfer_rows,
            transfer_margin: margin,
        });
    }

    let (small, big) = (&per_dim[0], &per_dim[1]);
    report.table(small.profile_interp.table("interp_small"));
    report.table(big.profile_interp.table("interp_big"));
    report.table(small.profile_g0.table("g0_small"));
    report.table(big.profile_g0.table("g0_big"));
    report.table(Table {
        name: "transfer_small".into(),
        columns: vec!["m".into(), "delta_g0".into(), "interp_dist".into(), "omega_core".into()],
        rows: small.transfer_rows.clone(),
    });
    report.table(Table {
        name: "transfer_big".into(),
        columns: vec!["m".into(), "delta_g0".into(), "interp_dist".into(), "omega_core".into()],
        rows: big.transfer_rows.clone(),
    });

    // Entropy numbers nonincreasing (structural) and stable across dims.
    for prof in [&small.entropy_interp, &big.entropy_interp] {
        let mono = prof.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
        report.require(mono, "entropy numbers must be nonincreasing");
    }
    let mut rows = Vec::new();
    let mut stable = true;
    let mut worst_ratio = 1.0_f64;
    let scale_floor = 1e-10 * small.entropy_interp.first().copied().unwrap_or(1.0);
    for (i, (&a, &b)) in small
        .entropy_interp
        .iter()
        .zip(&big.entropy_interp)
        .enumerate()
    {
        let ratio = if a <= scale_floor && b <= scale_floor {
            1.0
        } else {
            b / a
        };
        stable &= (0.5..=2.0).contains(&ratio);
        worst_ratio = worst_ratio.max(ratio.max(1.0 / ratio));
        rows.push(vec![
            (i + 1).to_string(),
            fmt_f64(a),
            fmt_f64(b),
            fmt_f64(ratio),
        ]);
    }
    report.table(Table {
        name: "entropy_stability".into(),
        columns: vec!["m".into(), "e_small".into(), "e_big".into(), "ratio".into()],
        rows,
    });
    report.measure("stability_worst_ratio", worst_ratio);
    let calibration = small.transfer_margin.max(big.transfer_margin);
    report.measure("calibration_ratio", calibration);
    report.require(stable, "entropy profiles must agree within a factor of two");
    if let Some(b) = cfg.bound {
        report.constant("bound", b);
        report.require(
            calibration <= b,
            "entropy transfer exceeded its frozen modulus constant",
        );
    }
    Ok(report)
}

/// Configuration for the smoothing-residual check.
#[derive(Clone, Debug)]
pub struct PerssonConfig {
    pub p: f64,
    pub q: f64,
    pub window: i32,
    pub samples: usize,
    pub octaves: usize,
    pub seed: u64,
    pub decay_tol: f64,
    pub bound: Option<f64>,
}

/// Truncation-projection smoothing: the residual `(I - P_r) T` measured over
/// the interpolated balls must follow the chain bound
/// `C dil(2 M1) delta_r dil(1/delta_r)` with `delta_r` the exact
/// zero-endpoint residual, vanish at full rank, and drop below tolerance
/// before it.
pub fn persson_check<R: Real>(
    t: &BilinearMap<R>,
    couple_e: &FiniteCouple<R>,
    couple_f: &FiniteCouple<R>,
    couple_g: &FiniteCouple<R>,
    rho: &FunctionParameter<R>,
    cfg: &PerssonConfig,
) -> Result<CheckReport> {
    let (l, n, m) = t.dims();
    if couple_e.dim() != n || couple_f.dim() != m || couple_g.dim() != l {
        return Err(Error::DimMismatch {
            expected: l,
            got: couple_g.dim(),
        });
    }
    if couple_e.norm0().p() != R::one() || couple_f.norm0().p() != R::one() {
        return Err(Error::precondition(
            "persson harness needs l1 departure endpoints for exact residual norms",
        ));
    }
    let inv_r = 1.0 / cfg.p + 1.0 / cfg.q - 1.0;
    let r_exp = if inv_r <= 1e-12 { f64::INFINITY } else { 1.0 / inv_r };
    let gamma = gamma_from_rho(rho)?;
    let dil = DilationFunction::compute(rho)?;
    let spec_e = InterpolationSpec::new(&gamma, R::of(cfg.p), Method::K, cfg.window)?;
    let spec_f = InterpolationSpec::new(rho, R::of(cfg.q), Method::K, cfg.window)?;
    let spec_g = InterpolationSpec::new(rho, R::of(r_exp), Method::K, cfg.window)?;

    let mut report = CheckReport::new("persson");

    // Uniform projection bounds: truncations are exact contractions on
    // weighted norms, with norm 1 whenever they keep a coordinate.
    let truncate = |z: &[R], r: usize| -> Vec<R> {
        z.iter()
            .enumerate()
            .map(|(i, &v)| if i < r { v } else { R::zero() })
            .collect()
    };
    {
        let probe = {
            let mut v = vec![R::zero(); l];
            v[0] = R::one();
            v
        };
        let p1 = truncate(&probe, 1);
        let r0 = couple_g.norm0().eval(&p1) / couple_g.norm0().eval(&probe);
        let r1 = couple_g.norm1().eval(&p1) / couple_g.norm1().eval(&probe);
        report.require(r0 == R::one() && r1 == R::one(), "projection norms must be 1");
    }

    // Endpoint image extremes (the l1 ball extreme points) plus sampled
    // points form the compact-set model.
    let mut cloud: Vec<Vec<R>> = Vec::new();
    for i in 0..n {
        for j in 0..m {
            let mut x = vec![R::zero(); n];
            x[i] = couple_e.norm0().weights()[i].recip();
            let mut y = vec![R::zero(); m];
            y[j] = couple_f.norm0().weights()[j].recip();
            cloud.push(t.apply(&x, &y)?);
        }
    }
    let m1_exact = {
        let budget = AscentBudget::default();
        bil_norm(t, couple_e.norm1(), couple_f.norm1(), couple_g.norm1(), &budget, cfg.seed)?
    };

    // Smallest rank reaching each scale on the zero-endpoint cloud.
    let radius0 = cloud
        .iter()
        .map(|z| couple_g.norm0().eval(z))
        .fold(R::zero(), |a, b| a.max(b));
    let mut eps_rows = Vec::new();
    for j in 0..=cfg.octaves {
        let eps = radius0.lossy() / (j as f64).exp2();
        let mut r_min = l;
        for r in 0..=l {
            let worst = cloud
                .iter()
                .map(|z| {
                    let diff: Vec<R> = z
                        .iter()
                        .zip(truncate(z, r))
                        .map(|(&a, b)| a - b)
                        .collect();
                    couple_g.norm0().eval(&diff)
                })
                .fold(R::zero(), |a, b| a.max(b));
            if worst.lossy() < eps {
                r_min = r;
                break;
            }
        }
        eps_rows.push(vec![fmt_f64(eps), r_min.to_string()]);
    }
    report.table(Table {
        name: "eps_rank".into(),
        columns: vec!["epsilon".into(), "r_min".into()],
        rows: eps_rows,
    });

    // Exact zero-endpoint residual and sampled interpolated residual per r.
    let tag = rng::fnv64(b"persson");
    let samples: Result<Vec<(Vec<R>, Vec<R>)>> = (0..cfg.samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rr = rng::stream(cfg.seed, &[tag, i]);
            let x = rng::sample_vector::<R>(&mut rr, n);
            let nx = k_method_norm(couple_e, &spec_e, &x)?.value;
            let y = rng::sample_vector::<R>(&mut rr, m);
            let ny = k_method_norm(couple_f, &spec_f, &y)?.value;
            Ok((
                x.iter().map(|&v| v / nx).collect(),
                y.iter().map(|&v| v / ny).collect(),
            ))
        })
        .collect();
    let samples = samples?;

    let mut rows = Vec::new();
    let mut residuals = Vec::with_capacity(l + 1);
    let mut bounds_ok = true;
    let c_fit_needed = cfg.bound.is_none();
    let mut c_fit = 0.0_f64;
    for r in 0..=l {
        // delta_r: exact over the l1 x l1 endpoint balls.
        let delta = cloud
            .iter()
            .map(|z| {
                let diff: Vec<R> = z.iter().zip(truncate(z, r)).map(|(&a, b)| a - b).collect();
                couple_g.norm0().eval(&diff)
            })
            .fold(R::zero(), |a, b| a.max(b));
        let measured: Result<Vec<f64>> = samples
            .par_iter()
            .map(|(x, y)| {
                let z = t.apply(x, y)?;
                let diff: Vec<R> = z.iter().zip(truncate(&z, r)).map(|(&a, b)| a - b).collect();
                Ok(k_method_norm(couple_g, &spec_g, &diff)?.value.lossy())
            })
            .collect();
        let measured = measured?.into_iter().fold(0.0_f64, f64::max);
        let chain_core = if delta > R::zero() {
            (dil.eval(R::of(2.0) * m1_exact.lower)? * delta * dil.eval(delta.recip())?).lossy()
        } else {
            0.0
        };
        if chain_core > 0.0 {
            c_fit = c_fit.max(measured / chain_core);
        } else if measured > 1e-12 {
            bounds_ok = false;
        }
        if let Some(c) = cfg.bound {
            if measured > c * chain_core + 1e-12 {
                bounds_ok = false;
            }
        }
        residuals.push(measured);
        rows.push(vec![
            r.to_string(),
            fmt_f64(delta.lossy()),
            fmt_f64(measured),
            fmt_f64(chain_core),
        ]);
    }
    report.table(Table {
        name: "residuals".into(),
        columns: vec!["r".into(), "delta0".into(), "measured".into(), "chain_core".into()],
        rows,
    });
    let _ = c_fit_needed;
    report.measure("calibration_ratio", c_fit);
    if let Some(c) = cfg.bound {
        report.constant("bound", c);
        report.require(bounds_ok, "a residual exceeded its chain bound");
    }
    // Curve shape: nonincreasing, exactly zero at full rank, below tolerance
    // before it.
    let mono = residuals.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-300);
    report.require(mono, "residual curve must be nonincreasing in r");
    report.require(
        *residuals.last().unwrap() == 0.0,
        "residual at full rank must be exactly zero",
    );
    let initial = residuals[0];
    let hit = residuals[..l]
        .iter()
        .any(|&v| v <= cfg.decay_tol * initial);
    report.require(
        initial == 0.0 || hit,
        "residual must drop below tolerance before full rank",
    );
    report.measure("initial_residual", initial);
    Ok(report)
}
