//! Finite-dimensional couple model: two weighted `l^p` norms on a shared
//! coordinate space, with J- and K-functional evaluation.
//!
//! Both norms are lattice norms, so the K-infimum is restricted to pointwise
//! same-sign splits `x0 = s`, `x1 = x - s` with `s_i` between 0 and `x_i`;
//! that box-constrained convex program is solved by projected coordinate
//! descent, with exact one-dimensional threshold reductions whenever an
//! endpoint exponent is 1 or infinity.

use crate::error::{Error, Result};
use crate::scalar::{valid_exponent, Real};

/// Weighted `l^p` norm: `(sum_i w_i |x_i|^p)^(1/p)`, or `max_i w_i |x_i|`
/// for `p = inf`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedNorm<R: Real> {
    p: R,
    weights: Vec<R>,
}

impl<R: Real> WeightedNorm<R> {
    pub fn new(p: R, weights: Vec<R>) -> Result<Self> {
        if !valid_exponent(p) {
            return Err(Error::domain(format!("exponent must be in [1, inf], got {p}")));
        }
        if weights.is_empty() {
            return Err(Error::domain("weights must be non-empty"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > R::zero())) {
            return Err(Error::domain("weights must be strictly positive"));
        }
        Ok(WeightedNorm { p, weights })
    }

    /// Unit weights.
    pub fn uniform(p: R, dim: usize) -> Result<Self> {
        Self::new(p, vec![R::one(); dim])
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn p(&self) -> R {
        self.p
    }

    pub fn weights(&self) -> &[R] {
        &self.weights
    }

    pub fn is_inf(&self) -> bool {
        self.p.is_infinite()
    }

    pub fn eval(&self, x: &[R]) -> R {
        debug_assert_eq!(x.len(), self.dim());
        if self.p.is_infinite() {
            return x
                .iter()
                .zip(&self.weights)
                .fold(R::zero(), |m, (&v, &w)| m.max(w * v.abs()));
        }
        if self.p == R::one() {
            return x.iter().zip(&self.weights).map(|(&v, &w)| w * v.abs()).sum();
        }
        let s: R = x
            .iter()
            .zip(&self.weights)
            .map(|(&v, &w)| w * v.abs().powf(self.p))
            .sum();
        s.powf(self.p.recip())
    }

    /// Norm with every weight multiplied by `c > 0`.
    pub fn scaled(&self, c: R) -> Result<Self> {
        Self::new(self.p, self.weights.iter().map(|&w| w * c).collect())
    }

    /// A maximizer of `<g, x>` over the unit ball; ties resolved toward the
    /// lowest index. Used as the dual-scaled ascent step by the bilinear
    /// norm estimator.
    pub fn dual_attainer(&self, g: &[R]) -> Vec<R> {
        let n = self.dim();
        let sgn = |v: R| if v < R::zero() { -R::one() } else { R::one() };
        if g.iter().all(|&v| v == R::zero()) {
            let mut x = vec![R::zero(); n];
            x[0] = self.unit_coordinate(0);
            return x;
        }
        if self.p == R::one() {
            let mut best = 0usize;
            let mut score = R::neg_infinity();
            for i in 0..n {
                let s = g[i].abs() / self.weights[i];
                if s > score {
                    score = s;
                    best = i;
                }
            }
            let mut x = vec![R::zero(); n];
            x[best] = sgn(g[best]) / self.weights[best];
            return x;
        }
        if self.p.is_infinite() {
            return (0..n).map(|i| sgn(g[i]) / self.weights[i]).collect();
        }
        let e = (self.p - R::one()).recip();
        let mut x: Vec<R> = (0..n)
            .map(|i| sgn(g[i]) * (g[i].abs() / self.weights[i]).powf(e))
            .collect();
        let nv = self.eval(&x);
        if nv > R::zero() {
            x.iter_mut().for_each(|v| *v /= nv);
        } else {
            x[0] = self.unit_coordinate(0);
        }
        x
    }

    /// Coordinate value that puts the i-th basis vector on the unit sphere.
    pub fn unit_coordinate(&self, i: usize) -> R {
        if self.p.is_infinite() || self.p == R::one() {
            self.weights[i].recip()
        } else {
            self.weights[i].powf(-self.p.recip())
        }
    }
}

/// Options for the K-functional solver.
#[derive(Clone, Copy, Debug)]
pub struct KOptions<R: Real> {
    pub tol: R,
    pub max_sweeps: usize,
}

impl<R: Real> Default for KOptions<R> {
    fn default() -> Self {
        KOptions {
            tol: R::of(1e-8),
            max_sweeps: 10_000,
        }
    }
}

/// Anything that exposes the two endpoint norms of a couple together with
/// J- and K-functional evaluation on its coordinate space.
pub trait CoupleNorms<R: Real>: Sync {
    fn dim(&self) -> usize;
    fn norm0(&self, x: &[R]) -> R;
    fn norm1(&self, x: &[R]) -> R;
    fn k_functional(&self, t: R, x: &[R], opts: &KOptions<R>) -> Result<R>;

    fn j_functional(&self, t: R, x: &[R]) -> Result<R> {
        if !(t > R::zero()) {
            return Err(Error::domain(format!("J is defined for t > 0, got {t}")));
        }
        Ok(self.norm0(x).max(t * self.norm1(x)))
    }
}

/// Two weighted norms sharing one coordinate space.
#[derive(Clone, Debug)]
pub struct FiniteCouple<R: Real> {
    norm0: WeightedNorm<R>,
    norm1: WeightedNorm<R>,
}

impl<R: Real> FiniteCouple<R> {
    pub fn new(norm0: WeightedNorm<R>, norm1: WeightedNorm<R>) -> Result<Self> {
        if norm0.dim() != norm1.dim() {
            return Err(Error::DimMismatch {
                expected: norm0.dim(),
                got: norm1.dim(),
            });
        }
        Ok(FiniteCouple { norm0, norm1 })
    }

    pub fn dim(&self) -> usize {
        self.norm0.dim()
    }

    pub fn norm0(&self) -> &WeightedNorm<R> {
        &self.norm0
    }

    pub fn norm1(&self) -> &WeightedNorm<R> {
        &self.norm1
    }

    fn check_dim(&self, x: &[R]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// `J(t, x) = max(|x|_0, t |x|_1)`.
    pub fn j(&self, t: R, x: &[R]) -> Result<R> {
        self.check_dim(x)?;
        if !(t > R::zero()) {
            return Err(Error::domain(format!("J is defined for t > 0, got {t}")));
        }
        Ok(self.norm0.eval(x).max(t * self.norm1.eval(x)))
    }

    /// `K(t, x)` within the solver tolerance.
    pub fn k(&self, t: R, x: &[R], opts: &KOptions<R>) -> Result<R> {
        Ok(self.k_with_split(t, x, opts)?.0)
    }

    /// K-functional together with the magnitudes `s` of the optimal zero-part
    /// (`x0 = sign(x) .* s`).
    pub fn k_with_split(&self, t: R, x: &[R], opts: &KOptions<R>) -> Result<(R, Vec<R>)> {
        self.check_dim(x)?;
        if !(t > R::zero()) || !t.is_finite() {
            return Err(Error::domain(format!("K is defined for finite t > 0, got {t}")));
        }
        let a: Vec<R> = x.iter().map(|v| v.abs()).collect();
        if a.iter().all(|&v| v == R::zero()) {
            return Ok((R::zero(), a));
        }
        let n0 = &self.norm0;
        let n1 = &self.norm1;
        if n0.p() == R::one() && n1.p() == R::one() {
            // Separable closed form; ties split toward the smaller zero-part.
            let mut value = R::zero();
            let mut s = vec![R::zero(); a.len()];
            for i in 0..a.len() {
                let c0 = n0.weights()[i];
                let c1 = t * n1.weights()[i];
                if c0 < c1 {
                    s[i] = a[i];
                    value += c0 * a[i];
                } else {
                    value += c1 * a[i];
                }
            }
            return Ok((value, s));
        }
        if n1.is_inf() {
            // Cap the 1-part level: s_i = (a_i - mu / w1_i)_+.
            let mu_max = a
                .iter()
                .zip(n1.weights())
                .fold(R::zero(), |m, (&ai, &w)| m.max(ai * w));
            let split_for = |mu: R| -> Vec<R> {
                a.iter()
                    .zip(n1.weights())
                    .map(|(&ai, &w)| (ai - mu / w).max(R::zero()))
                    .collect()
            };
            let g = |mu: R| {
                let s = split_for(mu);
                n0.eval(&s) + t * mu.min(mu_max)
            };
            let mu = golden_min(g, R::zero(), mu_max, 100);
            let s = split_for(mu);
            let rest: Vec<R> = a.iter().zip(&s).map(|(&ai, &si)| ai - si).collect();
            return Ok((n0.eval(&s) + t * n1.eval(&rest), s));
        }
        if n0.is_inf() {
            // Cap the 0-part level: s_i = min(a_i, lambda / w0_i).
            let lam_max = a
                .iter()
                .zip(n0.weights())
                .fold(R::zero(), |m, (&ai, &w)| m.max(ai * w));
            let split_for = |lam: R| -> Vec<R> {
                a.iter()
                    .zip(n0.weights())
                    .map(|(&ai, &w)| ai.min(lam / w))
                    .collect()
            };
            let g = |lam: R| {
                let s = split_for(lam);
                let rest: Vec<R> = a.iter().zip(&s).map(|(&ai, &si)| ai - si).collect();
                lam.min(lam_max) + t * n1.eval(&rest)
            };
            let lam = golden_min(g, R::zero(), lam_max, 100);
            let s = split_for(lam);
            let rest: Vec<R> = a.iter().zip(&s).map(|(&ai, &si)| ai - si).collect();
            return Ok((n0.eval(&s).min(lam) + t * n1.eval(&rest), s));
        }
        self.k_coordinate_descent(t, &a, opts)
    }

    /// Projected coordinate descent for finite exponents on both sides.
    fn k_coordinate_descent(&self, t: R, a: &[R], opts: &KOptions<R>) -> Result<(R, Vec<R>)> {
        let n = a.len();
        let (p0, p1) = (self.norm0.p(), self.norm1.p());
        let (w0, w1) = (self.norm0.weights(), self.norm1.weights());
        let mut s: Vec<R> = a.iter().map(|&v| v * R::of(0.5)).collect();
        let eval_f = |s: &[R]| {
            let rest: Vec<R> = a.iter().zip(s).map(|(&ai, &si)| ai - si).collect();
            self.norm0.eval(s) + t * self.norm1.eval(&rest)
        };
        let mut f_prev = eval_f(&s);
        let mut last_improvement = f_prev;
        for _ in 0..opts.max_sweeps {
            // Power sums without the active coordinate, updated in place.
            let mut s0: R = s.iter().zip(w0).map(|(&v, &w)| w * v.powf(p0)).sum();
            let mut s1: R = a
                .iter()
                .zip(&s)
                .zip(w1)
                .map(|((&ai, &si), &w)| w * (ai - si).powf(p1))
                .sum();
            for i in 0..n {
                if a[i] == R::zero() {
                    continue;
                }
                let s0_wo = (s0 - w0[i] * s[i].powf(p0)).max(R::zero());
                let s1_wo = (s1 - w1[i] * (a[i] - s[i]).powf(p1)).max(R::zero());
                let h = |v: R| {
                    (s0_wo + w0[i] * v.powf(p0)).powf(p0.recip())
                        + t * (s1_wo + w1[i] * (a[i] - v).powf(p1)).powf(p1.recip())
                };
                let v = golden_min(h, R::zero(), a[i], 60);
                s[i] = v;
                s0 = s0_wo + w0[i] * v.powf(p0);
                s1 = s1_wo + w1[i] * (a[i] - v).powf(p1);
            }
            let f = eval_f(&s);
            last_improvement = (f_prev - f).max(R::zero());
            if last_improvement <= opts.tol * f.max(R::of(1e-300)) {
                // The all-or-nothing splits are always feasible; never return
                // worse than either.
                let f_all = self.norm0.eval(a);
                let f_none = t * self.norm1.eval(a);
                if f_all < f && f_all <= f_none {
                    return Ok((f_all, a.to_vec()));
                }
                if f_none < f {
                    return Ok((f_none, vec![R::zero(); n]));
                }
                return Ok((f, s));
            }
            f_prev = f;
        }
        Err(Error::NonConvergence {
            lower: (f_prev - last_improvement * R::of(n as f64)).max(R::zero()).lossy(),
            upper: f_prev.lossy(),
        })
    }

    /// `K(1, x)`: the sum norm of the couple.
    pub fn sum_norm(&self, x: &[R], opts: &KOptions<R>) -> Result<R> {
        self.k(R::one(), x, opts)
    }

    /// `J(1, x) = max(|x|_0, |x|_1)`: the intersection norm.
    pub fn intersection_norm(&self, x: &[R]) -> Result<R> {
        self.j(R::one(), x)
    }
}

impl<R: Real> CoupleNorms<R> for FiniteCouple<R> {
    fn dim(&self) -> usize {
        self.dim()
    }
    fn norm0(&self, x: &[R]) -> R {
        self.norm0.eval(x)
    }
    fn norm1(&self, x: &[R]) -> R {
        self.norm1.eval(x)
    }
    fn k_functional(&self, t: R, x: &[R], opts: &KOptions<R>) -> Result<R> {
        self.k(t, x, opts)
    }
}

/// Golden-section minimization of a convex (unimodal) function on `[lo, hi]`.
/// Flat stretches resolve toward the left endpoint.
pub(crate) fn golden_min<R: Real>(f: impl Fn(R) -> R, lo: R, hi: R, iters: usize) -> R {
    if !(hi > lo) {
        return lo;
    }
    let inv_phi = R::of(0.618_033_988_749_894_9);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    // Endpoint minimizers must be returned exactly; prefer the leftmost of
    // equally good candidates.
    let candidates = [a, c, d, b];
    let mut best = a;
    let mut best_f = f(a);
    for &cand in &candidates[1..] {
        let fv = f(cand);
        if fv < best_f {
            best_f = fv;
            best = cand;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::rng;

    fn l1_linf(dim: usize) -> FiniteCouple<f64> {
        FiniteCouple::new(
            WeightedNorm::uniform(1.0, dim).unwrap(),
            WeightedNorm::uniform(f64::INFINITY, dim).unwrap(),
        )
        .unwrap()
    }

    fn random_couple(seed: u64, dim: usize) -> FiniteCouple<f64> {
        let mut r = rng::stream(seed, &[0xC0]);
        let ps = [1.0, 1.5, 2.0, 3.0, f64::INFINITY];
        let pick = |r: &mut rand_chacha::ChaCha8Rng| ps[(rng::unit_f64(r) * 5.0) as usize % 5];
        let p0 = pick(&mut r);
        let p1 = pick(&mut r);
        let w = |r: &mut rand_chacha::ChaCha8Rng| {
            (0..dim).map(|_| rng::log_uniform(r, 0.25, 4.0)).collect::<Vec<f64>>()
        };
        FiniteCouple::new(
            WeightedNorm::new(p0, w(&mut r)).unwrap(),
            WeightedNorm::new(p1, w(&mut r)).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn weighted_norm_eval() {
        let n = WeightedNorm::new(2.0f64, vec![1.0, 4.0]).unwrap();
        assert!((n.eval(&[3.0, 2.0]) - 5.0).abs() < 1e-12);
        let m = WeightedNorm::new(f64::INFINITY, vec![1.0f64, 2.0]).unwrap();
        assert_eq!(m.eval(&[3.0, -2.0]), 4.0);
    }

    #[test]
    fn weighted_norm_validation() {
        assert!(WeightedNorm::new(0.5, vec![1.0]).is_err());
        assert!(WeightedNorm::new(2.0, vec![]).is_err());
        assert!(WeightedNorm::new(2.0, vec![0.0]).is_err());
        assert!(WeightedNorm::new(2.0, vec![-1.0]).is_err());
    }

    #[test]
    fn j_functional_examples() {
        let c = l1_linf(3);
        assert_eq!(c.j(2.0, &[1.0, 1.0, 1.0]).unwrap(), 3.0);
        assert_eq!(c.j(5.0, &[0.0, 0.0, 0.0]).unwrap(), 0.0);
        let x = [0.3, -1.2, 0.7];
        let j1 = c.j(1.7, &x).unwrap();
        let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        assert_eq!(c.j(1.7, &x2).unwrap(), 2.0 * j1);
        assert!(c.j(2.0, &[1.0]).is_err());
        assert!(c.j(-1.0, &[1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn k_l1_linf_rearrangement() {
        let c = l1_linf(3);
        let opts = KOptions::default();
        let x = [3.0, 2.0, 1.0];
        let k = c.k(2.0, &x, &opts).unwrap();
        assert!((k - 5.0).abs() < 1e-9);
        for t in [0.25f64, 0.9, 1.0, 1.5, 2.7, 3.0, 10.0] {
            let k = c.k(t, &x, &opts).unwrap();
            let f = oracle::k_l1_linf_unit(t, &x);
            assert!((k - f).abs() <= 1e-9 * f.max(1.0), "t={t}: {k} vs {f}");
        }
    }

    #[test]
    fn k_degenerate_couple() {
        let n = WeightedNorm::new(2.0, vec![1.0, 3.0, 0.5]).unwrap();
        let c = FiniteCouple::new(n.clone(), n.clone()).unwrap();
        let opts = KOptions::default();
        let x = [1.0, -2.0, 0.5];
        for t in [0.3f64, 1.0, 4.0] {
            let k = c.k(t, &x, &opts).unwrap();
            let expect = t.min(1.0) * n.eval(&x);
            assert!((k - expect).abs() < 1e-7 * expect);
        }
    }

    #[test]
    fn k_large_t_saturates_at_norm0() {
        let c = random_couple(7, 4);
        let opts = KOptions::default();
        let mut r = rng::stream(7, &[1]);
        let x = rng::sample_vector::<f64>(&mut r, 4);
        let n0 = c.norm0().eval(&x);
        let k = c.k(1e9, &x, &opts).unwrap();
        assert!(k <= n0 * (1.0 + 1e-9));
        assert!((k - n0).abs() < 1e-6 * n0);
    }

    #[test]
    fn k_zero_vector() {
        let c = random_couple(3, 5);
        assert_eq!(c.k(1.0, &[0.0; 5], &KOptions::default()).unwrap(), 0.0);
    }

    #[test]
    fn k_matches_brute_force_small_dims() {
        let opts = KOptions {
            tol: 1e-10,
            max_sweeps: 20_000,
        };
        for seed in 0..24u64 {
            let dim = 1 + (seed % 5) as usize;
            let c = random_couple(seed, dim);
            let mut r = rng::stream(seed, &[2]);
            let x = rng::sample_vector::<f64>(&mut r, dim);
            let t = rng::log_uniform(&mut r, 1.0 / 64.0, 64.0);
            let k = c.k(t, &x, &opts).unwrap();
            let bf = oracle::k_brute_force(&c, t, &x, 5, 70);
            let scale = k.max(bf).max(1e-12);
            assert!(
                (k - bf).abs() / scale < 1e-6,
                "seed {seed} dim {dim}: solver {k} vs oracle {bf}"
            );
        }
    }

    #[test]
    fn lattice_restriction_matches_unrestricted_search() {
        let opts = KOptions::default();
        for seed in 0..8u64 {
            let dim = 1 + (seed % 3) as usize;
            let c = random_couple(seed * 31 + 5, dim);
            let mut r = rng::stream(seed, &[3]);
            let x = rng::sample_vector::<f64>(&mut r, dim);
            let t = rng::log_uniform(&mut r, 0.1, 10.0);
            let k = c.k(t, &x, &opts).unwrap();
            let free = oracle::k_brute_force_unrestricted(&c, t, &x, 7, 60);
            assert!(
                k <= free * (1.0 + 1e-5) && free <= k * (1.0 + 1e-5),
                "seed {seed}: restricted {k} vs unrestricted {free}"
            );
        }
    }

    #[test]
    fn k_concave_monotone_in_t() {
        let opts = KOptions::default();
        for seed in 0..12u64 {
            let dim = 2 + (seed % 4) as usize;
            let c = random_couple(seed + 100, dim);
            let mut r = rng::stream(seed, &[4]);
            let x = rng::sample_vector::<f64>(&mut r, dim);
            let ts: Vec<f64> = (-4..=4).map(|k| (k as f64).exp2()).collect();
            let ks: Vec<f64> = ts.iter().map(|&t| c.k(t, &x, &opts).unwrap()).collect();
            for w in ks.windows(2) {
                assert!(w[1] >= w[0] * (1.0 - 1e-7), "K must be nondecreasing in t");
            }
            // Concavity on the dyadic grid: K(mid) >= chord.
            for i in 0..ts.len() - 2 {
                let (t0, t2) = (ts[i], ts[i + 2]);
                let tm = ts[i + 1];
                let lam = (t2 - tm) / (t2 - t0);
                let chord = lam * ks[i] + (1.0 - lam) * ks[i + 2];
                assert!(ks[i + 1] >= chord * (1.0 - 1e-6));
            }
        }
    }

    #[test]
    fn k_bounded_by_min_and_j() {
        let opts = KOptions::default();
        for seed in 0..12u64 {
            let dim = 2 + (seed % 3) as usize;
            let c = random_couple(seed + 50, dim);
            let mut r = rng::stream(seed, &[5]);
            let x = rng::sample_vector::<f64>(&mut r, dim);
            for t in [0.2f64, 1.0, 5.0] {
                let k = c.k(t, &x, &opts).unwrap();
                let n0 = c.norm0().eval(&x);
                let n1 = c.norm1().eval(&x);
                assert!(k <= n0.min(t * n1) * (1.0 + 1e-9));
                assert!(k <= c.j(t, &x).unwrap() * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn k_triangle_and_homogeneity() {
        let opts = KOptions::default();
        for seed in 0..10u64 {
            let dim = 3;
            let c = random_couple(seed + 900, dim);
            let mut r = rng::stream(seed, &[6]);
            let x = rng::sample_vector::<f64>(&mut r, dim);
            let y = rng::sample_vector::<f64>(&mut r, dim);
            let t = 1.7;
            let kx = c.k(t, &x, &opts).unwrap();
            let ky = c.k(t, &y, &opts).unwrap();
            let xy: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            let kxy = c.k(t, &xy, &opts).unwrap();
            assert!(kxy <= (kx + ky) * (1.0 + 1e-6));
            let x4: Vec<f64> = x.iter().map(|v| 4.0 * v).collect();
            let k4 = c.k(t, &x4, &opts).unwrap();
            assert!((k4 - 4.0 * kx).abs() <= 1e-9 * k4.max(1e-12));
        }
    }

    #[test]
    fn sum_and_intersection_norms() {
        let opts = KOptions::default();
        let n = WeightedNorm::new(2.0f64, vec![1.0, 2.0]).unwrap();
        let c = FiniteCouple::new(n.clone(), n.clone()).unwrap();
        let x = [1.0, -1.0];
        assert!((c.sum_norm(&x, &opts).unwrap() - n.eval(&x)).abs() < 1e-8);
        assert_eq!(c.intersection_norm(&x).unwrap(), n.eval(&x));
        assert_eq!(c.sum_norm(&[0.0, 0.0], &opts).unwrap(), 0.0);

        // l1/linf split of a basis vector, against the brute-force oracle.
        let c = l1_linf(2);
        let x = [1.0, 0.0];
        let got = c.sum_norm(&x, &opts).unwrap();
        let bf = oracle::k_brute_force(&c, 1.0, &x, 5, 60);
        assert!((got - bf).abs() < 1e-8);
    }

    #[test]
    fn split_is_feasible_and_consistent() {
        let opts = KOptions::default();
        for seed in [11u64, 12, 13] {
            let c = random_couple(seed, 4);
            let mut r = rng::stream(seed, &[7]);
            let x = rng::sample_vector::<f64>(&mut r, 4);
            let (k, s) = c.k_with_split(1.3, &x, &opts).unwrap();
            for i in 0..4 {
                assert!(s[i] >= -1e-15 && s[i] <= x[i].abs() * (1.0 + 1e-12));
            }
            let x0: Vec<f64> = x.iter().zip(&s).map(|(&xi, &si)| xi.signum() * si).collect();
            let x1: Vec<f64> = x.iter().zip(&x0).map(|(&xi, &zi)| xi - zi).collect();
            let cost = c.norm0().eval(&x0) + 1.3 * c.norm1().eval(&x1);
            assert!((cost - k).abs() <= 1e-8 * cost.max(1e-12));
        }
    }

    #[test]
    fn works_in_f32() {
        let n0 = WeightedNorm::<f32>::uniform(1.0, 3).unwrap();
        let n1 = WeightedNorm::<f32>::uniform(f32::INFINITY, 3).unwrap();
        let c = FiniteCouple::new(n0, n1).unwrap();
        let k = c.k(2.0, &[3.0, 2.0, 1.0], &KOptions::default()).unwrap();
        assert!((k - 5.0).abs() < 1e-4);
    }
}

