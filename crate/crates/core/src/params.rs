//! Function parameters, their dilation functions, Boyd indices, and class
//! membership.
//!
//! A function parameter is a positive continuous function on the positive
//! reals, normalized so that its value at one equals one. Its dilation
//! function is the supremum over `t` of `rho(s*t)/rho(t)`; class membership
//! is decided from a quadrature of `min(1, 1/t) * dil(t) * dt/t` over a
//! bounded geometric window plus certified geometric tail bounds derived from
//! submultiplicativity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Geometric evaluation grid: `per_octave` points per octave covering
/// `[2^-octaves, 2^octaves]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub octaves: i32,
    pub per_octave: u32,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            octaves: 40,
            per_octave: 32,
        }
    }
}

impl GridSpec {
    /// Index of t = 1.
    pub fn center(&self) -> usize {
        self.octaves as usize * self.per_octave as usize
    }

    /// Number of grid points (always odd; t = 1 sits in the middle).
    pub fn len(&self) -> usize {
        2 * self.center() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The i-th grid point, `2^((i - center)/per_octave)`.
    pub fn point<R: Real>(&self, i: usize) -> R {
        let e = (i as f64 - self.center() as f64) / self.per_octave as f64;
        R::of(e.exp2())
    }

    /// Grid index for `2^k` (k integer, |k| <= octaves).
    pub fn dyadic_index(&self, k: i32) -> usize {
        ((self.octaves + k) * self.per_octave as i32) as usize
    }
}

/// The parameter families the artifact evaluates.
#[derive(Clone, Debug, PartialEq)]
pub enum ParamFamily<R: Real> {
    /// `t^theta`
    Power { theta: R },
    /// `t^theta * (1 + |ln t|)^a`
    PowerLog { theta: R, a: R },
    /// `t^theta_minus` for t <= 1, `t^theta_plus` for t >= 1
    PiecewisePower { theta_minus: R, theta_plus: R },
    /// Log-log linear interpolation through `(t, rho(t))` points; the end
    /// segments extend beyond the table range.
    Table { points: Vec<(R, R)> },
}

impl<R: Real> ParamFamily<R> {
    fn validate(&self) -> Result<()> {
        let fin = |v: R, what: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::domain(format!("{what} must be finite")))
            }
        };
        match self {
            ParamFamily::Power { theta } => fin(*theta, "theta"),
            ParamFamily::PowerLog { theta, a } => {
                fin(*theta, "theta")?;
                fin(*a, "a")
            }
            ParamFamily::PiecewisePower {
                theta_minus,
                theta_plus,
            } => {
                fin(*theta_minus, "theta_minus")?;
                fin(*theta_plus, "theta_plus")
            }
            ParamFamily::Table { points } => {
                if points.len() < 2 {
                    return Err(Error::domain("table needs at least two points"));
                }
                for w in points.windows(2) {
                    if w[1].0 <= w[0].0 {
                        return Err(Error::domain("table abscissae must be increasing"));
                    }
                }
                for &(t, v) in points {
                    if !(t > R::zero() && v > R::zero() && t.is_finite() && v.is_finite()) {
                        return Err(Error::domain("table entries must be positive and finite"));
                    }
                }
                Ok(())
            }
        }
    }

    fn raw_eval(&self, t: R) -> R {
        match self {
            ParamFamily::Power { theta } => t.powf(*theta),
            ParamFamily::PowerLog { theta, a } => {
                t.powf(*theta) * (R::one() + t.ln().abs()).powf(*a)
            }
            ParamFamily::PiecewisePower {
                theta_minus,
                theta_plus,
            } => {
                if t < R::one() {
                    t.powf(*theta_minus)
                } else {
                    t.powf(*theta_plus)
                }
            }
            ParamFamily::Table { points } => {
                let x = t.ln();
                // Bracketing segment; end segments extrapolate.
                let n = points.len();
                let mut hi = 1;
                while hi + 1 < n && points[hi].0.ln() < x {
                    hi += 1;
                }
                let (t0, v0) = points[hi - 1];
                let (t1, v1) = points[hi];
                let (x0, x1) = (t0.ln(), t1.ln());
                let (y0, y1) = (v0.ln(), v1.ln());
                let y = y0 + (y1 - y0) * (x - x0) / (x1 - x0);
                y.exp()
            }
        }
    }
}

/// A normalized function parameter: `eval(1) = 1` by construction.
#[derive(Clone, Debug)]
pub struct FunctionParameter<R: Real> {
    family: ParamFamily<R>,
    grid: GridSpec,
    scale: R,
}

impl<R: Real> FunctionParameter<R> {
    pub fn new(family: ParamFamily<R>, grid: GridSpec) -> Result<Self> {
        family.validate()?;
        let at_one = family.raw_eval(R::one());
        if !(at_one > R::zero() && at_one.is_finite()) {
            return Err(Error::domain("rho(1) must be positive and finite"));
        }
        let p = FunctionParameter {
            family,
            grid,
            scale: at_one.recip(),
        };
        // Positivity on the grid.
        for i in 0..grid.len() {
            let v = p.eval(grid.point(i))?;
            if !(v > R::zero() && v.is_finite()) {
                return Err(Error::domain("rho must be positive and finite on the grid"));
            }
        }
        Ok(p)
    }

    pub fn power(theta: R) -> Result<Self> {
        Self::new(ParamFamily::Power { theta }, GridSpec::default())
    }

    pub fn power_log(theta: R, a: R) -> Result<Self> {
        Self::new(ParamFamily::PowerLog { theta, a }, GridSpec::default())
    }

    pub fn piecewise(theta_minus: R, theta_plus: R) -> Result<Self> {
        Self::new(
            ParamFamily::PiecewisePower {
                theta_minus,
                theta_plus,
            },
            GridSpec::default(),
        )
    }

    pub fn table(points: Vec<(R, R)>) -> Result<Self> {
        Self::new(ParamFamily::Table { points }, GridSpec::default())
    }

    pub fn family(&self) -> &ParamFamily<R> {
        &self.family
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn is_tabulated(&self) -> bool {
        matches!(self.family, ParamFamily::Table { .. })
    }

    /// Evaluates `rho(t)` for `t > 0`.
    pub fn eval(&self, t: R) -> Result<R> {
        if !(t > R::zero()) || !t.is_finite() {
            return Err(Error::domain(format!("rho is defined for t > 0, got {t}")));
        }
        Ok(self.family.raw_eval(t) * self.scale)
    }

    /// Single-point dilation value `sup_t rho(s*t)/rho(t)` over the grid,
    /// with a flag set when the supremum sits on the grid boundary and is
    /// still rising there. The power family uses its closed form `s^theta`.
    pub fn dilation_at(&self, s: R) -> Result<(R, bool)> {
        if !(s > R::zero()) || !s.is_finite() {
            return Err(Error::domain(format!("dilation is defined for s > 0, got {s}")));
        }
        if let ParamFamily::Power { theta } = self.family {
            return Ok((s.powf(theta), false));
        }
        let n = self.grid.len();
        let mut best = R::neg_infinity();
        let mut arg = 0usize;
        let mut ratios_ends = (R::zero(), R::zero(), R::zero(), R::zero());
        for i in 0..n {
            let t = self.grid.point::<R>(i);
            let r = self.eval(s * t)?.ln() - self.eval(t)?.ln();
            if r > best {
                best = r;
                arg = i;
            }
            if i == 0 {
                ratios_ends.0 = r;
            } else if i == 1 {
                ratios_ends.1 = r;
            }
            if i == n - 2 {
                ratios_ends.2 = r;
            } else if i == n - 1 {
                ratios_ends.3 = r;
            }
        }
        let boundary = (arg == 0 && ratios_ends.0 > ratios_ends.1)
            || (arg == n - 1 && ratios_ends.3 > ratios_ends.2);
        Ok((best.exp(), boundary))
    }

    /// `f(t) = 1/rho(1/t)`, the reflection that reconciles the two dyadic
    /// weight conventions. Exact per family.
    pub fn reciprocal_reflect(&self) -> Result<Self> {
        let family = match &self.family {
            ParamFamily::Power { theta } => ParamFamily::Power { theta: *theta },
            ParamFamily::PowerLog { theta, a } => ParamFamily::PowerLog {
                theta: *theta,
                a: -*a,
            },
            ParamFamily::PiecewisePower {
                theta_minus,
                theta_plus,
            } => ParamFamily::PiecewisePower {
                theta_minus: *theta_plus,
                theta_plus: *theta_minus,
            },
            ParamFamily::Table { points } => {
                let pts = points
                    .iter()
                    .rev()
                    .map(|&(t, v)| (t.recip(), v.recip()))
                    .collect();
                ParamFamily::Table { points: pts }
            }
        };
        Self::new(family, self.grid)
    }
}

/// Boyd indices of a dilation function, computed literally as grid suprema of
/// `log dil(t) / log t` over `t > 1` (alpha) and `0 < t < 1` (beta).
///
/// Note: the literal supremum formula is what this crate implements; for the
/// constant parameter it yields zero, not a negative value, so consistency
/// with integral characterizations is asserted per implemented family rather
/// than as a universal theorem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoydIndices<R> {
    pub alpha: R,
    pub beta: R,
}

/// Dilation function with precomputed grid values.
#[derive(Clone, Debug)]
pub struct DilationFunction<R: Real> {
    param: FunctionParameter<R>,
    values: Vec<R>,
    boundary_flag: bool,
    exact: bool,
}

impl<R: Real> DilationFunction<R> {
    /// Computes the dilation on the parameter grid. Non-power families use
    /// the grid supremum over shifted log-rho tables; the power family fills
    /// in its closed form.
    pub fn compute(param: &FunctionParameter<R>) -> Result<Self> {
        let grid = param.grid();
        let n = grid.len();
        let center = grid.center();
        if let ParamFamily::Power { theta } = *param.family() {
            let values = (0..n)
                .map(|i| grid.point::<R>(i).powf(theta))
                .collect::<Vec<_>>();
            return Ok(DilationFunction {
                param: param.clone(),
                values,
                boundary_flag: false,
                exact: true,
            });
        }
        // log-rho on the doubled grid; s*t for grid s,t lands on it exactly.
        let ext = 4 * center + 1;
        let mut logs_ext = Vec::with_capacity(ext);
        for j in 0..ext {
            let e = (j as f64 - (2 * center) as f64) / grid.per_octave as f64;
            logs_ext.push(param.eval(R::of(e.exp2()))?.ln());
        }
        let logs: Vec<R> = (0..n).map(|i| logs_ext[i + center]).collect();
        let mut values = Vec::with_capacity(n);
        let mut boundary = false;
        for i in 0..n {
            let mut best = R::neg_infinity();
            let mut arg = 0usize;
            for j in 0..n {
                let r = logs_ext[i + j] - logs[j];
                if r > best {
                    best = r;
                    arg = j;
                }
            }
            if n >= 2
                && ((arg == 0 && logs_ext[i] - logs[0] > logs_ext[i + 1] - logs[1])
                    || (arg == n - 1
                        && logs_ext[i + n - 1] - logs[n - 1] > logs_ext[i + n - 2] - logs[n - 2]))
            {
                boundary = true;
            }
            values.push(best.exp());
        }
        Ok(DilationFunction {
            param: param.clone(),
            values,
            boundary_flag: boundary,
            exact: false,
        })
    }

    pub fn param(&self) -> &FunctionParameter<R> {
        &self.param
    }

    pub fn grid_values(&self) -> &[R] {
        &self.values
    }

    /// True when the grid supremum ran into the window edge somewhere.
    pub fn boundary_flag(&self) -> bool {
        self.boundary_flag
    }

    /// True when the values come from a closed form.
    pub fn exact(&self) -> bool {
        self.exact
    }

    /// Dilation at an arbitrary `s > 0`.
    pub fn eval(&self, s: R) -> Result<R> {
        Ok(self.param.dilation_at(s)?.0)
    }

    /// Value at the dyadic grid point `2^k`.
    pub fn at_dyadic(&self, k: i32) -> R {
        self.values[self.param.grid().dyadic_index(k)]
    }

    /// Boyd indices from the grid values, literal supremum form.
    pub fn boyd(&self) -> BoydIndices<R> {
        let grid = self.param.grid();
        let c = grid.center();
        let n = grid.len();
        let mut alpha = R::neg_infinity();
        for i in c + 1..n {
            let t = grid.point::<R>(i);
            alpha = alpha.max(self.values[i].ln() / t.ln());
        }
        let mut beta = R::neg_infinity();
        for i in 0..c {
            let t = grid.point::<R>(i);
            beta = beta.max(self.values[i].ln() / t.ln());
        }
        BoydIndices { alpha, beta }
    }
}

/// Outcome of class-membership checks for a function parameter.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassReport<R> {
    pub in_b: bool,
    pub in_bpm: bool,
    pub in_ppm: bool,
    /// Set when the tails cannot be certified (tabulated parameters); the
    /// in_* flags then only reflect the truncated window.
    pub indeterminate: bool,
    /// Certified value of the class integral (window quadrature plus tail
    /// bounds) when finite.
    pub integral_value: Option<R>,
    pub integral_tail: Option<R>,
    /// `max(dil(2^k)/2^k, dil(2^-k))` for k = 0..octaves; the little-o
    /// witness sequence.
    pub little_o_margin: Vec<R>,
    pub boyd: BoydIndices<R>,
    /// Sign of alpha agrees with certified finiteness of the upper integral.
    pub upper_index_consistent: bool,
    /// Sign of beta agrees with certified finiteness of the lower integral.
    pub lower_index_consistent: bool,
    pub boundary_warning: bool,
}

/// Classifies a parameter from its dilation function.
///
/// The class integral is evaluated by trapezoid quadrature in log scale over
/// the grid window; outside the window each octave-block is bounded through
/// submultiplicativity, `dil(2^W * s) <= dil(2^W)^k * dil(s)`, which turns the
/// tail into a geometric series whenever `dil(2^W)/2^W < 1` (upper side) and
/// `dil(2^-W) < 1` (lower side).
pub fn classify<R: Real>(dil: &DilationFunction<R>, quad_tol: R) -> ClassReport<R> {
    let grid = dil.param().grid();
    let c = grid.center();
    let n = grid.len();
    let du = R::of(std::f64::consts::LN_2) / R::of(grid.per_octave as f64);
    let values = dil.grid_values();

    // Window quadrature of min(1, 1/t) dil(t) dt/t, split at t = 1.
    let integrand = |i: usize| {
        let t = grid.point::<R>(i);
        if t <= R::one() {
            values[i]
        } else {
            values[i] / t
        }
    };
    let trapz = |lo: usize, hi: usize| {
        let mut acc = R::zero();
        for i in lo..hi {
            acc += (integrand(i) + integrand(i + 1)) * R::of(0.5) * du;
        }
        acc
    };
    let i_low = trapz(0, c); // t in [2^-W, 1]
    let i_up = trapz(c, n - 1); // t in [1, 2^W]

    let w = grid.octaves;
    let dil_up = dil.at_dyadic(w);
    let dil_low = dil.at_dyadic(-w);
    let g = dil_up / grid.point::<R>(n - 1); // dil(2^W)/2^W
    let h = dil_low; // dil(2^-W)
    let tails_ok = g < R::one() && h < R::one();
    let tail = if tails_ok {
        i_up * g / (R::one() - g) + i_low * h / (R::one() - h)
    } else {
        R::infinity()
    };

    let in_b = values.iter().all(|v| v.is_finite());
    let indeterminate = dil.param().is_tabulated();
    let in_bpm = in_b && tails_ok && (i_low + i_up + tail).is_finite();

    // little-o margins at dyadic extremes.
    let mut margins = Vec::with_capacity(w as usize + 1);
    for k in 0..=w {
        let up = dil.at_dyadic(k) / grid.point::<R>(grid.dyadic_index(k));
        let low = dil.at_dyadic(-k);
        margins.push(up.max(low));
    }
    let slack = R::of(1e-9);
    let nonincreasing = margins.windows(2).all(|p| p[1] <= p[0] * (R::one() + slack));
    let in_ppm = nonincreasing && *margins.last().unwrap() <= R::of(0.5);

    let boyd = dil.boyd();
    // Cross-validation of the index/integral characterizations: the upper
    // integral uses weight dt/t (not dt/t^2), so its geometric block ratio is
    // dil(2^W) itself.
    let upper_finite = dil_up < R::one();
    let lower_finite = h < R::one();
    let upper_index_consistent = (boyd.alpha < R::zero()) == upper_finite;
    let lower_index_consistent = (boyd.beta > R::zero()) == lower_finite;

    let integral_value = if in_bpm && !indeterminate {
        Some(i_low + i_up + tail)
    } else {
        None
    };
    let integral_tail = if in_bpm && !indeterminate {
        Some(tail)
    } else {
        None
    };
    let _ = quad_tol;

    ClassReport {
        in_b,
        in_bpm: in_bpm && !indeterminate,
        in_ppm,
        indeterminate,
        integral_value,
        integral_tail,
        little_o_margin: margins,
        boyd,
        upper_index_consistent,
        lower_index_consistent,
        boundary_warning: dil.boundary_flag(),
    }
}

/// `gamma(t) = 1/dil(1/t)`, normalized; requires the source parameter to be
/// certified in the plus-minus class and returns a parameter that is again in
/// it. Exact per analytic family; tabulated parameters cannot be certified
/// and are rejected.
pub fn gamma_from_rho<R: Real>(p: &FunctionParameter<R>) -> Result<FunctionParameter<R>> {
    let dil = DilationFunction::compute(p)?;
    let report = classify(&dil, R::of(1e-9));
    if !report.in_bpm {
        return Err(Error::precondition(
            "gamma_from_rho requires a parameter certified in the plus-minus class",
        ));
    }
    let family = match p.family() {
        ParamFamily::Power { theta } => ParamFamily::Power { theta: *theta },
        ParamFamily::PowerLog { theta, a } => ParamFamily::PowerLog {
            theta: *theta,
            a: -*a,
        },
        ParamFamily::PiecewisePower {
            theta_minus,
            theta_plus,
        } => ParamFamily::PiecewisePower {
            theta_minus: theta_minus.max(*theta_plus),
            theta_plus: theta_minus.min(*theta_plus),
        },
        ParamFamily::Table { .. } => unreachable!("tabulated parameters are never certified"),
    };
    let gamma = FunctionParameter::new(family, p.grid())?;
    let gdil = DilationFunction::compute(&gamma)?;
    let greport = classify(&gdil, R::of(1e-9));
    if !greport.in_bpm {
        return Err(Error::precondition(
            "derived gamma parameter failed plus-minus certification",
        ));
    }
    Ok(gamma)
}
