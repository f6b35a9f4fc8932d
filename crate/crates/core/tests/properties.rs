//! Property-based invariants for the norm, functional, and sequence
//! machinery.

use proptest::prelude::*;

use rho_interp_core::couples::{FiniteCouple, KOptions, WeightedNorm};
use rho_interp_core::params::{DilationFunction, FunctionParameter, GridSpec, ParamFamily};
use rho_interp_core::seqspaces::{cutting, sigma, VectorSequence};

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![
        Just(1.0),
        Just(1.5),
        Just(2.0),
        Just(3.0),
        Just(f64::INFINITY)
    ]
}

fn weights(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(0.25f64..4.0, dim)
}

fn vector(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-2.0f64..2.0, dim)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weighted_norm_axioms(
        p in exponent(),
        w in weights(4),
        x in vector(4),
        y in vector(4),
        lambda in -3.0f64..3.0,
    ) {
        let n = WeightedNorm::new(p, w).unwrap();
        let nx = n.eval(&x);
        let ny = n.eval(&y);
        prop_assert!(nx >= 0.0);
        let scaled: Vec<f64> = x.iter().map(|v| lambda * v).collect();
        prop_assert!((n.eval(&scaled) - lambda.abs() * nx).abs() <= 1e-12 * nx.max(1.0));
        let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        prop_assert!(n.eval(&sum) <= nx + ny + 1e-12 * (nx + ny).max(1.0));
    }

    #[test]
    fn k_functional_bounds_and_monotonicity(
        p0 in exponent(),
        p1 in exponent(),
        w0 in weights(3),
        w1 in weights(3),
        x in vector(3),
        t_exp in -3.0f64..3.0,
    ) {
        let c = FiniteCouple::new(
            WeightedNorm::new(p0, w0).unwrap(),
            WeightedNorm::new(p1, w1).unwrap(),
        )
        .unwrap();
        let opts = KOptions::default();
        let t = t_exp.exp2();
        let k = c.k(t, &x, &opts).unwrap();
        let n0 = c.norm0().eval(&x);
        let n1 = c.norm1().eval(&x);
        prop_assert!(k >= -1e-15);
        prop_assert!(k <= n0.min(t * n1) * (1.0 + 1e-9) + 1e-300);
        prop_assert!(k <= c.j(t, &x).unwrap() * (1.0 + 1e-9) + 1e-300);
        let k2 = c.k(2.0 * t, &x, &opts).unwrap();
        prop_assert!(k2 >= k * (1.0 - 1e-7));
        prop_assert!(k2 <= 2.0 * k * (1.0 + 1e-7) + 1e-300);
    }

    #[test]
    fn sigma_is_linear_and_cutting_partitions(
        flat_a in vector(10),
        flat_b in vector(10),
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
        n in 0i32..4,
    ) {
        let sa = VectorSequence::unflatten(2, 2, &flat_a).unwrap();
        let sb = VectorSequence::unflatten(2, 2, &flat_b).unwrap();
        let combo = sa.scaled(a).add(&sb.scaled(b)).unwrap();
        let lhs = sigma(&combo);
        let rhs: Vec<f64> = sigma(&sa)
            .iter()
            .zip(sigma(&sb))
            .map(|(&u, v)| a * u + b * v)
            .collect();
        for (l, r) in lhs.iter().zip(&rhs) {
            prop_assert!((l - r).abs() <= 1e-12);
        }
        let (mid, plus, minus) = cutting(&sa, n).unwrap();
        prop_assert_eq!(mid.add(&plus).unwrap().add(&minus).unwrap(), sa);
    }

    #[test]
    fn dilation_dominates_and_submultiplies(
        theta_minus in 0.1f64..0.9,
        theta_plus in 0.1f64..0.9,
        ks in -6i32..6,
        ku in -6i32..6,
    ) {
        let grid = GridSpec { octaves: 12, per_octave: 8 };
        let p = FunctionParameter::new(
            ParamFamily::PiecewisePower { theta_minus, theta_plus },
            grid,
        )
        .unwrap();
        let d = DilationFunction::compute(&p).unwrap();
        prop_assert_eq!(d.at_dyadic(0), 1.0);
        prop_assert!(d.at_dyadic(ks) >= p.eval((ks as f64).exp2()).unwrap() * (1.0 - 1e-12));
        if (ks + ku).unsigned_abs() <= 12 {
            let lhs = d.at_dyadic(ks + ku);
            let rhs = d.at_dyadic(ks) * d.at_dyadic(ku);
            prop_assert!(lhs <= rhs * (1.0 + 1e-9));
        }
    }
}
