//! Property tests for the exponential-polynomial algebra.

use dualrisk_core::{ExpoPolynomial, GainDistribution};
use proptest::prelude::*;

fn arb_exppoly() -> impl Strategy<Value = ExpoPolynomial> {
    // real rates bounded away from the gain-transform poles used below
    let term = (
        -2.0f64..2.0,
        0u32..3,
        prop_oneof![0.2f64..3.0, Just(0.0)],
    );
    prop::collection::vec(term, 1..5).prop_map(|ts| {
        let mut acc = ExpoPolynomial::zero();
        for (c, p, r) in ts {
            acc = acc.add(&ExpoPolynomial::term_real(c, p, r));
        }
        acc
    })
}

fn grid() -> Vec<f64> {
    (0..=16).map(|k| 0.25 * k as f64).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn addition_commutes_and_canonicalization_is_idempotent(
        f in arb_exppoly(),
        g in arb_exppoly(),
    ) {
        let fg = f.add(&g);
        let gf = g.add(&f);
        prop_assert!(fg.max_abs_diff_on(&gf, &grid()).unwrap() < 1e-12);
        // adding zero leaves the canonical form unchanged
        let same = fg.add(&ExpoPolynomial::zero());
        prop_assert_eq!(fg.terms(), same.terms());
    }

    #[test]
    fn derivative_undoes_tail_integral(f in arb_exppoly()) {
        // keep only integrable terms (positive rates)
        let pos = ExpoPolynomial::from_terms(
            f.terms().iter().copied().filter(|t| t.rate.re > 0.05).collect(),
        );
        prop_assume!(!pos.is_zero());
        let back = pos.antiderivative_tail().unwrap().differentiate().scale(-1.0);
        prop_assert!(pos.max_abs_diff_on(&back, &grid()).unwrap() < 1e-9 * (1.0 + pos.max_coeff()));
    }

    #[test]
    fn laplace_inversion_round_trip(f in arb_exppoly()) {
        prop_assume!(!f.is_zero());
        let back = f.laplace().invert().unwrap();
        let scale = 1.0 + f.max_coeff();
        prop_assert!(f.max_abs_diff_on(&back, &grid()).unwrap() < 1e-9 * scale);
    }

    #[test]
    fn tail_convolution_matches_quadrature(
        f in arb_exppoly(),
        u in 0.0f64..3.0,
    ) {
        let gains = GainDistribution::erlang(2, 1.0).unwrap();
        let conv = f.convolve_tail(&gains).unwrap();
        // Simpson oracle over [0, 60] (integrand decays at rate >= 1)
        let n = 6000;
        let h = 60.0 / n as f64;
        let mut acc = 0.0;
        for i in 0..=n {
            let x = i as f64 * h;
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += w * f.evaluate(u + x).unwrap() * gains.pdf(x);
        }
        acc *= h / 3.0;
        let got = conv.evaluate(u).unwrap();
        let scale = 1.0 + f.max_coeff() * (1.0 + u.powi(3));
        prop_assert!((got - acc).abs() < 1e-8 * scale, "{got} vs {acc}");
    }

    #[test]
    fn finite_convolution_is_symmetric(f in arb_exppoly(), g in arb_exppoly()) {
        let fg = f.convolve_finite(&g);
        let gf = g.convolve_finite(&f);
        let scale = 1.0 + f.max_coeff() * g.max_coeff();
        prop_assert!(fg.max_abs_diff_on(&gf, &grid()).unwrap() < 1e-9 * scale);
    }
}
