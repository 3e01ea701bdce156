use fracrd::oracle::ml_series_oracle;
use fracrd::solver::{green_delta, GreensQuery};
use fracrd::special::{gamma, ml, reciprocal_gamma};
use proptest::prelude::*;

proptest! {
    #[test]
    fn ml_at_zero_is_reciprocal_gamma(a in 0.01f64..=2.0, b in 0.01f64..=3.0) {
        prop_assert!((ml(a, b, 0.0).unwrap() - reciprocal_gamma(b)).abs() <= 1e-15);
    }

    #[test]
    fn ml_recurrence(a in 0.05f64..=2.0, frac in 0.0f64..1.0, z in -60.0f64..=0.0) {
        let b = 0.05 + frac * (3.0 - a - 0.05);
        let lhs = ml(a, b, z).unwrap();
        let rhs = z * ml(a, a + b, z).unwrap() + reciprocal_gamma(b);
        prop_assert!((lhs - rhs).abs() <= 1e-9, "alpha={} beta={} z={}: {} vs {}", a, b, z, lhs, rhs);
    }

    #[test]
    fn ml_completely_monotone(a in 0.05f64..=1.0, frac in 0.0f64..=1.0) {
        let b = a + frac * (3.0 - a);
        let mut last = f64::INFINITY;
        for i in 0..=200 {
            let x = 0.25 * i as f64;
            let v = ml(a, b, -x).unwrap();
            prop_assert!(v > 0.0, "alpha={} beta={} x={}", a, b, x);
            prop_assert!(v <= last + 1e-13, "alpha={} beta={} x={}", a, b, x);
            last = v;
        }
    }

    #[test]
    fn ml_matches_series_oracle(a in 0.3f64..=2.0, b in 0.3f64..=3.0, z in -30.0f64..=0.0) {
        if let Ok(o) = ml_series_oracle(a, b, z, 1e-12) {
            if o.error <= 1e-10 {
                let v = ml(a, b, z).unwrap();
                prop_assert!((v - o.value).abs() <= 1e-9 + o.error, "{} vs {}", v, o.value);
            }
        }
    }

    #[test]
    fn gamma_recurrence(x in 0.01f64..=169.0) {
        let lhs = gamma(x + 1.0).unwrap();
        let rhs = x * gamma(x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-13 * lhs.abs());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kernel_is_even_and_self_similar(
        a in 0.6f64..=2.0,
        b in 0.3f64..=1.0,
        x in 0.01f64..8.0,
        t in 0.3f64..3.0,
        c in 0.5f64..2.0,
    ) {
        let q = GreensQuery::new(a, b, 1.0, x, t).unwrap();
        let n = green_delta(&q).unwrap();
        let m = green_delta(&GreensQuery { x: -x, ..q }).unwrap();
        prop_assert_eq!(n.value, m.value);
        // (x, t) → (c^{β/α} x, c t) keeps the similarity variable
        let x2 = c.powf(b / a) * x;
        let n2 = green_delta(&GreensQuery::new(a, b, 1.0, x2, c * t).unwrap()).unwrap();
        let f1 = x * n.value / t.powf(b - 1.0);
        let f2 = x2 * n2.value / (c * t).powf(b - 1.0);
        prop_assert!((f1 - f2).abs() <= 1e-9 * f1.abs() + 1e-14, "{} vs {}", f1, f2);
    }
}
