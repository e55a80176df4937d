//! Property tests over the closed-form layers.

use hypermult_core::bounds::{thm1_multiplicity_bound, thm2_multiplicity_bound};
use hypermult_core::collar::{ball_area, collar_width, eps_delta, injectivity_in_collar};
use hypermult_core::heat::kernel_curv_minus1;
use hypermult_core::modes::cosh_ratio;
use hypermult_core::nets::sample_hyperbolic_ball;
use hypermult_core::MASS_RATIO_CEILING;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn collar_width_decreases(a in 1e-6f64..20.0, b in 1e-6f64..20.0) {
        prop_assume!(a < b);
        prop_assert!(collar_width(a).unwrap() > collar_width(b).unwrap());
    }

    #[test]
    fn injectivity_grows_into_the_collar(l in 1e-3f64..2.0, s1 in 0.0f64..1.0, s2 in 0.0f64..1.0) {
        let w = collar_width(l).unwrap();
        let (d1, d2) = (w * s1.min(s2), w * s1.max(s2));
        // the injectivity radius shrinks towards the core geodesic
        prop_assert!(injectivity_in_collar(l, d1).unwrap() >= injectivity_in_collar(l, d2).unwrap());
    }

    #[test]
    fn eps_delta_increases(a in 0.01f64..0.49, b in 0.01f64..0.49) {
        prop_assume!(a < b);
        prop_assert!(eps_delta(a).unwrap() < eps_delta(b).unwrap());
    }

    #[test]
    fn ball_area_is_below_the_euclidean_limit_scaled(eps in 0.01f64..1.0, r in 0.0f64..20.0) {
        let a = ball_area(eps, r).unwrap();
        // hyperbolic balls are larger than Euclidean ones
        prop_assert!(a >= std::f64::consts::PI * r * r * (1.0 - 1e-12));
    }

    #[test]
    fn delta_ratio_below_ceiling(delta in 0.01f64..1.0, extra in 0.0f64..200.0) {
        let w = 1.0 / delta + 2.0 + extra;
        let r = cosh_ratio(w, 1.0 / delta, delta).unwrap();
        prop_assert!((0.0..=MASS_RATIO_CEILING).contains(&r));
    }

    #[test]
    fn kernel_decreases_in_distance(t in 1e-3f64..1e3, r1 in 0.0f64..100.0, r2 in 0.0f64..100.0) {
        prop_assume!(r1 + 1e-6 < r2);
        let (a, b) = (kernel_curv_minus1(t, r1).unwrap(), kernel_curv_minus1(t, r2).unwrap());
        prop_assert!(b <= a);
    }

    #[test]
    fn thm1_monotone(g in 1_000u64..10_000_000, n1 in 0u64..1000, n2 in 0u64..1000,
                     e1 in 0.01f64..0.99, e2 in 0.01f64..0.99) {
        prop_assume!(n1 < n2 && e1 < e2);
        let at = |n, e| thm1_multiplicity_bound(g, e, n, 1.0).unwrap();
        prop_assert!(at(n1, e1) < at(n2, e1));
        prop_assert!(at(n1, e1) > at(n1, e2));
    }

    #[test]
    fn thm2_monotone(l1 in 1e-6f64..0.0475, l2 in 1e-6f64..0.0475, i1 in 1u64..50, i2 in 1u64..50) {
        prop_assume!(l1 < l2 && i1 < i2);
        let at = |l, i| thm2_multiplicity_bound(l, 10_000, 1e-3, i, 0.45, 1.0).unwrap();
        prop_assert!(at(l1, i1) < at(l2, i1));
        prop_assert!(at(l1, i1) < at(l1, i2));
    }
}

#[test]
fn sampled_distances_are_a_metric() {
    use rand::{Rng, SeedableRng};
    let cloud = sample_hyperbolic_ball(1.0, 10.0, 500, 11).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
    for _ in 0..1000 {
        let (i, j, k) = (rng.gen_range(0..500), rng.gen_range(0..500), rng.gen_range(0..500));
        let (dij, djk, dik) = (cloud.distance_at(i, j), cloud.distance_at(j, k), cloud.distance_at(i, k));
        assert_eq!(cloud.distance_at(i, i), 0.0);
        assert!((dij - cloud.distance_at(j, i)).abs() <= 1e-9);
        assert!(dik <= dij + djk + 1e-9);
        assert!(dij >= 0.0);
    }
}
