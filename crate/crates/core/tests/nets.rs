//! Greedy nets on sampled clouds, checked by brute force.

use hypermult_core::collar::ball_area;
use hypermult_core::nets::{
    ball_mean_radius, greedy_separated_net, is_maximal, net_cardinality_bound,
    sample_hyperbolic_ball, verify_net,
};
use hypermult_core::quadrature::gauss_kronrod;

#[test]
fn mean_radius_matches_density() {
    let cloud = sample_hyperbolic_ball(1.0, 3.0, 100_000, 2024).unwrap();
    let empirical = (0..cloud.len()).map(|i| cloud.radius_at(i)).sum::<f64>() / cloud.len() as f64;
    let num = gauss_kronrod(|r: f64| r * r.sinh(), 0.0, 3.0, 1e-13, 0.0).unwrap().value;
    let den = gauss_kronrod(|r: f64| r.sinh(), 0.0, 3.0, 1e-13, 0.0).unwrap().value;
    let quadrature = num / den;
    assert!((quadrature - ball_mean_radius(1.0, 3.0)).abs() < 1e-12);
    assert!((empirical / quadrature - 1.0).abs() < 0.02, "{empirical} vs {quadrature}");
}

#[test]
fn greedy_nets_on_random_clouds() {
    for trial in 0..100u64 {
        let eps = [0.25, 0.5, 1.0][(trial % 3) as usize];
        let radius = 2.0 + (trial % 7) as f64;
        let cloud = sample_hyperbolic_ball(eps, radius, 300, trial).unwrap();
        let r = 0.5 + (trial % 5) as f64;
        let seed_index = (trial * 37) as usize;
        let net = greedy_separated_net(&cloud, r, seed_index).unwrap();
        assert!(net.is_separated && net.is_net, "trial {trial}");
        assert_eq!(verify_net(&cloud, &net.selected, r).unwrap(), (true, true));
        assert!(is_maximal(&cloud, &net).unwrap(), "trial {trial}");
        if r >= 4.0 {
            let bound = net_cardinality_bound(ball_area(eps, radius).unwrap(), r).unwrap();
            assert!(net.selected.len() as f64 <= bound.value);
        }
        let again = greedy_separated_net(&cloud, r, seed_index).unwrap();
        assert_eq!(
            serde_json::to_vec(&net).unwrap(),
            serde_json::to_vec(&again).unwrap()
        );
    }
}

#[test]
fn large_ball_instance() {
    let cloud = sample_hyperbolic_ball(1.0, 10.0, 10_000, 1).unwrap();
    let net = greedy_separated_net(&cloud, 4.0, 0).unwrap();
    let area = 2.0 * std::f64::consts::PI * (10f64.cosh() - 1.0);
    let bound = net_cardinality_bound(area, 4.0).unwrap();
    assert!(net.is_separated && net.is_net);
    assert!(net.selected.len() as f64 <= bound.value);
}
