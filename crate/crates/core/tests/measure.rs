use mvlab_core::measure::{ad_regularity_check, cantor_ad_set};
use mvlab_core::{Dimension, DiscreteMeasure};

fn brute_mass(mu: &DiscreteMeasure, c: &[f64], eps: f64) -> f64 {
    mu.atoms()
        .filter(|(p, _)| p.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt() < eps)
        .map(|(_, w)| w)
        .sum()
}

#[test]
fn cantor_level_ten_ball_masses() {
    let mu = cantor_ad_set(Dimension::PLANE, 1.0, 10).unwrap();
    assert_eq!(mu.len(), 1 << 20);
    assert!((mu.total_mass() - 1.0).abs() < 1e-12);
    for (c, eps) in [([0.0, 0.0], 4f64.powi(-4)), ([0.5, 0.5], 0.3), ([0.9, 0.1], 0.05), ([1.0, 1.0], 0.01)] {
        let fast = mu.ball_mass(&c, eps).unwrap();
        let slow = brute_mass(&mu, &c, eps);
        assert!((fast - slow).abs() < 1e-12, "{c:?} {eps}");
    }
}

#[test]
fn cantor_is_one_regular() {
    let mu = cantor_ad_set(Dimension::PLANE, 1.0, 8).unwrap();
    let radii: Vec<f64> = (1..=4).map(|j| 4f64.powi(-j)).collect();
    let rep = ad_regularity_check(&mu, 1.0, 200, &radii).unwrap();
    assert!(rep.pass, "{:?}", rep);
    assert!((rep.fitted_dimension - 1.0).abs() < 0.1);
    let rep = ad_regularity_check(&mu, 2.0, 200, &radii).unwrap();
    assert!(!rep.pass);
}
