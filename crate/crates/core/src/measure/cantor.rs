use super::{DiscreteMeasure, SAFETY_FACTOR};
use crate::error::{invalid, Error, Result};
use crate::kernel::Dimension;

const MAX_LEVEL: u32 = 12;

/// Natural measure on the four-corner Cantor set in the unit square.
///
/// The generator keeps the four corner sub-squares of side 1/4 at every
/// step, so the limit set is Ahlfors-David regular of dimension
/// `log 4 / log 4 = 1`. Level `L` puts one atom of weight `4^-L` at the
/// centre of each of the `4^L` surviving cells.
///
/// Only `(n, k) = (2, 1)` is available.
pub fn cantor_ad_set(n: Dimension, k: f64, level: u32) -> Result<DiscreteMeasure> {
    if n.get() != 2 || (k - 1.0).abs() > 1e-12 {
        return Err(Error::Unsupported(format!(
            "no AD-set generator for (n = {n}, k = {k}); supported: four-corner Cantor set (n = 2, k = 1)"
        )));
    }
    if level == 0 || level > MAX_LEVEL {
        return Err(invalid(format!("level must be in 1..={MAX_LEVEL}, got {level}")));
    }
    let count = 4usize.pow(level);
    let side = 0.25f64.powi(level as i32);
    let mut coords = Vec::with_capacity(2 * count);
    for cell in 0..count {
        let (mut x, mut y) = (0.0, 0.0);
        let mut scale = 0.75;
        let digits = cell;
        // Most significant base-4 digit picks the level-1 corner.
        for j in (0..level).rev() {
            let d = (digits >> (2 * j)) & 3;
            x += scale * (d & 1) as f64;
            y += scale * (d >> 1) as f64;
            scale *= 0.25;
        }
        coords.push(x + 0.5 * side);
        coords.push(y + 0.5 * side);
    }
    DiscreteMeasure::from_raw(
        n,
        format!("four-corner Cantor set, level {level}"),
        coords,
        vec![side; count],
        // Sibling cell centres are 3 * side apart.
        SAFETY_FACTOR * 3.0 * side,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_one_corners() {
        let mu = cantor_ad_set(Dimension::PLANE, 1.0, 1).unwrap();
        assert_eq!(mu.len(), 4);
        let mut pts: Vec<(f64, f64)> = mu
            .atoms()
            .map(|(p, w)| {
                assert_eq!(w, 0.25);
                (p[0], p[1])
            })
            .collect();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(pts, vec![(0.125, 0.125), (0.125, 0.875), (0.875, 0.125), (0.875, 0.875)]);
    }

    #[test]
    fn level_three_mass() {
        let mu = cantor_ad_set(Dimension::PLANE, 1.0, 3).unwrap();
        assert_eq!(mu.len(), 64);
        assert!((mu.total_mass() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unsupported_generators() {
        assert!(matches!(cantor_ad_set(Dimension::SPACE, 1.0, 3), Err(Error::Unsupported(_))));
        assert!(matches!(cantor_ad_set(Dimension::PLANE, 1.5, 3), Err(Error::Unsupported(_))));
        assert!(cantor_ad_set(Dimension::PLANE, 1.0, 13).is_err());
        assert!(cantor_ad_set(Dimension::PLANE, 1.0, 0).is_err());
    }

    /// Brute force over every atom at level 7, radii 4^-m.
    #[test]
    fn ball_masses_comparable_to_radius() {
        let mu = cantor_ad_set(Dimension::PLANE, 1.0, 7).unwrap();
        for i in (0..mu.len()).step_by(97) {
            let x = mu.point(i).to_vec();
            for m in 1..6 {
                let eps = 0.25f64.powi(m);
                let brute: f64 = mu.atoms().filter(|(p, _)| crate::numeric::dist(p, &x) < eps).map(|(_, w)| w).sum();
                assert!((mu.ball_mass(&x, eps).unwrap() - brute).abs() < 1e-15);
                assert!(brute >= eps / 8.0 && brute <= 8.0 * eps, "m = {m}: mass {brute}");
            }
        }
    }
}
