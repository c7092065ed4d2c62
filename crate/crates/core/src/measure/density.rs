//! Finite-scale surrogates for upper/lower densities and for the
//! Ahlfors-David two-sided mass bound.
//!
//! Limits are never extrapolated: upper and lower densities are the max and
//! min of the ratio sequence over the tail of a caller-supplied radius
//! schedule, and the raw sequence is kept in the report.

use super::DiscreteMeasure;
use crate::error::{check_dim, invalid, Result};
use crate::numeric::ls_slope;
use crate::point::Point;
use serde::{Deserialize, Serialize};

/// Allowed deviation between the fitted mass-scaling exponent and `k`.
pub const DIMENSION_SLACK: f64 = 0.25;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub s: f64,
    pub point: Point,
    pub radii: Vec<f64>,
    /// `mu(B(x, r)) / (2r)^s` for each radius.
    pub ratios: Vec<f64>,
    /// `ratios[j+1] / ratios[j]`; `None` where the earlier ratio is zero.
    pub growth: Vec<Option<f64>>,
    /// Index of the first radius in the tail.
    pub tail_start: usize,
    pub upper: f64,
    pub lower: f64,
}

impl DensityEstimate {
    /// True when every tail growth factor exceeds one, i.e. the ratio keeps
    /// increasing as the radius shrinks.
    pub fn diverging(&self) -> bool {
        let tail = &self.growth[self.tail_start.saturating_sub(1).min(self.growth.len())..];
        !tail.is_empty() && tail.iter().all(|g| matches!(g, Some(f) if *f > 1.0))
    }
}

fn check_radii(mu: &DiscreteMeasure, radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(invalid("radius schedule is empty"));
    }
    if radii.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
        return Err(invalid("radii must be positive and finite"));
    }
    if radii.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(invalid("radii must be strictly decreasing"));
    }
    let smallest = radii[radii.len() - 1];
    if smallest < mu.min_radius() {
        return Err(invalid(format!(
            "radius {smallest} is below the resolution limit {} of '{}'",
            mu.min_radius(),
            mu.label()
        )));
    }
    Ok(())
}

/// Densities with the default tail (last half of the schedule).
pub fn densities(mu: &DiscreteMeasure, s: f64, x: &[f64], radii: &[f64]) -> Result<DensityEstimate> {
    densities_with_tail(mu, s, x, radii, 0.5)
}

pub fn densities_with_tail(
    mu: &DiscreteMeasure,
    s: f64,
    x: &[f64],
    radii: &[f64],
    tail_fraction: f64,
) -> Result<DensityEstimate> {
    check_dim(mu.dim().get(), x.len())?;
    if !(s > 0.0) {
        return Err(invalid("density exponent s must be positive"));
    }
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(invalid("tail fraction must lie in (0, 1]"));
    }
    check_radii(mu, radii)?;
    let ratios: Vec<f64> =
        radii.iter().map(|&r| mu.ball_mass(x, r).map(|m| m / (2.0 * r).powf(s))).collect::<Result<_>>()?;
    let growth = ratios.windows(2).map(|w| (w[0] > 0.0).then(|| w[1] / w[0])).collect();
    let tail_len = ((radii.len() as f64 * tail_fraction).ceil() as usize).clamp(1, radii.len());
    let tail_start = radii.len() - tail_len;
    let tail = &ratios[tail_start..];
    let upper = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lower = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(DensityEstimate {
        s,
        point: Point::new(x.to_vec()),
        radii: radii.to_vec(),
        ratios,
        growth,
        tail_start,
        upper,
        lower,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdReport {
    pub k: f64,
    /// Smallest observed `mu(B(x, R)) / R^k`.
    pub c0_lower: f64,
    /// Largest observed `mu(B(x, R)) / R^k`.
    pub c0_upper: f64,
    /// `max(c0_upper, 1 / c0_lower)`.
    pub c0: f64,
    /// Least-squares exponent of ball mass against radius.
    pub fitted_dimension: f64,
    pub pass: bool,
    pub sampled_points: usize,
    /// Set when more samples were requested than there are atoms.
    pub sample_count_clamped: bool,
    pub diameter: f64,
    pub radii: Vec<f64>,
    pub min_ratio_per_radius: Vec<f64>,
    pub max_ratio_per_radius: Vec<f64>,
}

/// Samples atoms at a fixed stride and compares `mu(B(x, R))` with `R^k`.
///
/// Passes when all ratios are positive and finite and the fitted scaling
/// exponent is within [`DIMENSION_SLACK`] of `k`. At a finite scale every
/// constant is finite, so the exponent test is what separates bounded ratios
/// from ones that drift to 0 or infinity as `R` shrinks.
pub fn ad_regularity_check(mu: &DiscreteMeasure, k: f64, sample_count: usize, radii: &[f64]) -> Result<AdReport> {
    if !(k > 0.0) {
        return Err(invalid("AD dimension k must be positive"));
    }
    if sample_count == 0 {
        return Err(invalid("sample_count must be positive"));
    }
    check_radii(mu, radii)?;
    let diameter = mu.diameter();
    if radii[0] > diameter {
        return Err(invalid(format!("radius {} exceeds the diameter {diameter}", radii[0])));
    }
    let support: Vec<usize> = (0..mu.len()).filter(|&i| mu.weight(i) > 0.0).collect();
    let clamped = sample_count > support.len();
    let count = sample_count.min(support.len());
    let samples: Vec<usize> = (0..count).map(|j| support[j * support.len() / count]).collect();

    let mut min_r = vec![f64::INFINITY; radii.len()];
    let mut max_r = vec![0.0f64; radii.len()];
    let mut log_mean = vec![0.0; radii.len()];
    for &i in &samples {
        let x = mu.point(i);
        for (j, &r) in radii.iter().enumerate() {
            let ratio = mu.ball_mass(x, r)? / r.powf(k);
            min_r[j] = min_r[j].min(ratio);
            max_r[j] = max_r[j].max(ratio);
            log_mean[j] += ratio.ln() / count as f64;
        }
    }
    let c0_lower = min_r.iter().cloned().fold(f64::INFINITY, f64::min);
    let c0_upper = max_r.iter().cloned().fold(0.0, f64::max);
    let fitted_dimension = if radii.len() >= 2 && c0_lower > 0.0 {
        let log_r: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
        k + ls_slope(&log_r, &log_mean)
    } else {
        k
    };
    let bounded = c0_lower > 0.0 && c0_upper.is_finite();
    let pass = bounded && (fitted_dimension - k).abs() <= DIMENSION_SLACK;
    Ok(AdReport {
        k,
        c0_lower,
        c0_upper,
        c0: if bounded { c0_upper.max(1.0 / c0_lower) } else { f64::INFINITY },
        fitted_dimension,
        pass,
        sampled_points: count,
        sample_count_clamped: clamped,
        diameter,
        radii: radii.to_vec(),
        min_ratio_per_radius: min_r,
        max_ratio_per_radius: max_r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Dimension;
    use crate::measure::{sample_hypersurface, segment_measure, SurfaceSpec};

    #[test]
    fn segment_densities() {
        let seg = segment_measure(Dimension::PLANE, -1.0, 1.0, 20_000).unwrap();
        let radii = [0.2, 0.1, 0.05];
        let est = densities(&seg, 1.0, &[0.0, 0.0], &radii).unwrap();
        assert!((est.upper - 1.0).abs() < 0.02 && (est.lower - 1.0).abs() < 0.02);
        assert!(est.lower <= est.upper);

        let est2 = densities(&seg, 2.0, &[0.0, 0.0], &radii).unwrap();
        assert!(est2.growth.iter().all(|g| g.unwrap() > 1.0));
        assert!(est2.diverging());

        let off = densities(&seg, 1.0, &[0.0, 0.5], &[0.4, 0.2, 0.1]).unwrap();
        assert_eq!((off.upper, off.lower), (0.0, 0.0));
    }

    #[test]
    fn density_errors() {
        let seg = segment_measure(Dimension::PLANE, -1.0, 1.0, 1000).unwrap();
        assert!(densities(&seg, 1.0, &[0.0, 0.0], &[]).is_err());
        // below resolution: spacing 2e-3, limit 2e-2
        assert!(densities(&seg, 1.0, &[0.0, 0.0], &[0.1, 0.01]).is_err());
        assert!(densities(&seg, 1.0, &[0.0, 0.0], &[0.1, 0.2]).is_err());
    }

    #[test]
    fn circle_is_one_regular() {
        let spec = SurfaceSpec::sphere(Dimension::PLANE, Point::origin(2), 1.0);
        let mu = sample_hypersurface(&spec, 20_000).unwrap();
        let radii = [0.5, 0.25, 0.1, 0.05, 0.01];
        let rep = ad_regularity_check(&mu, 1.0, 50, &radii).unwrap();
        assert!(rep.pass);
        assert!(rep.c0_lower >= 1.9 && rep.c0_upper <= 2.2, "{rep:?}");
    }

    #[test]
    fn segment_is_not_two_regular() {
        let seg = segment_measure(Dimension::PLANE, -1.0, 1.0, 20_000).unwrap();
        let radii = [0.5, 0.25, 0.1, 0.05, 0.01];
        let rep = ad_regularity_check(&seg, 2.0, 20, &radii).unwrap();
        assert!(!rep.pass);
        assert!((rep.fitted_dimension - 1.0).abs() < 0.1);
        let ok = ad_regularity_check(&seg, 1.0, 20, &radii).unwrap();
        assert!(ok.pass);
    }

    #[test]
    fn sample_clamp_flagged() {
        let seg = segment_measure(Dimension::PLANE, -1.0, 1.0, 100).unwrap();
        let rep = ad_regularity_check(&seg, 1.0, 500, &[0.5, 0.3, 0.2]).unwrap();
        assert!(rep.sample_count_clamped);
        assert_eq!(rep.sampled_points, 100);
    }
}
