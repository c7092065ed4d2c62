//! The comparison principle `u >= v` off a `mu`-null set implies `u >= v`
//! on the whole support, and the density condition that extends the mean
//! value theorem to Riesz functions with mass on or near `K`.

use super::{mean_value, EpsSchedule};
use crate::error::{check_dim, invalid, Error, Result};
use crate::ext::ExtReal;
use crate::field::Field;
use crate::measure::{densities, DiscreteMeasure};
use crate::numeric::dist;
use crate::point::Point;
use crate::potential::RieszFunction;
use serde::{Deserialize, Serialize};

/// Violations kept in a report before truncation.
const MAX_VIOLATIONS: usize = 16;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Violation {
    pub atom: Point,
    pub u: ExtReal,
    pub v: ExtReal,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeanPair {
    pub eps: f64,
    pub mean_u: ExtReal,
    pub mean_v: ExtReal,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointCheck {
    pub x0: Point,
    pub in_null_set: bool,
    pub means: Vec<MeanPair>,
    pub u_x0: ExtReal,
    pub v_x0: ExtReal,
    /// `u(x0) >= lim M_u(eps)` estimated at the last eps.
    pub usc_ok: bool,
    /// `lim M_v(eps) = v(x0)` estimated at the last eps.
    pub mean_value_ok: bool,
    pub means_ok: bool,
    /// `u(x0) >= v(x0) - tol`
    pub conclusion_ok: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub tol: f64,
    pub atoms_checked: usize,
    pub null_atoms: usize,
    pub hypothesis_audit_passed: bool,
    pub violations: Vec<Violation>,
    pub violation_count: usize,
    pub points: Vec<PointCheck>,
    pub conclusion_holds: bool,
    pub pass: bool,
}

/// Audits `u >= v - tol` at every weighted atom outside `null_set`, then
/// follows the chain `u(x0) >= lim M_u >= lim M_v = v(x0)` at each check
/// point, including points of the null set.
#[allow(clippy::too_many_arguments)]
pub fn comparison_check<U, V, N>(
    u: &U,
    v: &V,
    mu: &DiscreteMeasure,
    null_set: N,
    check_points: &[Point],
    sched: &EpsSchedule,
    tol: f64,
) -> Result<ComparisonReport>
where
    U: Field + ?Sized,
    V: Field + ?Sized,
    N: Fn(&[f64]) -> bool,
{
    sched.check_against(mu)?;
    if !(tol >= 0.0) {
        return Err(invalid("tolerance must be nonnegative"));
    }
    let mut null_mass = 0.0;
    let mut null_atoms = 0;
    for (p, w) in mu.atoms() {
        if null_set(p) {
            null_atoms += 1;
            null_mass += w;
        }
    }
    if null_mass > 0.0 {
        return Err(Error::Hypothesis {
            hypothesis: "mu(N) = 0",
            detail: format!("atoms of the null set carry total weight {null_mass}"),
        });
    }
    let floor = ExtReal::Finite(-tol);
    let mut violations = Vec::new();
    let mut violation_count = 0;
    let mut atoms_checked = 0;
    for (p, w) in mu.atoms() {
        if w == 0.0 || null_set(p) {
            continue;
        }
        atoms_checked += 1;
        let (a, b) = (u.value(p)?, v.value(p)?);
        if !ge_tol(a, b, floor) {
            violation_count += 1;
            if violations.len() < MAX_VIOLATIONS {
                violations.push(Violation { atom: Point::new(p.to_vec()), u: a, v: b });
            }
        }
    }
    let eps_values = sched.values();
    let mut points = Vec::with_capacity(check_points.len());
    for x0 in check_points {
        check_dim(mu.dim().get(), x0.dim())?;
        let mut means = Vec::with_capacity(eps_values.len());
        for &e in &eps_values {
            let mean_u = mean_value(u, mu, x0, e)?.value;
            let mean_v = mean_value(v, mu, x0, e)?.value;
            means.push(MeanPair { eps: e, mean_u, mean_v, ok: ge_tol(mean_u, mean_v, floor) });
        }
        let (u_x0, v_x0) = (u.value(x0)?, v.value(x0)?);
        let last = means.last().expect("schedule is nonempty");
        points.push(PointCheck {
            x0: x0.clone(),
            in_null_set: null_set(x0),
            usc_ok: ge_tol(u_x0, last.mean_u, floor),
            mean_value_ok: last.mean_v.distance(v_x0) <= ExtReal::Finite(tol),
            means_ok: means.iter().all(|m| m.ok),
            conclusion_ok: ge_tol(u_x0, v_x0, floor),
            means,
            u_x0,
            v_x0,
        });
    }
    let hypothesis_audit_passed = violation_count == 0;
    let conclusion_holds = points.iter().all(|p| p.conclusion_ok);
    Ok(ComparisonReport {
        tol,
        atoms_checked,
        null_atoms,
        hypothesis_audit_passed,
        violations,
        violation_count,
        points,
        conclusion_holds,
        pass: hypothesis_audit_passed && conclusion_holds,
    })
}

/// `a >= b - tol`, with `-inf >= -inf`.
fn ge_tol(a: ExtReal, b: ExtReal, neg_tol: ExtReal) -> bool {
    if a == b {
        return true;
    }
    match (a, b) {
        (_, ExtReal::NegInf) => true,
        (ExtReal::NegInf, _) => false,
        (ExtReal::PosInf, _) => true,
        (_, ExtReal::PosInf) => false,
        _ => a + (-b) >= neg_tol,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityTerm {
    pub w: Point,
    pub mass: f64,
    pub distance: f64,
    pub upper_density: f64,
    pub contribution: ExtReal,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityConditionReport {
    pub s: f64,
    pub x0: Point,
    pub lower_density_x0: f64,
    pub terms: Vec<DensityTerm>,
    pub value: ExtReal,
    /// A Riesz atom sits at `x0`.
    pub singular: bool,
    pub finite: bool,
}

/// `(1 / lower density at x0) * sum_w upper density at w * m_w / |w - x0|^(n-2)`
/// over the atoms `w` of the Riesz measure, with densities of order `s`
/// taken for `mu` along `radii`.
pub fn density_condition(
    rf: &RieszFunction,
    mu: &DiscreteMeasure,
    s: f64,
    x0: &[f64],
    radii: &[f64],
) -> Result<DensityConditionReport> {
    let n = rf.dim();
    check_dim(n.get(), mu.dim().get())?;
    check_dim(n.get(), x0.len())?;
    let depth = n.get() as f64 - 2.0;
    if !(s > depth) {
        return Err(invalid(format!("density exponent s = {s} must exceed n - 2 = {depth}")));
    }
    let lower = densities(mu, s, x0, radii)?.lower;
    if !(lower > 0.0) {
        return Err(Error::Hypothesis {
            hypothesis: "lower density of mu at x0 > 0",
            detail: format!("lower {s}-density estimate at {} is zero", Point::new(x0.to_vec())),
        });
    }
    let mut terms = Vec::new();
    let mut total = ExtReal::ZERO;
    let mut singular = false;
    for atom in rf.nu() {
        if atom.m == 0.0 {
            continue;
        }
        let upper = densities(mu, s, &atom.p, radii)?.upper;
        let d = dist(&atom.p, x0);
        let contribution = if upper == 0.0 {
            ExtReal::ZERO
        } else if d == 0.0 {
            singular = true;
            ExtReal::PosInf
        } else {
            ExtReal::Finite(upper * atom.m / d.powf(depth) / lower)
        };
        if d == 0.0 {
            singular = true;
        }
        total = total + contribution;
        terms.push(DensityTerm { w: atom.p.clone(), mass: atom.m, distance: d, upper_density: upper, contribution });
    }
    Ok(DensityConditionReport {
        s,
        x0: Point::new(x0.to_vec()),
        lower_density_x0: lower,
        terms,
        value: total,
        singular,
        finite: !singular && total.is_finite(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::Dimension;
    use crate::measure::segment_measure;
    use crate::potential::HarmonicSpec;

    fn seg() -> DiscreteMeasure {
        segment_measure(Dimension::PLANE, -1.0, 1.0, 20_000).unwrap()
    }

    fn quad(x: &[f64]) -> ExtReal {
        ExtReal::Finite(x[0] * x[0])
    }

    #[test]
    fn identical_functions_pass() {
        let mu = seg();
        let sched = EpsSchedule::new(0.2, 0.5, 4).unwrap();
        let pts = [Point::new(vec![0.0, 0.0]), Point::new(vec![0.5, 0.0])];
        let rep = comparison_check(&quad, &quad, &mu, |_| false, &pts, &sched, 0.0).unwrap();
        assert!(rep.pass);
        for p in &rep.points {
            assert!(p.means.iter().all(|m| m.mean_u == m.mean_v));
        }
    }

    #[test]
    fn weighted_null_set_rejected() {
        let mu = seg();
        let sched = EpsSchedule::new(0.2, 0.5, 4).unwrap();
        let r = comparison_check(&quad, &quad, &mu, |x| x[0] > 0.9, &[], &sched, 0.0);
        assert!(matches!(r, Err(Error::Hypothesis { .. })));
    }

    #[test]
    fn audit_reports_violating_atoms() {
        let mu = seg();
        let sched = EpsSchedule::new(0.2, 0.5, 4).unwrap();
        let lower = |x: &[f64]| ExtReal::Finite(x[0] * x[0] - 0.01);
        let higher = |x: &[f64]| ExtReal::Finite(if x[0] > 0.5 { 1.0 } else { x[0] * x[0] - 0.02 });
        let rep = comparison_check(&lower, &higher, &mu, |_| false, &[], &sched, 1e-9).unwrap();
        assert!(!rep.hypothesis_audit_passed);
        assert_eq!(rep.violation_count, 5000);
        assert!(rep.violations[0].atom[0] > 0.5);
    }

    #[test]
    fn density_examples() {
        let mu = seg();
        let radii = [0.1, 0.05, 0.02, 0.01];
        let far = RieszFunction::new(
            Dimension::PLANE,
            vec![(Point::new(vec![0.0, 0.7]), 1.0), (Point::new(vec![0.3, -0.5]), 2.0)],
            HarmonicSpec::zero(),
            3.0,
        )
        .unwrap();
        let rep = density_condition(&far, &mu, 1.0, &[0.0, 0.0], &radii).unwrap();
        assert_eq!(rep.value, ExtReal::ZERO);
        assert!(rep.finite);

        let on =
            RieszFunction::new(Dimension::PLANE, vec![(Point::new(vec![0.4, 0.0]), 3.0)], HarmonicSpec::zero(), 3.0)
                .unwrap();
        let rep = density_condition(&on, &mu, 1.0, &[0.0, 0.0], &radii).unwrap();
        assert!(rep.finite);
        assert!((rep.value.to_f64() - 3.0).abs() < 1e-9);

        // s = 1.5 in R^3: line densities vanish like r^-0.5 but stay positive at finite scale
        let mu3 = segment_measure(Dimension::SPACE, -1.0, 1.0, 20_000).unwrap();
        let on3 = RieszFunction::new(
            Dimension::SPACE,
            vec![(Point::new(vec![0.4, 0.0, 0.0]), 3.0)],
            HarmonicSpec::zero(),
            3.0,
        )
        .unwrap();
        let rep = density_condition(&on3, &mu3, 1.5, &[0.0; 3], &radii).unwrap();
        let ratio = rep.terms[0].upper_density / rep.lower_density_x0;
        assert!((rep.value.to_f64() - ratio * 3.0 / 0.4).abs() < 1e-9 * rep.value.to_f64());
        assert!(density_condition(&on3, &mu3, 1.0, &[0.0; 3], &radii).is_err());

        let at =
            RieszFunction::new(Dimension::PLANE, vec![(Point::new(vec![0.0, 0.0]), 1.0)], HarmonicSpec::zero(), 3.0)
                .unwrap();
        let rep = density_condition(&at, &mu, 1.0, &[0.0, 0.0], &radii).unwrap();
        assert!(rep.singular && !rep.finite);

        assert!(density_condition(&at, &mu, 1.0, &[0.0, 0.5], &radii).is_err());
    }
}
