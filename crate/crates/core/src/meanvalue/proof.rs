//! Numerical verification of the two pointwise bounds on `f_eps(w)` that
//! drive the proof of the mean value theorem.

use super::f_eps;
use crate::admissible::{admissible_integral, GaugeFunction};
use crate::error::{check_dim, invalid, Result};
use crate::ext::ExtReal;
use crate::kernel::{kernel_unchecked, Dimension};
use crate::measure::DiscreteMeasure;
use crate::numeric::dist;
use crate::point::Point;
use serde::{Deserialize, Serialize};

/// Atoms of `mu` sampled for the upper mass condition.
const UPPER_SAMPLES: usize = 64;
/// Relative slack on the mass conditions.
const MASS_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProofBoundConfig {
    pub p: f64,
    pub gamma: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub eps1: f64,
}

impl ProofBoundConfig {
    pub fn new(p: f64, gamma: f64, a: f64, b: f64, m: f64, eps1: f64) -> Result<Self> {
        let cfg = ProofBoundConfig { p, gamma, a, b, m, eps1 };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 1.0) || !(self.gamma > 1.0) {
            return Err(invalid("p and gamma must both exceed 1"));
        }
        for (name, v) in [("A", self.a), ("B", self.b), ("M", self.m), ("eps1", self.eps1)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if self.a > self.b {
            return Err(invalid(format!("A = {} exceeds B = {}", self.a, self.b)));
        }
        Ok(())
    }

    /// `c = 2 gamma (1 + p)`, always above 4.
    pub fn c(&self) -> f64 {
        2.0 * self.gamma * (1.0 + self.p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundCase {
    /// `|w - x0| > p eps`
    Far,
    /// `|w - x0| <= p eps`
    Near,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundEntry {
    pub w: Point,
    pub eps: f64,
    pub case: BoundCase,
    pub f_eps: ExtReal,
    pub bound: f64,
    /// `bound - f_eps`
    pub margin: ExtReal,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PreconditionFailure {
    pub condition: String,
    pub center: Point,
    pub radius: f64,
    pub observed: f64,
    pub required: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProofBoundsReport {
    pub config: ProofBoundConfig,
    pub c: f64,
    pub x0: Point,
    pub precondition_ok: bool,
    pub precondition_failures: Vec<PreconditionFailure>,
    pub entries: Vec<BoundEntry>,
    /// Sample points skipped because `w = x0` or `w` is a weighted atom.
    pub skipped: Vec<Point>,
    pub worst_far: Option<ExtReal>,
    pub worst_near: Option<ExtReal>,
    pub tol: f64,
    pub pass: bool,
}

fn sampled_atoms(mu: &DiscreteMeasure) -> Vec<usize> {
    let weighted: Vec<usize> = (0..mu.len()).filter(|&i| mu.weight(i) > 0.0).collect();
    let stride = weighted.len().div_ceil(UPPER_SAMPLES).max(1);
    weighted.into_iter().step_by(stride).collect()
}

fn check_preconditions(
    mu: &DiscreteMeasure,
    x0: &[f64],
    cfg: &ProofBoundConfig,
    h: &GaugeFunction,
    n: Dimension,
    eps_samples: &[f64],
) -> Result<Vec<PreconditionFailure>> {
    let mut fails = Vec::new();
    let c = cfg.c();
    let x0p = Point::new(x0.to_vec());
    for &e in eps_samples {
        if e > cfg.eps1 {
            fails.push(PreconditionFailure {
                condition: "eps <= eps1".into(),
                center: x0p.clone(),
                radius: e,
                observed: e,
                required: cfg.eps1,
            });
        }
        let lower = mu.ball_mass(x0, e)?;
        let need = cfg.a * h.eval(e)?;
        if lower < need * (1.0 - MASS_SLACK) {
            fails.push(PreconditionFailure {
                condition: "mu(K n B(x0, eps)) >= A h(eps)".into(),
                center: x0p.clone(),
                radius: e,
                observed: lower,
                required: need,
            });
        }
        let integral = admissible_integral(h, n, c * e)?;
        let cap = cfg.m * h.eval(e)? / e.powi(n.get() as i32 - 2);
        if integral > ExtReal::Finite(cap * (1.0 + MASS_SLACK)) {
            fails.push(PreconditionFailure {
                condition: "int_0^{c eps} h(r) / r^(n-1) dr <= M h(eps) / eps^(n-2)".into(),
                center: x0p.clone(),
                radius: c * e,
                observed: integral.to_f64(),
                required: cap,
            });
        }
    }
    let centers = sampled_atoms(mu);
    for &e in eps_samples {
        for r in [e, c * e] {
            let hr = h.eval(r)?;
            for &i in &centers {
                let mass = mu.ball_mass(mu.point(i), r)?;
                if mass > cfg.b * hr * (1.0 + MASS_SLACK) {
                    fails.push(PreconditionFailure {
                        condition: "mu(B(x, r)) <= B h(r)".into(),
                        center: Point::new(mu.point(i).to_vec()),
                        radius: r,
                        observed: mass,
                        required: cfg.b * hr,
                    });
                }
            }
        }
    }
    Ok(fails)
}

/// Checks, for every `(w, eps)`, that `f_eps(w) <= g((p-1)/p |w - x0|)`
/// when `|w - x0| > p eps` and that
/// `f_eps(w) <= g(|w - x0|) + (2 gamma p)^(n-2) max(1, n-2) B M / (A |w - x0|^(n-2))`
/// otherwise, each up to `tol`.
///
/// The two-sided mass condition and the admissibility inequality are
/// verified first on the tested radii; when they fail the report lists
/// the failures and no bound is evaluated.
#[allow(clippy::too_many_arguments)]
pub fn proof_bounds_check(
    mu: &DiscreteMeasure,
    x0: &[f64],
    n: Dimension,
    cfg: &ProofBoundConfig,
    h: &GaugeFunction,
    w_samples: &[Point],
    eps_samples: &[f64],
    tol: f64,
) -> Result<ProofBoundsReport> {
    cfg.validate()?;
    h.validate()?;
    check_dim(n.get(), mu.dim().get())?;
    check_dim(n.get(), x0.len())?;
    if eps_samples.is_empty() {
        return Err(invalid("no eps samples"));
    }
    if eps_samples.iter().any(|e| *e < mu.min_radius()) {
        return Err(invalid(format!("eps samples must be at least the resolution radius {}", mu.min_radius())));
    }
    for w in w_samples {
        check_dim(n.get(), w.dim())?;
    }
    let failures = check_preconditions(mu, x0, cfg, h, n, eps_samples)?;
    let mut report = ProofBoundsReport {
        config: *cfg,
        c: cfg.c(),
        x0: Point::new(x0.to_vec()),
        precondition_ok: failures.is_empty(),
        precondition_failures: failures,
        entries: Vec::new(),
        skipped: Vec::new(),
        worst_far: None,
        worst_near: None,
        tol,
        pass: false,
    };
    if !report.precondition_ok {
        return Ok(report);
    }
    let depth = n.get() as i32 - 2;
    let near_const = (2.0 * cfg.gamma * cfg.p).powi(depth) * (n.get() as f64 - 2.0).max(1.0) * cfg.b * cfg.m / cfg.a;
    for w in w_samples {
        let d = dist(w, x0);
        if d == 0.0 {
            report.skipped.push(w.clone());
            continue;
        }
        let mut singular = false;
        let mut rows = Vec::with_capacity(eps_samples.len());
        for &e in eps_samples {
            let f = f_eps(mu, x0, e, w, n)?;
            if f == ExtReal::PosInf {
                singular = true;
                break;
            }
            let (case, bound) = if d > cfg.p * e {
                (BoundCase::Far, kernel_unchecked(n, (cfg.p - 1.0) / cfg.p * d))
            } else {
                (BoundCase::Near, kernel_unchecked(n, d) + near_const / d.powi(depth))
            };
            let margin = ExtReal::Finite(bound) + (-f);
            rows.push(BoundEntry { w: w.clone(), eps: e, case, f_eps: f, bound, margin });
        }
        if singular {
            report.skipped.push(w.clone());
        } else {
            report.entries.extend(rows);
        }
    }
    let worst = |case| {
        report
            .entries
            .iter()
            .filter(|e| e.case == case)
            .map(|e| e.margin)
            .fold(None, |acc: Option<ExtReal>, m| Some(acc.map_or(m, |a| a.min(m))))
    };
    report.worst_far = worst(BoundCase::Far);
    report.worst_near = worst(BoundCase::Near);
    report.pass = report.entries.iter().all(|e| e.margin >= ExtReal::Finite(-tol));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::segment_measure;

    fn d2() -> Dimension {
        Dimension::PLANE
    }

    fn cfg(a: f64, b: f64, m: f64) -> ProofBoundConfig {
        ProofBoundConfig::new(2.0, 1.5, a, b, m, 0.05).unwrap()
    }

    #[test]
    fn config_rules() {
        assert!(ProofBoundConfig::new(1.0, 1.5, 1.0, 1.0, 1.0, 0.1).is_err());
        assert!(ProofBoundConfig::new(2.0, 1.5, 2.0, 1.0, 1.0, 0.1).is_err());
        assert_eq!(cfg(1.0, 1.0, 1.0).c(), 9.0);
    }

    #[test]
    fn segment_far_and_near() {
        let mu = segment_measure(d2(), -1.0, 1.0, 200_000).unwrap();
        let h = crate::admissible::gauge_scale(&GaugeFunction::power(1.0), 2.0).unwrap();
        let cfg = cfg(0.9, 1.1, 9.0);
        let eps = [0.05, 0.02, 0.01];
        let ws: Vec<Point> = vec![
            Point::new(vec![0.5, 0.3]),
            Point::new(vec![0.0, 0.2]),
            Point::new(vec![0.005, 0.0]),
            Point::new(vec![0.0, 0.01]),
        ];
        let rep = proof_bounds_check(&mu, &[0.0, 0.0], d2(), &cfg, &h, &ws, &eps, 1e-9).unwrap();
        assert!(rep.precondition_ok, "{:?}", rep.precondition_failures);
        assert!(rep.pass);
        assert!(rep.worst_far.unwrap() >= ExtReal::ZERO);
        assert!(rep.worst_near.is_some());
    }

    #[test]
    fn single_atom_far_gap() {
        let eps_min = 0.01;
        let a = [0.5 * eps_min, 0.0];
        let mu = DiscreteMeasure::new(d2(), "atom", vec![(Point::new(a.to_vec()), 1.0)]).unwrap();
        let cfg = ProofBoundConfig::new(2.0, 1.5, 1.0, 1.0 / eps_min, 9.0, 0.05).unwrap();
        let h = GaugeFunction::power(1.0);
        let w = Point::new(vec![0.3, 0.0]);
        let eps = [0.04, 0.02, eps_min];
        let rep = proof_bounds_check(&mu, &[0.0, 0.0], d2(), &cfg, &h, &[w], &eps, 1e-9).unwrap();
        assert!(rep.precondition_ok, "{:?}", rep.precondition_failures);
        for e in &rep.entries {
            let gap = kernel_unchecked(d2(), 0.15) - kernel_unchecked(d2(), 0.3 - a[0]);
            assert!((e.margin.to_f64() - gap).abs() < 1e-14);
            assert!(gap >= 0.0);
        }
    }

    #[test]
    fn mass_failure_is_reported() {
        let mu = segment_measure(d2(), -1.0, 1.0, 20_000).unwrap();
        let h = GaugeFunction::power(1.0);
        let rep = proof_bounds_check(
            &mu,
            &[0.0, 0.0],
            d2(),
            &cfg(1.0, 1.0, 9.0),
            &h,
            &[Point::new(vec![0.0, 0.5])],
            &[0.02],
            1e-9,
        )
        .unwrap();
        assert!(!rep.precondition_ok);
        assert!(rep.entries.is_empty());
        assert!(!rep.pass);
    }
}
