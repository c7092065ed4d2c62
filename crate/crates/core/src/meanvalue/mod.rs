//! Shrinking-ball means `M(eps) = mu(B)^-1 int_B u dmu` over a fixed set
//! `K` carrying `mu`, convergence studies as `eps -> 0`, the comparison
//! principle and the bounds used in its proof.

mod comparison;
mod proof;

pub use comparison::{
    comparison_check, density_condition, ComparisonReport, DensityConditionReport, DensityTerm, MeanPair, PointCheck,
};
pub use proof::{proof_bounds_check, BoundCase, BoundEntry, PreconditionFailure, ProofBoundConfig, ProofBoundsReport};

use crate::error::{check_dim, invalid, Error, Result};
use crate::ext::ExtReal;
use crate::field::Field;
use crate::kernel::{kernel_unchecked, Dimension};
use crate::measure::DiscreteMeasure;
use crate::numeric::{dist, CompensatedSum};
use crate::point::Point;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

pub(crate) const LOWER_MASS: &str = "mu(K n B(x0, eps)) >= A h(eps)";

/// Errors below this are treated as round-off when testing monotonicity.
const NOISE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsSchedule {
    pub start: f64,
    pub factor: f64,
    pub steps: usize,
}

impl EpsSchedule {
    pub fn new(start: f64, factor: f64, steps: usize) -> Result<Self> {
        let s = EpsSchedule { start, factor, steps };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start > 0.0) || !self.start.is_finite() {
            return Err(invalid(format!("schedule start must be positive, got {}", self.start)));
        }
        if !(self.factor > 0.0 && self.factor < 1.0) {
            return Err(invalid(format!("schedule factor must lie in (0, 1), got {}", self.factor)));
        }
        if self.steps == 0 {
            return Err(invalid("schedule needs at least one step"));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.steps).map(|j| self.start * self.factor.powi(j as i32)).collect()
    }

    pub fn smallest(&self) -> f64 {
        self.start * self.factor.powi(self.steps as i32 - 1)
    }

    /// Errors when the smallest radius is below the measure's resolution.
    pub fn check_against(&self, mu: &DiscreteMeasure) -> Result<()> {
        self.validate()?;
        if self.smallest() < mu.min_radius() {
            return Err(invalid(format!(
                "smallest eps {} is below the resolution radius {} of measure '{}'",
                self.smallest(),
                mu.min_radius(),
                mu.label()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanValue {
    pub value: ExtReal,
    pub atoms_in_ball: usize,
    pub mass: f64,
}

fn check_ball(mu: &DiscreteMeasure, x0: &[f64], eps: f64) -> Result<()> {
    check_dim(mu.dim().get(), x0.len())?;
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(invalid(format!("eps must be positive, got {eps}")));
    }
    if eps < mu.min_radius() {
        return Err(invalid(format!(
            "eps {eps} is below the resolution radius {} of measure '{}'",
            mu.min_radius(),
            mu.label()
        )));
    }
    Ok(())
}

fn empty_ball(mu: &DiscreteMeasure, x0: &[f64], eps: f64) -> Error {
    Error::Hypothesis {
        hypothesis: LOWER_MASS,
        detail: format!("measure '{}' has no mass in B({}, {eps})", mu.label(), Point::new(x0.to_vec())),
    }
}

/// Weighted average of `u` over the atoms of `mu` in the open ball
/// `B(x0, eps)`. Atoms of zero weight are not sampled.
pub fn mean_value<F: Field + ?Sized>(u: &F, mu: &DiscreteMeasure, x0: &[f64], eps: f64) -> Result<MeanValue> {
    check_ball(mu, x0, eps)?;
    let mut num = CompensatedSum::new();
    let mut mass = CompensatedSum::new();
    let mut count = 0;
    let mut infinite = None;
    for (p, w) in mu.ball_atoms(x0, eps) {
        if w == 0.0 {
            continue;
        }
        count += 1;
        mass.add(w);
        match u.value(p)? {
            ExtReal::Finite(v) => num.add(w * v),
            ExtReal::NegInf => infinite = Some(ExtReal::NegInf),
            ExtReal::PosInf => {
                return Err(crate::error::domain(format!("function is +inf at atom {}", Point::new(p.to_vec()))))
            }
        }
    }
    let mass = mass.value();
    if count == 0 || mass <= 0.0 {
        return Err(empty_ball(mu, x0, eps));
    }
    let value = infinite.unwrap_or(ExtReal::Finite(num.value() / mass));
    Ok(MeanValue { value, atoms_in_ball: count, mass })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub x0: Point,
    pub eps_values: Vec<f64>,
    pub means: Vec<ExtReal>,
    pub target: ExtReal,
    pub errors: Vec<ExtReal>,
    pub atoms_in_ball: Vec<usize>,
    pub limit_estimate: ExtReal,
    pub tol: f64,
    /// Finite levels the means must fall below when the target is `-inf`.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub thresholds: Vec<f64>,
    pub tail_monotone: bool,
    pub converged: bool,
}

impl ConvergenceReport {
    pub fn final_error(&self) -> ExtReal {
        *self.errors.last().expect("schedule is never empty")
    }

    /// One row per eps: `eps,mean,target,error,atoms_in_ball`.
    pub fn to_csv(&self) -> String {
        use crate::report::fmt_ext;
        let mut out = String::from("eps,mean,target,error,atoms_in_ball\n");
        for j in 0..self.eps_values.len() {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                crate::report::fmt_f64(self.eps_values[j]),
                fmt_ext(self.means[j]),
                fmt_ext(self.target),
                fmt_ext(self.errors[j]),
                self.atoms_in_ball[j]
            );
        }
        out
    }
}

/// Means along a schedule, compared with `target = u(x0)`.
///
/// A finite target converges when the errors do not increase over the
/// second half of the schedule and the final error is below `tol`. A
/// `-inf` target converges when the means never increase and the last
/// one lies below every entry of `thresholds`.
pub fn convergence_study<F: Field + ?Sized>(
    u: &F,
    mu: &DiscreteMeasure,
    x0: &[f64],
    sched: &EpsSchedule,
    target: ExtReal,
    tol: f64,
    thresholds: &[f64],
) -> Result<ConvergenceReport> {
    sched.check_against(mu)?;
    if !(tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    if target == ExtReal::PosInf {
        return Err(invalid("target cannot be +inf"));
    }
    if target.is_neg_inf() && (thresholds.is_empty() || thresholds.iter().any(|t| !t.is_finite())) {
        return Err(invalid("a -inf target needs a nonempty list of finite thresholds"));
    }
    let eps_values = sched.values();
    let mut means = Vec::with_capacity(eps_values.len());
    let mut atoms_in_ball = Vec::with_capacity(eps_values.len());
    for &e in &eps_values {
        let m = mean_value(u, mu, x0, e)?;
        means.push(m.value);
        atoms_in_ball.push(m.atoms_in_ball);
    }
    let errors: Vec<ExtReal> = means.iter().map(|m| m.distance(target)).collect();
    let limit_estimate = *means.last().expect("schedule validated nonempty");
    let (tail_monotone, converged) = match target {
        ExtReal::Finite(t) => {
            let floor = NOISE_FLOOR * t.abs().max(1.0);
            let tail = &errors[errors.len() / 2..];
            let monotone = tail.windows(2).all(|w| w[1] <= w[0] + floor);
            let last = errors.last().expect("nonempty").to_f64();
            (monotone, monotone && last < tol)
        }
        _ => {
            let monotone = means.windows(2).all(|w| w[1] <= w[0]);
            let below = thresholds.iter().all(|t| limit_estimate < ExtReal::Finite(*t));
            (monotone, monotone && below)
        }
    };
    Ok(ConvergenceReport {
        x0: Point::new(x0.to_vec()),
        eps_values,
        means,
        target,
        errors,
        atoms_in_ball,
        limit_estimate,
        tol,
        thresholds: if target.is_neg_inf() { thresholds.to_vec() } else { Vec::new() },
        tail_monotone,
        converged,
    })
}

/// Average of `g(|x - w|)` over the atoms in `B(x0, eps)`; `+inf` when `w`
/// is itself a weighted atom of the ball.
pub fn f_eps(mu: &DiscreteMeasure, x0: &[f64], eps: f64, w: &[f64], n: Dimension) -> Result<ExtReal> {
    check_dim(n.get(), mu.dim().get())?;
    check_dim(n.get(), w.len())?;
    check_ball(mu, x0, eps)?;
    let mut num = CompensatedSum::new();
    let mut mass = CompensatedSum::new();
    for (p, wt) in mu.ball_atoms(x0, eps) {
        if wt == 0.0 {
            continue;
        }
        let r = dist(p, w);
        if r == 0.0 {
            return Ok(ExtReal::PosInf);
        }
        num.add(wt * kernel_unchecked(n, r));
        mass.add(wt);
    }
    let mass = mass.value();
    if !(mass > 0.0) {
        return Err(empty_ball(mu, x0, eps));
    }
    Ok(ExtReal::Finite(num.value() / mass))
}
