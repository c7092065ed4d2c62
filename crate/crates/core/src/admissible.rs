//! Gauge functions `h` and the admissibility inequality
//! `int_0^{c eps} h(r) / r^(n-1) dr <= M h(eps) / eps^(n-2)`.
//!
//! Membership is asymptotic, so finite-grid verdicts have three states.
//! The same inequality is also tested in its one-dimensional mean-value
//! form for `F(r) = h(r) / r^(n-1)`; both verdicts must agree.

use crate::error::{invalid, Result};
use crate::ext::ExtReal;
use crate::kernel::Dimension;
use serde::{Deserialize, Serialize};

/// Tail growth factor above which ratios count as unbounded.
pub const GROWTH_THRESHOLD: f64 = 1.05;
/// Consecutive dyadic growth factors needed to declare divergence.
pub const DIVERGENCE_DYADS: usize = 8;
/// Minimum grid length for a verdict.
pub const MIN_GRID: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
pub enum GaugeFunction {
    Power {
        k: f64,
    },
    /// `r^k |log r|`
    PowerLog {
        k: f64,
    },
    Scaled {
        a: f64,
        inner: Box<GaugeFunction>,
    },
    Sum {
        terms: Vec<GaugeFunction>,
    },
    /// Samples on an increasing grid, interpolated linearly in log-log space.
    Table {
        r: Vec<f64>,
        h: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl GaugeFunction {
    pub fn power(k: f64) -> Self {
        GaugeFunction::Power { k }
    }

    pub fn power_log(k: f64) -> Self {
        GaugeFunction::PowerLog { k }
    }

    pub fn table(r: Vec<f64>, h: Vec<f64>) -> Result<Self> {
        let g = GaugeFunction::Table { r, h };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GaugeFunction::Power { k } | GaugeFunction::PowerLog { k } => {
                if !k.is_finite() {
                    return Err(invalid("gauge exponent must be finite"));
                }
            }
            GaugeFunction::Scaled { a, inner } => {
                if !(*a > 0.0) || !a.is_finite() {
                    return Err(invalid(format!("gauge scale must be positive, got {a}")));
                }
                inner.validate()?;
            }
            GaugeFunction::Sum { terms } => {
                if terms.is_empty() {
                    return Err(invalid("gauge sum needs at least one term"));
                }
                terms.iter().try_for_each(|t| t.validate())?;
            }
            GaugeFunction::Table { r, h } => {
                if r.len() != h.len() || r.len() < 2 {
                    return Err(invalid("gauge table needs matching r and h with at least 2 samples"));
                }
                if r[0] <= 0.0 || r.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(invalid("gauge table radii must be positive and strictly increasing"));
                }
                if h.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
                    return Err(invalid("gauge table values must be strictly positive"));
                }
            }
        }
        Ok(())
    }

    /// `(inner, a)` with all outer scalings removed.
    fn strip_scale(&self) -> (&GaugeFunction, f64) {
        match self {
            GaugeFunction::Scaled { a, inner } => {
                let (g, b) = inner.strip_scale();
                (g, a * b)
            }
            g => (g, 1.0),
        }
    }

    fn eval_raw(&self, r: f64) -> Result<f64> {
        Ok(match self {
            GaugeFunction::Power { k } => r.powf(*k),
            GaugeFunction::PowerLog { k } => r.powf(*k) * r.ln().abs(),
            GaugeFunction::Scaled { a, inner } => a * inner.eval_raw(r)?,
            GaugeFunction::Sum { terms } => {
                let mut s = 0.0;
                for t in terms {
                    s += t.eval_raw(r)?;
                }
                s
            }
            GaugeFunction::Table { r: rs, h } => {
                let last = rs.len() - 1;
                if r < rs[0] || r > rs[last] {
                    return Err(invalid(format!("r = {r} is outside the gauge table range [{}, {}]", rs[0], rs[last])));
                }
                let j = rs.partition_point(|&x| x <= r).clamp(1, last);
                let slope = (h[j].ln() - h[j - 1].ln()) / (rs[j].ln() - rs[j - 1].ln());
                h[j - 1] * (r / rs[j - 1]).powf(slope)
            }
        })
    }

    /// `h(r)`; errors outside the table range or where `h` is not positive.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(invalid(format!("gauge argument must be positive, got {r}")));
        }
        let v = self.eval_raw(r)?;
        if !(v > 0.0) || !v.is_finite() {
            return Err(invalid(format!("gauge value {v} at r = {r} is not strictly positive")));
        }
        Ok(v)
    }
}

pub fn gauge_eval(h: &GaugeFunction, r: f64) -> Result<f64> {
    h.eval(r)
}

pub fn gauge_combine(a: &GaugeFunction, b: &GaugeFunction) -> GaugeFunction {
    GaugeFunction::Sum { terms: vec![a.clone(), b.clone()] }
}

pub fn gauge_scale(a: &GaugeFunction, factor: f64) -> Result<GaugeFunction> {
    if !(factor > 0.0) || !factor.is_finite() {
        return Err(invalid(format!("gauge scale factor must be positive, got {factor}")));
    }
    Ok(GaugeFunction::Scaled { a: factor, inner: Box::new(a.clone()) })
}

/// `int_0^u r^(b-1) dr` and `int_0^u r^(b-1) |log r| dr` for `b > 0`.
fn power_integral(b: f64, u: f64) -> f64 {
    u.powf(b) / b
}

fn power_log_integral(b: f64, u: f64) -> f64 {
    let ub = u.powf(b);
    if u <= 1.0 {
        ub * (1.0 / (b * b) - u.ln() / b)
    } else {
        2.0 / (b * b) + ub * (u.ln() / b - 1.0 / (b * b))
    }
}

/// Dyadic partial-sum test: divergent when `S_{j+1} / S_j` exceeds
/// [`GROWTH_THRESHOLD`] for [`DIVERGENCE_DYADS`] consecutive dyads.
fn dyadic_divergence(piece: impl Fn(usize) -> f64) -> bool {
    let mut partial = piece(0);
    for j in 1..=DIVERGENCE_DYADS {
        let next = partial + piece(j);
        if !(next > GROWTH_THRESHOLD * partial) {
            return false;
        }
        partial = next;
    }
    true
}

fn table_integral(rs: &[f64], hs: &[f64], n: usize, upper: f64) -> Result<ExtReal> {
    let last = rs.len() - 1;
    if upper > rs[last] {
        return Err(invalid(format!("integration limit {upper} exceeds the gauge table range (max {})", rs[last])));
    }
    let nf = n as f64;
    // power-law piece h(r) = h0 (r / r0)^sigma; integral of h(r) r^(1-n) over [lo, hi]
    let piece = |h0: f64, r0: f64, sigma: f64, lo: f64, hi: f64| -> f64 {
        let beta = sigma - nf + 2.0;
        let scale = h0 * r0.powf(-sigma);
        if beta.abs() < 1e-14 {
            scale * (hi / lo).ln()
        } else {
            scale * (hi.powf(beta) - lo.powf(beta)) / beta
        }
    };
    let slope = |j: usize| (hs[j + 1].ln() - hs[j].ln()) / (rs[j + 1].ln() - rs[j].ln());
    let sigma0 = slope(0);
    let (r0, h0) = (rs[0], hs[0]);
    let divergent = dyadic_divergence(|j| {
        let hi = r0 * 0.5f64.powi(j as i32);
        piece(h0, r0, sigma0, 0.5 * hi, hi)
    });
    let beta0 = sigma0 - nf + 2.0;
    if divergent || beta0 <= 0.0 {
        return Ok(ExtReal::PosInf);
    }
    let head_hi = upper.min(r0);
    let mut total = h0 * r0.powf(-sigma0) * head_hi.powf(beta0) / beta0;
    for j in 0..last {
        let (lo, hi) = (rs[j], rs[j + 1].min(upper));
        if lo >= upper {
            break;
        }
        total += piece(hs[j], rs[j], slope(j), lo, hi);
    }
    Ok(ExtReal::Finite(total))
}

/// `int_0^upper h(r) / r^(n-1) dr`, `+inf` when the integral diverges at 0.
pub fn admissible_integral(h: &GaugeFunction, n: Dimension, upper: f64) -> Result<ExtReal> {
    if !(upper > 0.0) || !upper.is_finite() {
        return Err(invalid(format!("integration limit must be positive, got {upper}")));
    }
    h.validate()?;
    integral(h, n.get(), upper)
}

fn integral(h: &GaugeFunction, n: usize, upper: f64) -> Result<ExtReal> {
    let depth = n as f64 - 2.0;
    Ok(match h {
        GaugeFunction::Power { k } => {
            let b = k - depth;
            if b <= 0.0 {
                ExtReal::PosInf
            } else {
                ExtReal::Finite(power_integral(b, upper))
            }
        }
        GaugeFunction::PowerLog { k } => {
            let b = k - depth;
            if b <= 0.0 {
                ExtReal::PosInf
            } else {
                ExtReal::Finite(power_log_integral(b, upper))
            }
        }
        GaugeFunction::Scaled { a, inner } => integral(inner, n, upper)? * *a,
        GaugeFunction::Sum { terms } => {
            let mut s = ExtReal::ZERO;
            for t in terms {
                s = s + integral(t, n, upper)?;
            }
            s
        }
        GaugeFunction::Table { r, h } => table_integral(r, h, n, upper)?,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub c: f64,
    pub n: Dimension,
    pub eps_grid: Vec<f64>,
    /// `int_0^{c eps} h / r^(n-1) dr` divided by `h(eps) / eps^(n-2)`.
    pub ratios: Vec<ExtReal>,
    /// `ratios[j+1] / ratios[j]`
    pub growth: Vec<f64>,
    /// Largest ratio on the grid.
    pub m_estimate: ExtReal,
    pub verdict: Verdict,
    pub divergent: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StarReport {
    pub c: f64,
    pub n: Dimension,
    pub eps_grid: Vec<f64>,
    /// `((1 / (c eps)) int_0^{c eps} F) / F(eps)` with `F(r) = h(r) / r^(n-1)`.
    pub ratios: Vec<ExtReal>,
    pub growth: Vec<f64>,
    pub limsup_estimate: ExtReal,
    pub verdict: Verdict,
    pub divergent: bool,
    pub admissible_verdict: Verdict,
    /// Whether the two verdicts agree.
    pub consistent: bool,
}

fn check_inputs(c: f64, eps_grid: &[f64]) -> Result<()> {
    if !(c > 4.0) || !c.is_finite() {
        return Err(invalid(format!("c = {c}: the admissibility hypothesis requires a constant c > 4")));
    }
    if eps_grid.len() < MIN_GRID {
        return Err(invalid(format!("eps grid needs at least {MIN_GRID} points")));
    }
    if eps_grid.iter().any(|e| !(*e > 0.0)) || eps_grid.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(invalid("eps grid must be positive and strictly decreasing"));
    }
    Ok(())
}

/// Three-state verdict from a ratio sequence along a shrinking grid.
fn classify(ratios: &[ExtReal]) -> (Vec<f64>, Verdict, bool) {
    let divergent = ratios.iter().any(|r| !r.is_finite());
    if divergent {
        return (Vec::new(), Verdict::Fail, true);
    }
    let vals: Vec<f64> = ratios.iter().map(|r| r.to_f64()).collect();
    let growth: Vec<f64> = vals.windows(2).map(|w| w[1] / w[0]).collect();
    let tail = &growth[growth.len() / 2..];
    let verdict = if tail.iter().all(|g| *g > GROWTH_THRESHOLD) {
        Verdict::Fail
    } else if tail.iter().all(|g| *g <= GROWTH_THRESHOLD) {
        let non_increasing = tail.iter().all(|g| *g <= 1.0 + 1e-9);
        // growth that is still present must be slowing down
        let decelerating = tail.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        if non_increasing || decelerating {
            Verdict::Pass
        } else {
            Verdict::Inconclusive
        }
    } else {
        Verdict::Inconclusive
    };
    (growth, verdict, false)
}

fn max_ratio(ratios: &[ExtReal]) -> ExtReal {
    ratios.iter().copied().fold(ExtReal::NegInf, ExtReal::max)
}

/// Ratios of the admissibility inequality along `eps_grid`.
///
/// Outer scalings cancel between numerator and denominator and are
/// stripped before evaluation, so `a h` and `h` give identical ratios.
pub fn check_admissible(h: &GaugeFunction, n: Dimension, c: f64, eps_grid: &[f64]) -> Result<AdmissibilityReport> {
    check_inputs(c, eps_grid)?;
    h.validate()?;
    let (core, _) = h.strip_scale();
    let depth = n.get() as f64 - 2.0;
    let ratios = eps_grid
        .iter()
        .map(|&e| {
            let num = integral(core, n.get(), c * e)?;
            let den = core.eval(e)? / e.powf(depth);
            Ok(match num {
                ExtReal::Finite(v) => ExtReal::Finite(v / den),
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (growth, verdict, divergent) = classify(&ratios);
    Ok(AdmissibilityReport {
        c,
        n,
        eps_grid: eps_grid.to_vec(),
        m_estimate: max_ratio(&ratios),
        ratios,
        growth,
        verdict,
        divergent,
    })
}

/// The one-dimensional mean-value form of admissibility for
/// `F(r) = h(r) / r^(n-1)`, cross-checked against [`check_admissible`].
pub fn check_star(h: &GaugeFunction, n: Dimension, c: f64, eps_grid: &[f64]) -> Result<StarReport> {
    check_inputs(c, eps_grid)?;
    h.validate()?;
    let (core, _) = h.strip_scale();
    let big_f = |r: f64| -> Result<f64> { Ok(core.eval(r)? / r.powi(n.get() as i32 - 1)) };
    let ratios = eps_grid
        .iter()
        .map(|&e| {
            let mean = integral(core, n.get(), c * e)? * (1.0 / (c * e));
            Ok(match mean {
                ExtReal::Finite(v) => ExtReal::Finite(v / big_f(e)?),
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (growth, verdict, divergent) = classify(&ratios);
    let admissible_verdict = check_admissible(h, n, c, eps_grid)?.verdict;
    Ok(StarReport {
        c,
        n,
        eps_grid: eps_grid.to_vec(),
        limsup_estimate: max_ratio(&ratios),
        ratios,
        growth,
        verdict,
        divergent,
        admissible_verdict,
        consistent: verdict == admissible_verdict,
    })
}

/// `start * factor^j`, `j = 0..steps`.
pub fn geometric_grid(start: f64, factor: f64, steps: usize) -> Vec<f64> {
    (0..steps).map(|j| start * factor.powi(j as i32)).collect()
}
