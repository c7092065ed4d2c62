//! The co-dimension-2 counterexample in R^3.
//!
//! `mu_i` is length measure on `([-i, -1/i] u [1/i, i]) x {0} x {0}`, its
//! potential is `p_i(x) = -int |x - w|^-1 dmu_i(w)`, and `u_i = -p_i / p_i(0)`
//! is normalised so that `u_i(0) = -1`. The weighted sum
//! `u = sum_{i>=2} 2^-(i-1) u_i` is `-inf` on the punctured axis while
//! `u(0) = -1`, so `u~ = max(u, -2)` equals -2 almost everywhere on the axis
//! and -1 at the origin.
//!
//! Every line integral has a closed form (asinh off the axis, log on it), so
//! no quadrature enters the demonstration. The series is truncated at
//! `i = N`; the tail at the origin is exactly `2^(1-N)`.

use crate::error::{invalid, Result};
use crate::ext::ExtReal;
use crate::field::Field;
use crate::kernel::Dimension;
use crate::meanvalue::mean_value;
use crate::measure::segment_measure;
use crate::numeric::CompensatedSum;
use serde::{Deserialize, Serialize};

fn default_clamp() -> f64 {
    -2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleConfig {
    /// Last index of the truncated series (terms `i = 2..=N`).
    #[serde(rename = "N")]
    pub n_terms: u32,
    #[serde(default = "default_clamp")]
    pub clamp: f64,
}

impl CounterexampleConfig {
    pub fn new(n_terms: u32) -> Result<Self> {
        let cfg = CounterexampleConfig { n_terms, clamp: default_clamp() };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_clamp(mut self, clamp: f64) -> Result<Self> {
        self.clamp = clamp;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_terms < 2 {
            return Err(invalid(format!("series truncation N must be >= 2, got {}", self.n_terms)));
        }
        if !(self.clamp < -1.0) || !self.clamp.is_finite() {
            return Err(invalid(format!("clamp must be finite and < -1, got {}", self.clamp)));
        }
        Ok(())
    }

    /// `2^(1-N)`, the omitted tail of the series at the origin.
    pub fn tail_bound(&self) -> f64 {
        2f64.powi(1 - self.n_terms as i32)
    }
}

/// `int_a^b dt / sqrt(t^2 + rho^2)` for `a < b`; `+inf` when `rho = 0` and
/// `0` lies in `[a, b]`.
fn line_integral(a: f64, b: f64, rho: f64) -> f64 {
    debug_assert!(a < b);
    if a > 0.0 {
        ((b + b.hypot(rho)) / (a + a.hypot(rho))).ln()
    } else if b < 0.0 {
        ((-a + a.hypot(rho)) / (-b + b.hypot(rho))).ln()
    } else if rho == 0.0 {
        f64::INFINITY
    } else {
        ((b + b.hypot(rho)) / rho).ln() + ((-a + a.hypot(rho)) / rho).ln()
    }
}

fn check_point(x: &[f64]) -> Result<()> {
    crate::error::check_dim(3, x.len())
}

/// The potential `p_{mu_i}(x)` in closed form.
pub fn p_mu_i(i: u32, x: &[f64]) -> Result<ExtReal> {
    if i < 2 {
        return Err(invalid(format!("series index must be >= 2, got {i}")));
    }
    check_point(x)?;
    Ok(p_mu_unchecked(i, x))
}

fn p_mu_unchecked(i: u32, x: &[f64]) -> ExtReal {
    let (s, rho) = (x[0], x[1].hypot(x[2]));
    let (inner, outer) = (1.0 / i as f64, i as f64);
    let total = line_integral(inner - s, outer - s, rho) + line_integral(-outer - s, -inner - s, rho);
    ExtReal::from(-total)
}

/// `u_i = -p_i / p_i(0)`; exactly -1 at the origin.
pub fn u_i(i: u32, x: &[f64]) -> Result<ExtReal> {
    let p = p_mu_i(i, x)?;
    let p0 = p_mu_unchecked(i, &[0.0; 3]).finite().expect("p_i(0) is finite");
    Ok(normalise(p, p0))
}

fn normalise(p: ExtReal, p0: f64) -> ExtReal {
    match p {
        ExtReal::Finite(v) => ExtReal::Finite(-(v / p0)),
        // p0 < 0, so -p / p0 keeps the sign of p
        other => other,
    }
}

fn on_truncated_support(cfg: &CounterexampleConfig, x: &[f64]) -> bool {
    let s = x[0].abs();
    x[1] == 0.0 && x[2] == 0.0 && s >= 1.0 / cfg.n_terms as f64 && s <= cfg.n_terms as f64
}

/// `sum_{i=2}^N 2^-(i-1) u_i(x)`.
pub fn u_truncated(cfg: &CounterexampleConfig, x: &[f64]) -> Result<ExtReal> {
    cfg.validate()?;
    check_point(x)?;
    // The i = N term alone is -inf on [1/N, N] x {0} x {0}; every other term
    // is bounded above by 0.
    if on_truncated_support(cfg, x) {
        return Ok(ExtReal::NegInf);
    }
    let mut acc = CompensatedSum::new();
    let mut coeff = 1.0;
    for i in 2..=cfg.n_terms {
        coeff *= 0.5;
        let p0 = p_mu_unchecked(i, &[0.0; 3]).to_f64();
        match normalise(p_mu_unchecked(i, x), p0) {
            ExtReal::Finite(v) => acc.add(coeff * v),
            other => return Ok(other),
        }
    }
    Ok(ExtReal::from(acc.value()))
}

/// `max(u_truncated, clamp)`.
pub fn u_tilde(cfg: &CounterexampleConfig, x: &[f64]) -> Result<f64> {
    let u = u_truncated(cfg, x)?;
    Ok(u.max(ExtReal::Finite(cfg.clamp)).finite().expect("clamped value is finite"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Which {
    UTruncated,
    UTilde,
    /// The constant clamp value, `v~`.
    VTilde,
}

/// One of the counterexample functions as a [`Field`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleField {
    #[serde(flatten)]
    pub cfg: CounterexampleConfig,
    pub which: Which,
}

impl Field for CounterexampleField {
    fn value(&self, x: &[f64]) -> Result<ExtReal> {
        match self.which {
            Which::UTruncated => u_truncated(&self.cfg, x),
            Which::UTilde => u_tilde(&self.cfg, x).map(ExtReal::Finite),
            Which::VTilde => {
                check_point(x)?;
                Ok(ExtReal::Finite(self.cfg.clamp))
            }
        }
    }

    fn dim(&self) -> Option<usize> {
        Some(3)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CounterexampleReport {
    #[serde(rename = "N")]
    pub n_terms: u32,
    pub eps: f64,
    pub resolution: usize,
    pub clamp: f64,
    /// Mean of `u~` over `[-eps, eps] x {0} x {0}`.
    pub line_mean: f64,
    pub value_at_0: f64,
    /// `value_at_0 - line_mean`
    pub gap: f64,
    /// Slack `delta` in `line_mean <= clamp + delta`.
    pub delta: f64,
    /// Lower bound `-1 + 2^(1-N)` for `u~(0)`.
    pub value_bound: f64,
    /// Mass fraction of line atoms with `|s| < 1/N`.
    pub inner_mass_fraction: f64,
    pub mean_within_bound: bool,
    pub value_within_bound: bool,
    pub pass: bool,
}

/// Averages `u~` over a line segment through the origin and compares the
/// result with `u~(0)`.
///
/// `u~ <= 0` everywhere and `u~ = clamp` at line points with `|s| >= 1/N`,
/// so the line mean is at most `clamp * (1 - f)` where `f <= 1/(N eps) + 2/resolution`
/// is the mass fraction of the inner gap. That gives
/// `delta = |clamp| (1/(N eps) + 2/resolution)`.
pub fn counterexample_demo(cfg: &CounterexampleConfig, eps: f64, resolution: usize) -> Result<CounterexampleReport> {
    cfg.validate()?;
    let inner = 1.0 / cfg.n_terms as f64;
    if !(eps > inner) {
        return Err(invalid(format!("eps must exceed 1/N = {inner}, got {eps}")));
    }
    let line = segment_measure(Dimension::SPACE, -eps, eps, resolution)?;
    let field = CounterexampleField { cfg: *cfg, which: Which::UTilde };
    let origin = [0.0; 3];
    let mv = mean_value(&field, &line, &origin, eps * (1.0 + 1e-9))?;
    let line_mean = mv.value.finite().expect("u~ is bounded");
    let value_at_0 = u_tilde(cfg, &origin)?;
    let total = line.total_mass();
    let inner_mass: f64 = line.atoms().filter(|(p, _)| p[0].abs() < inner).map(|(_, w)| w).sum();
    let delta = cfg.clamp.abs() * (1.0 / (cfg.n_terms as f64 * eps) + 2.0 / resolution as f64);
    let value_bound = -1.0 + cfg.tail_bound();
    let mean_within_bound = line_mean <= cfg.clamp + delta;
    let value_within_bound = value_at_0 >= value_bound - 1e-15;
    let gap = value_at_0 - line_mean;
    Ok(CounterexampleReport {
        n_terms: cfg.n_terms,
        eps,
        resolution,
        clamp: cfg.clamp,
        line_mean,
        value_at_0,
        gap,
        delta,
        value_bound,
        inner_mass_fraction: inner_mass / total,
        mean_within_bound,
        value_within_bound,
        pass: mean_within_bound && value_within_bound && gap > 0.0,
    })
}
