//! The fundamental-solution profile `g` and the constants of the Riesz
//! decomposition.
//!
//! `g(r) = -log r` in the plane and `g(r) = r^(2-n)` for `n > 2`. The kernel
//! is only defined for `r > 0`; callers decide what a coincident point means
//! (potentials return `-inf`, averages of `g` return `+inf`).

use crate::error::{domain, invalid, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

/// Ambient dimension `n >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Dimension(usize);

impl Dimension {
    pub const PLANE: Dimension = Dimension(2);
    pub const SPACE: Dimension = Dimension(3);

    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(invalid(format!("dimension must be at least 2, got {n}")));
        }
        Ok(Dimension(n))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// `max(1, n - 2)`
    pub fn kernel_factor(self) -> f64 {
        (self.0.saturating_sub(2)).max(1) as f64
    }
}

impl TryFrom<usize> for Dimension {
    type Error = crate::Error;

    fn try_from(n: usize) -> Result<Self> {
        Dimension::new(n)
    }
}

impl From<Dimension> for usize {
    fn from(d: Dimension) -> usize {
        d.0
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn kernel_g(n: Dimension, r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(domain(format!("kernel g needs a finite r > 0, got {r}")));
    }
    Ok(kernel_unchecked(n, r))
}

#[inline]
pub(crate) fn kernel_unchecked(n: Dimension, r: f64) -> f64 {
    match n.0 {
        2 => -r.ln(),
        3 => 1.0 / r,
        4 => 1.0 / (r * r),
        k => r.powi(2 - k as i32),
    }
}

/// Inverse of [`kernel_g`]: `e^(-t)` in the plane, `t^(-1/(n-2))` otherwise.
pub fn kernel_g_inv(n: Dimension, t: f64) -> Result<f64> {
    if t.is_nan() {
        return Err(domain("kernel inverse of NaN"));
    }
    if n.0 == 2 {
        return Ok((-t).exp());
    }
    if !(t > 0.0) {
        return Err(domain(format!("kernel inverse needs t > 0 when n > 2, got {t}")));
    }
    Ok(t.powf(-1.0 / (n.0 as f64 - 2.0)))
}

/// `Gamma(n/2)` by the integer / half-integer recurrence.
pub(crate) fn gamma_half(n: usize) -> f64 {
    let (mut value, mut arg) = if n.is_multiple_of(2) { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    let target = n as f64 / 2.0;
    while arg < target {
        value *= arg;
        arg += 1.0;
    }
    value
}

/// Area of the unit sphere `S^(n-1)`: `2 pi^(n/2) / Gamma(n/2)`.
pub fn unit_sphere_area(n: Dimension) -> f64 {
    2.0 * PI.powf(n.0 as f64 / 2.0) / gamma_half(n.0)
}

/// `max(1, n-2) * area(S^(n-1))`, the denominator of the Riesz decomposition.
pub fn riesz_normalization(n: Dimension) -> f64 {
    n.kernel_factor() * unit_sphere_area(n)
}
