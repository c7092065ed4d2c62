//! Subharmonic functions given by Riesz data, sphere means and the
//! sub-mean-value certificate, and the discrete layer-cake identity.

mod layer_cake;
mod sphere;

pub use layer_cake::{layer_cake_rhs, verify_layer_cake, LayerCake};
pub use sphere::{
    sphere_mean, sphere_mean_converged, sphere_nodes, submean_check, SphereMean, SubmeanEntry, SubmeanReport,
    SUBMEAN_TOL,
};

use crate::error::{check_dim, domain, invalid, Result};
use crate::ext::ExtReal;
use crate::field::Field;
use crate::kernel::{kernel_unchecked, riesz_normalization, Dimension};
use crate::numeric::{dist, norm, CompensatedSum};
use crate::point::Point;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Re,
    Im,
}

/// Harmonic polynomials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum HarmonicSpec {
    Constant {
        value: f64,
    },
    Linear {
        coefficients: Vec<f64>,
    },
    /// `Re` or `Im` of `(x + iy)^m`, plane only.
    PlanarPower {
        m: u32,
        part: Part,
    },
    Sum {
        terms: Vec<HarmonicSpec>,
    },
}

impl HarmonicSpec {
    pub fn zero() -> Self {
        HarmonicSpec::Constant { value: 0.0 }
    }

    pub fn validate(&self, dim: Dimension) -> Result<()> {
        match self {
            HarmonicSpec::Constant { value } if !value.is_finite() => Err(invalid("constant must be finite")),
            HarmonicSpec::Constant { .. } => Ok(()),
            HarmonicSpec::Linear { coefficients } => check_dim(dim.get(), coefficients.len()),
            HarmonicSpec::PlanarPower { m, .. } => {
                if dim.get() != 2 {
                    Err(invalid(format!("planar-power is only harmonic in the plane (n = {dim})")))
                } else if *m == 0 {
                    Err(invalid("planar-power needs m >= 1"))
                } else {
                    Ok(())
                }
            }
            HarmonicSpec::Sum { terms } => terms.iter().try_for_each(|t| t.validate(dim)),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        match self {
            HarmonicSpec::Constant { value } => Ok(*value),
            HarmonicSpec::Linear { coefficients } => {
                check_dim(coefficients.len(), x.len())?;
                Ok(coefficients.iter().zip(x).map(|(a, b)| a * b).sum())
            }
            HarmonicSpec::PlanarPower { m, part } => {
                if x.len() != 2 {
                    return Err(invalid("planar-power requested outside the plane"));
                }
                let (mut re, mut im) = (1.0, 0.0);
                for _ in 0..*m {
                    (re, im) = (re * x[0] - im * x[1], re * x[1] + im * x[0]);
                }
                Ok(match part {
                    Part::Re => re,
                    Part::Im => im,
                })
            }
            HarmonicSpec::Sum { terms } => terms.iter().map(|t| t.eval(x)).sum(),
        }
    }
}

/// Evaluates a harmonic polynomial; `planar-power` outside the plane is an error.
pub fn harmonic_eval(h: &HarmonicSpec, x: &[f64]) -> Result<f64> {
    h.eval(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuAtom {
    pub p: Point,
    pub m: f64,
}

/// `u(x) = -(1 / (max(1, n-2) |S^(n-1)|)) sum_j m_j g(|x - w_j|) + phi(x)` on
/// the ball `B(0, domain_radius)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RieszFunction {
    dim: Dimension,
    domain_radius: f64,
    nu: Vec<NuAtom>,
    harmonic: HarmonicSpec,
}

impl RieszFunction {
    pub fn new(dim: Dimension, nu: Vec<(Point, f64)>, harmonic: HarmonicSpec, domain_radius: f64) -> Result<Self> {
        let rf = Self::new_unchecked(dim, nu, harmonic, domain_radius);
        rf.validate()?;
        Ok(rf)
    }

    /// Skips the nonnegative-mass and support checks. Only for building
    /// deliberately invalid functions in tests.
    #[doc(hidden)]
    pub fn new_unchecked(dim: Dimension, nu: Vec<(Point, f64)>, harmonic: HarmonicSpec, domain_radius: f64) -> Self {
        RieszFunction { dim, domain_radius, nu: nu.into_iter().map(|(p, m)| NuAtom { p, m }).collect(), harmonic }
    }

    pub fn harmonic_only(dim: Dimension, harmonic: HarmonicSpec, domain_radius: f64) -> Result<Self> {
        Self::new(dim, Vec::new(), harmonic, domain_radius)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.domain_radius > 0.0) {
            return Err(invalid("domain radius must be positive"));
        }
        self.harmonic.validate(self.dim)?;
        for a in &self.nu {
            check_dim(self.dim.get(), a.p.dim())?;
            if !(a.m >= 0.0) || !a.m.is_finite() {
                return Err(invalid(format!("Riesz masses must be finite and nonnegative, got {}", a.m)));
            }
            if !(a.p.norm() < self.domain_radius) {
                return Err(invalid(format!("Riesz atom {} lies outside the domain ball", a.p)));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn domain_radius(&self) -> f64 {
        self.domain_radius
    }

    pub fn nu(&self) -> &[NuAtom] {
        &self.nu
    }

    pub fn harmonic(&self) -> &HarmonicSpec {
        &self.harmonic
    }

    pub fn eval(&self, x: &[f64]) -> Result<ExtReal> {
        check_dim(self.dim.get(), x.len())?;
        if !(norm(x) < self.domain_radius) {
            return Err(domain(format!("point {:?} is outside the domain ball of radius {}", x, self.domain_radius)));
        }
        let phi = self.harmonic.eval(x)?;
        let mut acc = CompensatedSum::new();
        for a in &self.nu {
            if a.m == 0.0 {
                continue;
            }
            let r = dist(x, &a.p);
            if r == 0.0 {
                // negative masses only come from new_unchecked
                if a.m > 0.0 {
                    return Ok(ExtReal::NegInf);
                }
                return Ok(ExtReal::PosInf);
            }
            acc.add(a.m * kernel_unchecked(self.dim, r));
        }
        Ok(ExtReal::from(-acc.value() / riesz_normalization(self.dim) + phi))
    }

    pub fn to_json(&self) -> Result<String> {
        crate::report::to_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rf: RieszFunction = serde_json::from_str(text)?;
        rf.validate()?;
        Ok(rf)
    }
}

/// Free-function form of [`RieszFunction::eval`].
pub fn eval_riesz(rf: &RieszFunction, x: &[f64]) -> Result<ExtReal> {
    rf.eval(x)
}

impl Field for RieszFunction {
    fn value(&self, x: &[f64]) -> Result<ExtReal> {
        self.eval(x)
    }

    fn dim(&self) -> Option<usize> {
        Some(self.dim.get())
    }

    fn contains_ball(&self, x: &[f64], r: f64) -> bool {
        norm(x) + r < self.domain_radius
    }
}

impl Field for HarmonicSpec {
    fn value(&self, x: &[f64]) -> Result<ExtReal> {
        self.eval(x).map(ExtReal::from)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn e1_linear() -> HarmonicSpec {
        HarmonicSpec::Linear { coefficients: vec![1.0, 0.0] }
    }

    #[test]
    fn harmonic_examples() {
        assert_eq!(HarmonicSpec::Constant { value: -2.0 }.eval(&[3.0, 4.0]).unwrap(), -2.0);
        let sq = HarmonicSpec::PlanarPower { m: 2, part: Part::Re };
        assert_eq!(sq.eval(&[1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(sq.eval(&[2.0, 1.0]).unwrap(), 3.0);
        let im = HarmonicSpec::PlanarPower { m: 2, part: Part::Im };
        assert_eq!(im.eval(&[2.0, 1.0]).unwrap(), 4.0);
        let lin = HarmonicSpec::Linear { coefficients: vec![1.0, 2.0, 3.0] };
        assert!((lin.eval(&[0.1, 0.1, 0.1]).unwrap() - 0.6).abs() < 1e-15);
        assert!(sq.eval(&[1.0, 1.0, 1.0]).is_err());
        assert!(sq.validate(Dimension::SPACE).is_err());
    }

    #[test]
    fn riesz_examples() {
        let rf = RieszFunction::harmonic_only(Dimension::PLANE, e1_linear(), 1.0).unwrap();
        assert_eq!(rf.eval(&[0.3, 0.0]).unwrap(), ExtReal::Finite(0.3));

        let single =
            RieszFunction::new(Dimension::PLANE, vec![(Point::origin(2), 2.0 * PI)], HarmonicSpec::zero(), 1.0)
                .unwrap();
        let v = single.eval(&[0.3, 0.4]).unwrap().finite().unwrap();
        assert!((v - (-(2.0f64).ln())).abs() < 1e-14);
        assert_eq!(single.eval(&[0.0, 0.0]).unwrap(), ExtReal::NegInf);
        assert!(single.eval(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn riesz_invariants() {
        let neg = RieszFunction::new(Dimension::PLANE, vec![(Point::origin(2), -1.0)], HarmonicSpec::zero(), 1.0);
        assert!(neg.is_err());
        let outside =
            RieszFunction::new(Dimension::PLANE, vec![(Point::from([2.0, 0.0]), 1.0)], HarmonicSpec::zero(), 1.0);
        assert!(outside.is_err());
    }

    #[test]
    fn decomposition_is_linear() {
        let a = (Point::from([0.1, 0.2, -0.3]), 1.5);
        let b = (Point::from([-0.4, 0.0, 0.2]), 0.7);
        let h = HarmonicSpec::Linear { coefficients: vec![0.5, -1.0, 2.0] };
        let d = Dimension::SPACE;
        let both = RieszFunction::new(d, vec![a.clone(), b.clone()], h.clone(), 1.0).unwrap();
        let only_a = RieszFunction::new(d, vec![a], HarmonicSpec::zero(), 1.0).unwrap();
        let only_b = RieszFunction::new(d, vec![b], HarmonicSpec::zero(), 1.0).unwrap();
        let x = [0.3, 0.3, 0.3];
        let lhs = both.eval(&x).unwrap().finite().unwrap();
        let rhs = only_a.eval(&x).unwrap().finite().unwrap()
            + only_b.eval(&x).unwrap().finite().unwrap()
            + h.eval(&x).unwrap();
        assert!((lhs - rhs).abs() <= 1e-15 * lhs.abs().max(1.0));
    }

    #[test]
    fn json_schema() {
        let rf = RieszFunction::new(
            Dimension::PLANE,
            vec![(Point::from([0.1, 0.2]), 3.0)],
            HarmonicSpec::PlanarPower { m: 2, part: Part::Re },
            2.0,
        )
        .unwrap();
        let text = rf.to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["dim"], 2);
        assert_eq!(v["harmonic"]["kind"], "planar-power");
        assert_eq!(v["harmonic"]["part"], "re");
        assert!(v["nu"][0]["m"].is_number());
        assert_eq!(RieszFunction::from_json(&text).unwrap(), rf);
        let bad = text.replace("3.0000000000000000e0", "-3.0");
        assert!(RieszFunction::from_json(&bad).is_err());
    }
}
