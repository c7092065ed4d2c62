//! Scalar fields `R^n -> [-inf, +inf)` evaluated pointwise, and the JSON
//! description used by the command line.

use crate::counterexample::{CounterexampleConfig, CounterexampleField};
use crate::error::{invalid, Result};
use crate::ext::ExtReal;
use crate::numeric::dist;
use crate::point::Point;
use crate::potential::RieszFunction;
use serde::{Deserialize, Serialize};

/// A function that can be sampled at points.
pub trait Field {
    fn value(&self, x: &[f64]) -> Result<ExtReal>;

    /// Ambient dimension, when the field fixes one.
    fn dim(&self) -> Option<usize> {
        None
    }

    /// Whether the closed ball `B(x, r)` lies in the domain of definition.
    fn contains_ball(&self, _x: &[f64], _r: f64) -> bool {
        true
    }
}

impl<F> Field for F
where
    F: Fn(&[f64]) -> ExtReal,
{
    fn value(&self, x: &[f64]) -> Result<ExtReal> {
        Ok(self(x))
    }
}

/// Wrapper for plain `f64` closures.
pub struct RealFn<F>(pub F);

impl<F: Fn(&[f64]) -> f64> Field for RealFn<F> {
    fn value(&self, x: &[f64]) -> Result<ExtReal> {
        ExtReal::from_f64((self.0)(x)).ok_or_else(|| crate::error::domain("function returned NaN"))
    }
}

/// Serializable function description.
///
/// A bare Riesz document (`{"dim", "domain_radius", "nu", "harmonic"}`) is a
/// Riesz function; the other forms are single-key objects:
///
/// * `{"counterexample": {"N": 1000, "clamp": -2, "which": "u-tilde"}}`
/// * `{"bump": {"base": <function>, "center": [..], "scale": s}}`, meaning
///   `base(x) + s |x - center|^2`
/// * `{"sum": [<function>, ...]}`
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionSpec {
    Riesz(RieszFunction),
    Tagged(TaggedFunction),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaggedFunction {
    Counterexample(CounterexampleField),
    Bump { base: Box<FunctionSpec>, center: Vec<f64>, scale: f64 },
    Sum(Vec<FunctionSpec>),
}

impl FunctionSpec {
    /// Parses a function document. Syntax errors carry line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let tagged = value
            .as_object()
            .map(|o| o.len() == 1 && ["counterexample", "bump", "sum"].iter().any(|k| o.contains_key(*k)))
            .unwrap_or(false);
        let spec = if tagged {
            FunctionSpec::Tagged(serde_json::from_value(value)?)
        } else {
            FunctionSpec::Riesz(serde_json::from_value(value)?)
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn counterexample(cfg: CounterexampleConfig, which: crate::counterexample::Which) -> Self {
        FunctionSpec::Tagged(TaggedFunction::Counterexample(CounterexampleField { cfg, which }))
    }

    /// `base(x) + scale |x - center|^2`
    pub fn bump(base: FunctionSpec, center: Point, scale: f64) -> Self {
        FunctionSpec::Tagged(TaggedFunction::Bump { base: Box::new(base), center: center.into_inner(), scale })
    }

    pub fn to_json(&self) -> Result<String> {
        crate::report::to_json(self)
    }

    fn validate(&self) -> Result<()> {
        match self {
            FunctionSpec::Riesz(rf) => rf.validate(),
            FunctionSpec::Tagged(TaggedFunction::Counterexample(c)) => c.cfg.validate(),
            FunctionSpec::Tagged(TaggedFunction::Bump { base, center, scale }) => {
                base.validate()?;
                if let Some(n) = base.dim() {
                    crate::error::check_dim(n, center.len())?;
                }
                if !scale.is_finite() {
                    return Err(invalid("bump scale must be finite"));
                }
                Ok(())
            }
            FunctionSpec::Tagged(TaggedFunction::Sum(terms)) => {
                if terms.is_empty() {
                    return Err(invalid("sum needs at least one term"));
                }
                let dims: Vec<usize> = terms.iter().filter_map(|t| t.dim()).collect();
                if dims.windows(2).any(|w| w[0] != w[1]) {
                    return Err(invalid("sum terms disagree on dimension"));
                }
                terms.iter().try_for_each(|t| t.validate())
            }
        }
    }
}

impl Field for FunctionSpec {
    fn value(&self, x: &[f64]) -> Result<ExtReal> {
        match self {
            FunctionSpec::Riesz(rf) => rf.value(x),
            FunctionSpec::Tagged(TaggedFunction::Counterexample(c)) => c.value(x),
            FunctionSpec::Tagged(TaggedFunction::Bump { base, center, scale }) => {
                let d = dist(x, center);
                Ok(base.value(x)? + scale * d * d)
            }
            FunctionSpec::Tagged(TaggedFunction::Sum(terms)) => {
                let mut acc = ExtReal::ZERO;
                for t in terms {
                    acc = acc + t.value(x)?;
                }
                Ok(acc)
            }
        }
    }

    fn dim(&self) -> Option<usize> {
        match self {
            FunctionSpec::Riesz(rf) => Some(rf.dim().get()),
            FunctionSpec::Tagged(TaggedFunction::Counterexample(_)) => Some(3),
            FunctionSpec::Tagged(TaggedFunction::Bump { base, .. }) => base.dim(),
            FunctionSpec::Tagged(TaggedFunction::Sum(terms)) => terms.iter().find_map(|t| t.dim()),
        }
    }

    fn contains_ball(&self, x: &[f64], r: f64) -> bool {
        match self {
            FunctionSpec::Riesz(rf) => rf.contains_ball(x, r),
            FunctionSpec::Tagged(TaggedFunction::Counterexample(_)) => true,
            FunctionSpec::Tagged(TaggedFunction::Bump { base, .. }) => base.contains_ball(x, r),
            FunctionSpec::Tagged(TaggedFunction::Sum(terms)) => terms.iter().all(|t| t.contains_ball(x, r)),
        }
    }
}
