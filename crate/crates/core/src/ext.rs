//! Extended reals.
//!
//! Subharmonic functions take values in `[-inf, +inf)`; potentials and
//! divergent integrals also need `+inf`. Infinite values are explicit
//! variants so that they never masquerade as floating point failures.

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    /// Maps `f64` infinities to the sentinels. NaN maps to `None`.
    pub fn from_f64(x: f64) -> Option<Self> {
        if x.is_nan() {
            None
        } else if x == f64::NEG_INFINITY {
            Some(ExtReal::NegInf)
        } else if x == f64::INFINITY {
            Some(ExtReal::PosInf)
        } else {
            Some(ExtReal::Finite(x))
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::NegInf => f64::NEG_INFINITY,
            ExtReal::Finite(x) => x,
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn is_neg_inf(self) -> bool {
        matches!(self, ExtReal::NegInf)
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// `|self - other|`, infinite when either side is infinite (and both are
    /// not the same infinity, in which case the distance is zero).
    pub fn distance(self, other: ExtReal) -> ExtReal {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite((a - b).abs()),
            (a, b) if a == b => ExtReal::ZERO,
            _ => ExtReal::PosInf,
        }
    }
}

impl From<f64> for ExtReal {
    fn from(x: f64) -> Self {
        ExtReal::from_f64(x).expect("NaN is not an extended real")
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.to_f64().partial_cmp(&other.to_f64())
    }
}

/// `(-inf) + finite = -inf`. Adding opposite infinities is undefined and panics.
impl Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: ExtReal) -> ExtReal {
        use ExtReal::*;
        match (self, rhs) {
            (Finite(a), Finite(b)) => ExtReal::from(a + b),
            (NegInf, PosInf) | (PosInf, NegInf) => {
                panic!("undefined sum of opposite infinities")
            }
            (NegInf, _) | (_, NegInf) => NegInf,
            (PosInf, _) | (_, PosInf) => PosInf,
        }
    }
}

impl Add<f64> for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: f64) -> ExtReal {
        self + ExtReal::from(rhs)
    }
}

impl Neg for ExtReal {
    type Output = ExtReal;

    fn neg(self) -> ExtReal {
        match self {
            ExtReal::NegInf => ExtReal::PosInf,
            ExtReal::Finite(x) => ExtReal::Finite(-x),
            ExtReal::PosInf => ExtReal::NegInf,
        }
    }
}

/// Scaling by a finite factor; `0 * inf` is taken as 0 (measure-theoretic convention).
impl Mul<f64> for ExtReal {
    type Output = ExtReal;

    fn mul(self, rhs: f64) -> ExtReal {
        match self {
            ExtReal::Finite(x) => ExtReal::from(x * rhs),
            _ if rhs == 0.0 => ExtReal::ZERO,
            inf if rhs > 0.0 => inf,
            inf => -inf,
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => f.write_str("-inf"),
            ExtReal::Finite(x) => write!(f, "{x}"),
            ExtReal::PosInf => f.write_str("+inf"),
        }
    }
}

// JSON has no infinities: finite values are numbers, the sentinels are the
// strings "-inf" and "+inf".
impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtReal::NegInf => s.serialize_str("-inf"),
            ExtReal::Finite(x) => s.serialize_f64(*x),
            ExtReal::PosInf => s.serialize_str("+inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(ExtReal::Finite(x)),
            Repr::Text(t) => match t.as_str() {
                "-inf" => Ok(ExtReal::NegInf),
                "+inf" | "inf" => Ok(ExtReal::PosInf),
                other => Err(de::Error::custom(format!("expected a number, \"-inf\" or \"+inf\", found {other:?}"))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sentinel_arithmetic() {
        assert_eq!(ExtReal::NegInf + 3.0, ExtReal::NegInf);
        assert_eq!(ExtReal::NegInf.max(ExtReal::Finite(-2.0)), ExtReal::Finite(-2.0));
        assert_eq!(ExtReal::NegInf * 0.5, ExtReal::NegInf);
        assert_eq!(ExtReal::NegInf * -1.0, ExtReal::PosInf);
        assert!(ExtReal::NegInf < ExtReal::Finite(-1e300));
    }

    #[test]
    fn json_sentinels() {
        let v = vec![ExtReal::NegInf, ExtReal::Finite(0.25), ExtReal::PosInf];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"["-inf",0.25,"+inf"]"#);
        let back: Vec<ExtReal> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}
