//! Extended real numbers over exact rationals.

use std::fmt;
use std::ops::Neg;

use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use crate::num::{fmt_q, to_f64, Q};

/// A rational scalar or one of the two infinities, totally ordered with
/// `-inf < r < +inf`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtReal {
    NegInf,
    Finite(Q),
    PosInf,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtArithError {
    #[error("(+inf) + (-inf) is undefined")]
    OppositeInfinities,
    #[error("0 * inf is undefined")]
    ZeroTimesInfinity,
}

impl ExtReal {
    pub fn finite(&self) -> Option<&Q> {
        match self {
            ExtReal::Finite(q) => Some(q),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtReal::NegInf => f64::NEG_INFINITY,
            ExtReal::Finite(q) => to_f64(q),
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    pub fn checked_add(&self, other: &ExtReal) -> Result<ExtReal, ExtArithError> {
        use ExtReal::*;
        Ok(match (self, other) {
            (Finite(a), Finite(b)) => Finite(a + b),
            (PosInf, NegInf) | (NegInf, PosInf) => return Err(ExtArithError::OppositeInfinities),
            (PosInf, _) | (_, PosInf) => PosInf,
            (NegInf, _) | (_, NegInf) => NegInf,
        })
    }

    /// Multiplication by a finite rational; `0 * inf` is rejected.
    pub fn scale(&self, k: &Q) -> Result<ExtReal, ExtArithError> {
        use ExtReal::*;
        Ok(match self {
            Finite(a) => Finite(a * k),
            inf if k.is_zero() => {
                let _ = inf;
                return Err(ExtArithError::ZeroTimesInfinity);
            }
            PosInf if k.is_positive() => PosInf,
            PosInf => NegInf,
            NegInf if k.is_positive() => NegInf,
            NegInf => PosInf,
        })
    }

    pub fn shift(&self, t: &Q) -> ExtReal {
        match self {
            ExtReal::Finite(a) => ExtReal::Finite(a + t),
            other => other.clone(),
        }
    }

    /// Midpoint of two extended reals, `None` for opposite infinities.
    pub fn midpoint(a: &ExtReal, b: &ExtReal) -> Option<ExtReal> {
        let sum = a.checked_add(b).ok()?;
        Some(match sum {
            ExtReal::Finite(s) => ExtReal::Finite(s / Q::from_integer(2.into())),
            inf => inf,
        })
    }
}

impl From<Q> for ExtReal {
    fn from(q: Q) -> Self {
        ExtReal::Finite(q)
    }
}

impl Neg for ExtReal {
    type Output = ExtReal;
    fn neg(self) -> ExtReal {
        match self {
            ExtReal::NegInf => ExtReal::PosInf,
            ExtReal::Finite(q) => ExtReal::Finite(-q),
            ExtReal::PosInf => ExtReal::NegInf,
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => write!(f, "-inf"),
            ExtReal::Finite(q) => write!(f, "{}", fmt_q(q)),
            ExtReal::PosInf => write!(f, "+inf"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
