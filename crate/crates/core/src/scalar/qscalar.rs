use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::halfint::HalfInt;
use super::poly::{LaurentPoly, Rational};
use super::ratfunc::RatFunc;
use super::ScalarError;

impl RatFunc {
    /// `[x]_q = (q^x - q^-x) / (q - q^-1)`.
    pub fn qnum(x: HalfInt) -> RatFunc {
        let t = x.twice();
        let num = LaurentPoly::from_terms([(t, 1), (-t, -1)]);
        let den = LaurentPoly::from_terms([(2, 1), (-2, -1)]);
        RatFunc::new(num, den).expect("nonzero denominator")
    }

    /// `κ = 1 / (q^(1/2) + q^(-1/2))`.
    pub fn kappa() -> RatFunc {
        RatFunc::new(LaurentPoly::s_pow(1), LaurentPoly::from_terms([(2, 1), (0, 1)])).expect("nonzero denominator")
    }

    /// `sinh^p(z x) / sinh^p(z)`.
    pub fn sinh_ratio(x: HalfInt, p: u32) -> RatFunc {
        Self::qnum(x).pow(p as i32).expect("nonnegative power")
    }

    /// `cosh(z x)`, i.e. `(q^x + q^-x) / 2`.
    pub fn cosh_z(x: HalfInt) -> RatFunc {
        let t = x.twice();
        RatFunc::from_poly(LaurentPoly::from_terms([(t, 1), (-t, 1)]).scale(&Rational::new(1.into(), 2.into())))
    }

    /// `sinh(z x)`, i.e. `(q^x - q^-x) / 2`.
    pub fn sinh_z(x: HalfInt) -> RatFunc {
        let t = x.twice();
        RatFunc::from_poly(LaurentPoly::from_terms([(t, 1), (-t, -1)]).scale(&Rational::new(1.into(), 2.into())))
    }

    /// `e^(z x) = q^x`.
    pub fn exp_z(x: HalfInt) -> RatFunc {
        RatFunc::s_pow(x.twice())
    }
}

/// An element of the coefficient field: exact, or a float evaluated at a fixed `z`.
#[derive(Clone, Debug, PartialEq)]
pub enum QScalar {
    Exact(RatFunc),
    Float { value: f64, z: f64 },
}

impl QScalar {
    pub fn exact(r: RatFunc) -> Self {
        QScalar::Exact(r)
    }

    pub fn float(value: f64, z: f64) -> Self {
        QScalar::Float { value, z }
    }

    pub fn as_exact(&self) -> Option<&RatFunc> {
        match self {
            QScalar::Exact(r) => Some(r),
            QScalar::Float { .. } => None,
        }
    }

    pub fn z(&self) -> Option<f64> {
        match self {
            QScalar::Exact(_) => None,
            QScalar::Float { z, .. } => Some(*z),
        }
    }

    /// Numeric value; exact values need a `z` to be evaluated.
    pub fn value_at(&self, z: f64) -> Result<f64, ScalarError> {
        match self {
            QScalar::Exact(r) => r.eval_f64((z / 2.0).exp()).ok_or(ScalarError::PoleAtZ { z }),
            QScalar::Float { value, z: z0 } if *z0 == z => Ok(*value),
            QScalar::Float { z: z0, .. } => Err(ScalarError::MismatchedZ(*z0, z)),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            QScalar::Exact(r) => r.is_zero(),
            QScalar::Float { value, .. } => *value == 0.0,
        }
    }

    fn binary(
        &self,
        other: &Self,
        exact: impl Fn(&RatFunc, &RatFunc) -> Result<RatFunc, ScalarError>,
        float: impl Fn(f64, f64) -> f64,
    ) -> Result<QScalar, ScalarError> {
        match (self, other) {
            (QScalar::Exact(a), QScalar::Exact(b)) => Ok(QScalar::Exact(exact(a, b)?)),
            (QScalar::Float { value: a, z: za }, QScalar::Float { value: b, z: zb }) => {
                if za != zb {
                    return Err(ScalarError::MismatchedZ(*za, *zb));
                }
                Ok(QScalar::float(float(*a, *b), *za))
            }
            (QScalar::Exact(_), QScalar::Float { z, .. }) => eval_at(self, *z)?.binary(other, exact, float),
            (QScalar::Float { z, .. }, QScalar::Exact(_)) => self.binary(&eval_at(other, *z)?, exact, float),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<QScalar, ScalarError> {
        self.binary(other, |a, b| Ok(a.add_ref(b)), |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Self) -> Result<QScalar, ScalarError> {
        self.binary(other, |a, b| Ok(a.sub_ref(b)), |a, b| a - b)
    }

    pub fn try_mul(&self, other: &Self) -> Result<QScalar, ScalarError> {
        self.binary(other, |a, b| Ok(a.mul_ref(b)), |a, b| a * b)
    }

    pub fn try_div(&self, other: &Self) -> Result<QScalar, ScalarError> {
        if other.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        self.binary(other, |a, b| a.div_ref(b), |a, b| a / b)
    }
}

impl From<RatFunc> for QScalar {
    fn from(r: RatFunc) -> Self {
        QScalar::Exact(r)
    }
}

macro_rules! qscalar_op {
    ($tr:ident, $m:ident, $try:ident) => {
        impl $tr for &QScalar {
            type Output = QScalar;
            /// Panics when combining floats at different `z`; see the `try_` methods.
            fn $m(self, rhs: &QScalar) -> QScalar {
                self.$try(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr for QScalar {
            type Output = QScalar;
            fn $m(self, rhs: QScalar) -> QScalar {
                (&self).$m(&rhs)
            }
        }
    };
}
qscalar_op!(Add, add, try_add);
qscalar_op!(Sub, sub, try_sub);
qscalar_op!(Mul, mul, try_mul);
qscalar_op!(Div, div, try_div);

impl Neg for &QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        match self {
            QScalar::Exact(r) => QScalar::Exact(r.neg_ref()),
            QScalar::Float { value, z } => QScalar::float(-value, *z),
        }
    }
}

impl Neg for QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        -&self
    }
}

impl fmt::Display for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QScalar::Exact(r) => write!(f, "{r}"),
            QScalar::Float { value, .. } => write!(f, "{value}"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum Wire {
    Exact { exact: String },
    Float { value: f64, z: f64 },
}

impl Serialize for QScalar {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self {
            QScalar::Exact(r) => Wire::Exact { exact: r.to_string() },
            QScalar::Float { value, z } => Wire::Float { value: *value, z: *z },
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for QScalar {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        match Wire::deserialize(de)? {
            Wire::Exact { exact } => exact.parse().map(QScalar::Exact).map_err(serde::de::Error::custom),
            Wire::Float { value, z } => Ok(QScalar::float(value, z)),
        }
    }
}

pub fn qnum(x: HalfInt) -> QScalar {
    QScalar::Exact(RatFunc::qnum(x))
}

pub fn kappa() -> QScalar {
    QScalar::Exact(RatFunc::kappa())
}

pub fn sinh_ratio(x: HalfInt, p: u32) -> QScalar {
    QScalar::Exact(RatFunc::sinh_ratio(x, p))
}

/// Evaluate an exact value at `s = e^(z/2)`.
pub fn eval_at(x: &QScalar, z: f64) -> Result<QScalar, ScalarError> {
    match x {
        QScalar::Exact(_) => Ok(QScalar::float(x.value_at(z)?, z)),
        QScalar::Float { .. } => Err(ScalarError::NotExact),
    }
}

/// Value at `q = 1` of the reduced fraction.
pub fn limit_q_to_1(x: &QScalar) -> Result<Rational, ScalarError> {
    match x {
        QScalar::Exact(r) => r.eval_at_one().ok_or_else(|| ScalarError::PoleAtOne(r.to_string())),
        QScalar::Float { .. } => Err(ScalarError::NotExact),
    }
}
