//! Coefficient field: exact rational functions in `s = q^(1/2)` and floats at fixed `z = ln q`.

mod coeff;
mod halfint;
mod poly;
mod qscalar;
mod ratfunc;

pub use coeff::{Backend, Coeff};
pub use halfint::HalfInt;
pub use poly::{rat, rational_to_f64, LaurentPoly, Rational};
pub use qscalar::{eval_at, kappa, limit_q_to_1, qnum, sinh_ratio, QScalar};
pub use ratfunc::{leading_sign, RatFunc};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScalarError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole at z = {z}")]
    PoleAtZ { z: f64 },
    #[error("pole at q = 1: {0}")]
    PoleAtOne(String),
    #[error("float values evaluated at different z ({0} vs {1})")]
    MismatchedZ(f64, f64),
    #[error("exact value required")]
    NotExact,
    #[error("float backend requires z != 0")]
    ZeroZ,
}
