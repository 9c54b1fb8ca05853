//! Rational functions in `s`: quotients of Laurent polynomials in canonical form.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::poly::{LaurentPoly, Rational};
use super::ScalarError;

/// `num / den` with `den` monic, `s ∤ den`, and `gcd(num, den) = 1`.
/// Every value therefore has exactly one representation.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFunc {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl Default for RatFunc {
    fn default() -> Self {
        RatFunc::zero()
    }
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc { num: LaurentPoly::zero(), den: LaurentPoly::one() }
    }

    pub fn one() -> Self {
        Self::from_poly(LaurentPoly::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(n.into()))
    }

    pub fn from_rational(r: Rational) -> Self {
        Self::from_poly(LaurentPoly::constant(r))
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        RatFunc { num: p, den: LaurentPoly::one() }
    }

    /// `s^e`.
    pub fn s_pow(e: i64) -> Self {
        Self::from_poly(LaurentPoly::s_pow(e))
    }

    /// `q^e = s^(2e)` for half-integer `e` given as twice its value.
    pub fn q_pow_twice(twice: i64) -> Self {
        Self::s_pow(twice)
    }

    /// Build and normalize `num / den`.
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Self::normalize(num, den))
    }

    fn normalize(num: LaurentPoly, den: LaurentPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        // Move the power of s out of the denominator.
        let shift = den.low();
        let num = num.shift(-shift);
        let den = den.shift(-shift);
        if den.is_monomial() {
            let c = den.coeffs()[0].clone();
            return RatFunc { num: num.scale(&c.recip()), den: LaurentPoly::one() };
        }
        let g = LaurentPoly::poly_gcd(&num, &den);
        let (num, den) = if g.is_one() { (num, den) } else { (num.div_exact(&g), den.div_exact(&g)) };
        let lead = den.leading().expect("nonzero denominator").recip();
        RatFunc { num: num.scale(&lead), den: den.scale(&lead) }
    }

    pub fn numer(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denom(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    /// True when the denominator is 1.
    pub fn is_laurent(&self) -> bool {
        self.den.is_one()
    }

    /// The constant value, if this is a rational number.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        (self.is_laurent() && self.num.is_monomial() && self.num.low() == 0).then(|| self.num.coeffs()[0].clone())
    }

    pub fn neg_ref(&self) -> Self {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && other.den.is_one() {
            return Self::from_poly(self.num.add(&other.num));
        }
        if self.den == other.den {
            return Self::normalize(self.num.add(&other.num), self.den.clone());
        }
        let g = LaurentPoly::poly_gcd(&self.den, &other.den);
        let (bd, db) = if g.is_one() {
            (self.den.clone(), other.den.clone())
        } else {
            (self.den.div_exact(&g), other.den.div_exact(&g))
        };
        let num = self.num.mul(&db).add(&other.num.mul(&bd));
        Self::normalize(num, self.den.mul(&db))
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return Self::from_poly(self.num.mul(&other.num));
        }
        // Cross-cancel before multiplying to keep degrees small.
        let g1 = LaurentPoly::poly_gcd(&self.num, &other.den);
        let g2 = LaurentPoly::poly_gcd(&other.num, &self.den);
        let (a, d) = if g1.is_one() {
            (self.num.clone(), other.den.clone())
        } else {
            (self.num.div_exact(&g1), other.den.div_exact(&g1))
        };
        let (c, b) = if g2.is_one() {
            (other.num.clone(), self.den.clone())
        } else {
            (other.num.div_exact(&g2), self.den.div_exact(&g2))
        };
        let num = a.mul(&c);
        let den = b.mul(&d);
        let lead = den.leading().expect("nonzero denominator").recip();
        RatFunc { num: num.scale(&lead), den: den.scale(&lead) }
    }

    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Self::normalize(self.den.clone(), self.num.clone()))
    }

    pub fn div_ref(&self, other: &Self) -> Result<Self, ScalarError> {
        Ok(self.mul_ref(&other.inv()?))
    }

    pub fn scale_rational(&self, c: &Rational) -> Self {
        RatFunc { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn pow(&self, e: i32) -> Result<Self, ScalarError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let k = e.unsigned_abs();
        Ok(RatFunc { num: base.num.pow(k), den: base.den.pow(k) })
    }

    /// Value at real `s`; `None` if the denominator vanishes there.
    pub fn eval_f64(&self, s: f64) -> Option<f64> {
        let d = self.den.eval_f64(s);
        let scale = self.den.abs_eval_f64(s);
        if d == 0.0 || d.abs() <= 1e-14 * scale {
            return None;
        }
        Some(self.num.eval_f64(s) / d)
    }

    /// Value at `s = 1`; `None` for a genuine pole there.
    pub fn eval_at_one(&self) -> Option<Rational> {
        let d = self.den.eval_at_one();
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval_at_one() / d)
    }

    /// Substitute `s → 1/s`.
    pub fn invert_variable(&self) -> Self {
        let flip = |p: &LaurentPoly| {
            let mut c = p.coeffs().to_vec();
            c.reverse();
            LaurentPoly::from_coeffs(-p.high(), c)
        };
        Self::normalize(flip(&self.num), flip(&self.den))
    }

    /// Total size of the coefficients, for cost heuristics.
    pub fn size(&self) -> usize {
        self.num.coeffs().len() + self.den.coeffs().len()
    }

    /// Integer-coefficient numerator and denominator with a positive leading
    /// denominator coefficient and coprime contents.
    pub fn integer_form(&self) -> (LaurentPoly, LaurentPoly) {
        let l = num_integer::Integer::lcm(&self.num.denominator_lcm(), &self.den.denominator_lcm());
        let lr = Rational::from_integer(l);
        let num = self.num.scale(&lr);
        let den = self.den.scale(&lr);
        let g = num_integer::Integer::gcd(&num.content_gcd(), &den.content_gcd());
        if g.is_one() || g.is_zero() {
            return (num, den);
        }
        let gi = Rational::new(BigInt::one(), g);
        (num.scale(&gi), den.scale(&gi))
    }
}

impl fmt::Display for RatFunc {
    /// Laurent polynomials print as a bare sum of terms; proper fractions as
    /// `(num)/(den)` with integer coefficients.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let (n, d) = self.integer_form();
        write!(f, "({n})/({d})")
    }
}

impl FromStr for RatFunc {
    type Err = ScalarError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut p = Parser { src: text.as_bytes(), pos: 0, text };
        let v = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("trailing input"));
        }
        Ok(v)
    }
}

/// Recursive-descent parser for the scalar text form.
///
/// ```text
/// expr   := term (('+'|'-') term)*
/// term   := factor ('*' factor | '/' factor)*
/// factor := '-' factor | number | 's' ('^' int)? | '(' expr ')'
/// ```
struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    text: &'a str,
}

impl Parser<'_> {
    fn err(&self, what: &str) -> ScalarError {
        ScalarError::Parse(format!("{what} at byte {} in {:?}", self.pos, self.text))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<RatFunc, ScalarError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add_ref(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub_ref(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RatFunc, ScalarError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul_ref(&self.factor()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.factor()?;
                    acc = acc.div_ref(&d).map_err(|_| self.err("division by zero"))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<RatFunc, ScalarError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.factor()?.neg_ref())
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(b's') => {
                self.pos += 1;
                if self.peek() == Some(b'^') {
                    self.pos += 1;
                    let e = self.int()?;
                    let e = i64::try_from(e).map_err(|_| self.err("exponent too large"))?;
                    Ok(RatFunc::s_pow(e))
                } else {
                    Ok(RatFunc::s_pow(1))
                }
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.int()?;
                Ok(RatFunc::from_rational(Rational::from_integer(n)))
            }
            _ => Err(self.err("expected a term")),
        }
    }

    fn int(&mut self) -> Result<BigInt, ScalarError> {
        self.skip_ws();
        let start = self.pos;
        if self.pos < self.src.len() && self.src[self.pos] == b'-' {
            self.pos += 1;
        }
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let t = &self.text[start..self.pos];
        t.parse::<BigInt>().map_err(|_| self.err("expected an integer"))
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        self.add_ref(rhs)
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self.sub_ref(rhs)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        self.mul_ref(rhs)
    }
}

impl Div for &RatFunc {
    type Output = RatFunc;
    /// Panics on division by zero; use [`RatFunc::div_ref`] to handle it.
    fn div(self, rhs: &RatFunc) -> RatFunc {
        self.div_ref(rhs).expect("division by zero")
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        self.neg_ref()
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RatFunc {
            type Output = RatFunc;
            fn $m(self, rhs: RatFunc) -> RatFunc {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        self.neg_ref()
    }
}

/// Sign of the leading numerator coefficient, for normalizing rays.
pub fn leading_sign(r: &RatFunc) -> i32 {
    match r.numer().leading() {
        None => 0,
        Some(c) if c.is_negative() => -1,
        Some(_) => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> RatFunc {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_form_is_unique() {
        let a = r("(s^2 - s^-2)/(s - s^-1)");
        assert_eq!(a, r("s + s^-1"));
        assert!(a.is_laurent());
        let b = r("(2*s)/(2*s^2 + 2)");
        assert_eq!(b, r("s/(s^2 + 1)"));
        assert_eq!(b.to_string(), "(s)/(s^2 + 1)");
    }

    #[test]
    fn field_operations() {
        let a = r("(s^3 + 1)/(s^2 - 3)");
        let b = r("(s - 2)/(s^4 + s + 1)");
        let sum = &a + &b;
        assert_eq!(&sum - &b, a);
        assert_eq!(&(&a * &b) / &b, a);
        assert!((&a * &a.inv().unwrap()).is_one());
    }

    #[test]
    fn text_round_trip() {
        for t in ["0", "1", "-s^-3", "3*s^4 - 2 + s^-2", "(s^2 + 1)/(3*s^3 - s - 2)", "1/2*s^2"] {
            let v = r(t);
            assert_eq!(r(&v.to_string()), v, "{t}");
        }
        assert!("s^".parse::<RatFunc>().is_err());
        assert!("(s".parse::<RatFunc>().is_err());
        assert!("1/0".parse::<RatFunc>().is_err());
    }

    #[test]
    fn rational_coefficients_print() {
        assert_eq!(r("s/2").to_string(), "1/2*s");
        assert_eq!(r("s/(2*s^2+2)").to_string(), "(s)/(2*s^2 + 2)");
    }

    #[test]
    fn limits() {
        let a = r("(s^2 - 1)/(s - 1)");
        assert_eq!(a, r("s + 1"));
        assert_eq!(a.eval_at_one().unwrap(), Rational::from_integer(2.into()));
        assert!(r("1/(s-1)").eval_at_one().is_none());
        assert!(r("1/(s-1)").eval_f64(1.0).is_none());
    }

    #[test]
    fn invert_variable() {
        assert_eq!(r("s^2 + 2*s^-1").invert_variable(), r("s^-2 + 2*s"));
        let a = r("(s + 3)/(s^2 + 1)");
        assert_eq!(a.invert_variable().invert_variable(), a);
    }
}
