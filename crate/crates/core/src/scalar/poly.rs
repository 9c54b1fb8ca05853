//! Laurent polynomials in `s` with exact rational coefficients.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// `Σ coeffs[k] · s^(low + k)`. Trimmed: the first and last coefficients are
/// nonzero, and the zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct LaurentPoly {
    low: i64,
    coeffs: Vec<Rational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { low: 0, coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: Rational, exp: i64) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly { low: exp, coeffs: vec![c] }
    }

    /// `s^exp`.
    pub fn s_pow(exp: i64) -> Self {
        Self::monomial(Rational::one(), exp)
    }

    pub fn from_coeffs(low: i64, coeffs: Vec<Rational>) -> Self {
        let mut p = LaurentPoly { low, coeffs };
        p.trim();
        p
    }

    /// Build from `(exponent, integer coefficient)` pairs; repeated exponents add.
    pub fn from_terms<I: IntoIterator<Item = (i64, i64)>>(terms: I) -> Self {
        terms
            .into_iter()
            .fold(Self::zero(), |acc, (e, c)| acc.add(&Self::monomial(Rational::from_integer(c.into()), e)))
    }

    fn trim(&mut self) {
        let lead_zeros = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead_zeros == self.coeffs.len() {
            self.coeffs.clear();
            self.low = 0;
            return;
        }
        if lead_zeros > 0 {
            self.coeffs.drain(..lead_zeros);
            self.low += lead_zeros as i64;
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.low == 0 && self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Lowest exponent present (0 for the zero polynomial).
    pub fn low(&self) -> i64 {
        self.low
    }

    /// Highest exponent present (`low - 1` for the zero polynomial).
    pub fn high(&self) -> i64 {
        self.low + self.coeffs.len() as i64 - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, exp: i64) -> Rational {
        let k = exp - self.low;
        if k < 0 || k >= self.coeffs.len() as i64 {
            Rational::zero()
        } else {
            self.coeffs[k as usize].clone()
        }
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    /// Is this a single term `c·s^e`?
    pub fn is_monomial(&self) -> bool {
        self.coeffs.len() == 1
    }

    /// Multiply by `s^k`.
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        LaurentPoly { low: self.low + k, coeffs: self.coeffs.clone() }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let low = self.low.min(other.low);
        let high = self.high().max(other.high());
        let mut coeffs = vec![Rational::zero(); (high - low + 1) as usize];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[(self.low - low) as usize + k] += c;
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            coeffs[(other.low - low) as usize + k] += c;
        }
        Self::from_coeffs(low, coeffs)
    }

    pub fn neg(&self) -> Self {
        LaurentPoly { low: self.low, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if other.is_monomial() {
            let c = &other.coeffs[0];
            return LaurentPoly { low: self.low + other.low, coeffs: self.coeffs.iter().map(|a| a * c).collect() };
        }
        if self.is_monomial() {
            return other.mul(self);
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::from_coeffs(self.low + other.low, coeffs)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly { low: self.low, coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Divide by the leading coefficient.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(l) => self.scale(&l.recip()),
        }
    }

    /// Polynomial division of `self` by `d`, both read as ordinary polynomials
    /// after shifting so that the lowest exponent is zero.
    fn poly_divrem(num: &[Rational], den: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
        let dl = den.len();
        if num.len() < dl {
            return (Vec::new(), num.to_vec());
        }
        let lead_inv = den[dl - 1].recip();
        let mut rem = num.to_vec();
        let mut quot = vec![Rational::zero(); num.len() - dl + 1];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dl - 1] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (t, d) in den.iter().enumerate() {
                let sub = &c * d;
                rem[k + t] -= sub;
            }
            quot[k] = c;
        }
        rem.truncate(dl - 1);
        while rem.last().is_some_and(|c| c.is_zero()) {
            rem.pop();
        }
        (quot, rem)
    }

    /// Monic gcd of the polynomial parts (both shifted to start at `s^0`),
    /// returned with lowest exponent 0. Powers of `s` are ignored.
    pub fn poly_gcd(a: &Self, b: &Self) -> Self {
        if a.is_zero() {
            return LaurentPoly { low: 0, coeffs: b.coeffs.clone() }.monic();
        }
        if b.is_zero() {
            return LaurentPoly { low: 0, coeffs: a.coeffs.clone() }.monic();
        }
        let (mut x, mut y) = if a.coeffs.len() >= b.coeffs.len() {
            (a.coeffs.clone(), b.coeffs.clone())
        } else {
            (b.coeffs.clone(), a.coeffs.clone())
        };
        if y.len() == 1 {
            return Self::one();
        }
        loop {
            let (_, r) = Self::poly_divrem(&x, &y);
            if r.is_empty() {
                return Self::from_coeffs(0, y).monic();
            }
            if r.len() == 1 {
                return Self::one();
            }
            // Keep the remainders monic to slow coefficient growth.
            let lead_inv = r[r.len() - 1].recip();
            x = y;
            y = r.into_iter().map(|c| c * &lead_inv).collect();
        }
    }

    /// Exact division of polynomial parts; panics if `d` does not divide.
    pub fn div_exact(&self, d: &Self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let (q, r) = Self::poly_divrem(&self.coeffs, &d.coeffs);
        assert!(r.is_empty(), "div_exact: nonzero remainder");
        Self::from_coeffs(self.low - d.low, q)
    }

    pub fn eval_f64(&self, s: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        // Horner in s over the coefficient block, then the s^low factor.
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * s + rational_to_f64(c);
        }
        acc * s.powi(self.low as i32)
    }

    /// Sum of `|c_k| s^k`; a scale for judging cancellation in `eval_f64`.
    pub fn abs_eval_f64(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * s + rational_to_f64(c).abs();
        }
        acc * s.powi(self.low as i32)
    }

    /// Value at `s = 1`.
    pub fn eval_at_one(&self) -> Rational {
        self.coeffs.iter().fold(Rational::zero(), |acc, c| acc + c)
    }

    /// Least common multiple of the coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Gcd of the coefficient numerators (after clearing denominators by `scale`).
    pub fn content_gcd(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c.numer()))
    }

    /// Integer-coefficient form `Σ c_k s^k`, terms by descending exponent.
    pub fn write_terms(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for k in (0..self.coeffs.len()).rev() {
            let c = &self.coeffs[k];
            if c.is_zero() {
                continue;
            }
            let e = self.low + k as i64;
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let mag_str =
                if mag.is_integer() { mag.numer().to_string() } else { format!("{}/{}", mag.numer(), mag.denom()) };
            match (e, mag.is_one()) {
                (0, _) => write!(f, "{mag_str}")?,
                (1, true) => write!(f, "s")?,
                (1, false) => write!(f, "{mag_str}*s")?,
                (_, true) => write!(f, "s^{e}")?,
                (_, false) => write!(f, "{mag_str}*s^{e}")?,
            }
        }
        Ok(())
    }

    /// Total order used only for deterministic sorting of keys.
    pub fn cmp_canonical(&self, other: &Self) -> Ordering {
        self.low.cmp(&other.low).then(self.coeffs.len().cmp(&other.coeffs.len())).then_with(|| {
            for (a, b) in self.coeffs.iter().zip(&other.coeffs) {
                match a.cmp(b) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_terms(f)
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Very large numerator/denominator: scale down before dividing.
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
            let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}
