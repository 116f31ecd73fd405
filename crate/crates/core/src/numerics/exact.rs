use std::fmt;

use rug::{Float, Rational};

use super::{BigComplex, NumericsError, PrecisionContext, Scalar};

/// Exact complex rational `re + im·i`. Parameter values, expansion points
/// and the symbolic cross-checks use this type; it never rounds.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ExactComplex {
    re: Rational,
    im: Rational,
}

impl ExactComplex {
    pub fn new(re: Rational, im: Rational) -> Self {
        ExactComplex { re, im }
    }

    pub fn real(re: Rational) -> Self {
        ExactComplex { re, im: Rational::new() }
    }

    pub fn i() -> Self {
        ExactComplex {
            re: Rational::new(),
            im: Rational::from(1),
        }
    }

    pub fn re(&self) -> &Rational {
        &self.re
    }

    pub fn im(&self) -> &Rational {
        &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im == 0
    }

    pub fn add(&self, rhs: &Self) -> Self {
        ExactComplex {
            re: Rational::from(&self.re + &rhs.re),
            im: Rational::from(&self.im + &rhs.im),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        ExactComplex {
            re: Rational::from(&self.re - &rhs.re),
            im: Rational::from(&self.im - &rhs.im),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        ExactComplex {
            re: Rational::from(&self.re * &rhs.re) - Rational::from(&self.im * &rhs.im),
            im: Rational::from(&self.re * &rhs.im) + Rational::from(&self.im * &rhs.re),
        }
    }

    pub fn neg(&self) -> Self {
        ExactComplex {
            re: Rational::from(-&self.re),
            im: Rational::from(-&self.im),
        }
    }

    pub fn inv(&self) -> Option<Self> {
        let n = Rational::from(self.re.square_ref()) + Rational::from(self.im.square_ref());
        if n == 0 {
            return None;
        }
        Some(ExactComplex {
            re: Rational::from(&self.re / &n),
            im: Rational::from(-&self.im) / n,
        })
    }

    pub fn powi(&self, k: i64) -> Option<Self> {
        let mut base = if k < 0 { self.inv()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = ExactComplex::real(Rational::from(1));
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Some(acc)
    }
}

impl From<Rational> for ExactComplex {
    fn from(re: Rational) -> Self {
        ExactComplex::real(re)
    }
}

impl From<i64> for ExactComplex {
    fn from(v: i64) -> Self {
        ExactComplex::real(Rational::from(v))
    }
}

impl fmt::Display for ExactComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im == 0 {
            write!(f, "{}", self.re)
        } else if self.re == 0 {
            write!(f, "{}*I", self.im)
        } else {
            write!(f, "{} + {}*I", self.re, self.im)
        }
    }
}

impl Scalar for ExactComplex {
    type Context = ();

    fn zero(_: &()) -> Self {
        ExactComplex::default()
    }

    fn from_rational(q: &Rational, _: &()) -> Self {
        ExactComplex::real(q.clone())
    }

    fn from_exact(value: &ExactComplex, _: &()) -> Result<Self, NumericsError> {
        Ok(value.clone())
    }

    fn is_zero(&self) -> bool {
        self.re == 0 && self.im == 0
    }

    fn neg_assign(&mut self) {
        self.re = -std::mem::take(&mut self.re);
        self.im = -std::mem::take(&mut self.im);
    }

    fn add_assign_ref(&mut self, rhs: &Self) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }

    fn sub_assign_ref(&mut self, rhs: &Self) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }

    fn assign_mul(&mut self, a: &Self, b: &Self) {
        *self = a.mul(b);
    }

    fn div_ref(&self, rhs: &Self) -> Option<Self> {
        Some(self.mul(&rhs.inv()?))
    }

    fn mul_u32_assign(&mut self, k: u32) {
        self.re *= k;
        self.im *= k;
    }

    fn div_u32_assign(&mut self, k: u32) {
        self.re /= k;
        self.im /= k;
    }

    fn log2_abs(&self) -> Option<f64> {
        if self.is_zero() {
            return None;
        }
        let c = self.to_big_complex(&PrecisionContext::with_dprec(20).unwrap());
        c.log2_abs()
    }

    fn cancellation_log2(_: &()) -> Option<f64> {
        None
    }

    fn to_big_complex(&self, ctx: &PrecisionContext) -> BigComplex {
        BigComplex::from_floats(Float::with_val(ctx.bits(), &self.re), Float::with_val(ctx.bits(), &self.im))
    }

    fn pow_i64(&self, k: i64, _: &()) -> Result<Self, NumericsError> {
        self.powi(k).ok_or(NumericsError::DivisionByZero)
    }
}

/// Exact real rationals; the field the symbolic cross-checks run in.
impl Scalar for Rational {
    type Context = ();

    fn zero(_: &()) -> Self {
        Rational::new()
    }

    fn from_rational(q: &Rational, _: &()) -> Self {
        q.clone()
    }

    fn from_exact(value: &ExactComplex, _: &()) -> Result<Self, NumericsError> {
        if !value.is_real() {
            return Err(NumericsError::ComplexInRealField);
        }
        Ok(value.re.clone())
    }

    fn is_zero(&self) -> bool {
        *self == 0
    }

    fn neg_assign(&mut self) {
        *self = -std::mem::take(self);
    }

    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }

    fn sub_assign_ref(&mut self, rhs: &Self) {
        *self -= rhs;
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        Rational::from(self * rhs)
    }

    fn assign_mul(&mut self, a: &Self, b: &Self) {
        *self = Rational::from(a * b);
    }

    fn div_ref(&self, rhs: &Self) -> Option<Self> {
        if *rhs == 0 {
            None
        } else {
            Some(Rational::from(self / rhs))
        }
    }

    fn mul_u32_assign(&mut self, k: u32) {
        *self *= k;
    }

    fn div_u32_assign(&mut self, k: u32) {
        *self /= k;
    }

    fn log2_abs(&self) -> Option<f64> {
        if *self == 0 {
            return None;
        }
        let f = Float::with_val(64, self);
        let (m, e) = f.to_f64_exp();
        Some(e as f64 + m.abs().log2())
    }

    fn cancellation_log2(_: &()) -> Option<f64> {
        None
    }

    fn to_big_complex(&self, ctx: &PrecisionContext) -> BigComplex {
        BigComplex::from_floats(Float::with_val(ctx.bits(), self), Float::new(ctx.bits()))
    }
}
