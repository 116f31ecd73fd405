use std::cmp::Ordering;
use std::fmt;

use rug::ops::{NegAssign, Pow, PowAssign};
use rug::{Assign, Float, Integer, Rational};

use super::{BigComplex, ExactComplex, NumericsError, PrecisionContext, Scalar};

/// Arbitrary-precision real number.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct BigReal(pub(crate) Float);

impl BigReal {
    pub fn from_float(value: Float) -> Self {
        BigReal(value)
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn into_float(self) -> Float {
        self.0
    }

    pub fn precision(&self) -> u32 {
        self.0.prec()
    }

    pub fn from_i64(v: i64, ctx: &PrecisionContext) -> Self {
        BigReal(Float::with_val(ctx.bits(), v))
    }

    /// Parses a decimal string (`-1.25`, `3e-7`) at the context precision.
    pub fn parse(text: &str, ctx: &PrecisionContext) -> Result<Self, NumericsError> {
        let parsed = Float::parse(text).map_err(|_| NumericsError::Parse(text.to_string()))?;
        Ok(BigReal(Float::with_val(ctx.bits(), parsed)))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn abs(&self) -> BigReal {
        BigReal(self.0.clone().abs())
    }

    pub fn is_sign_negative(&self) -> bool {
        self.0.is_sign_negative() && !self.0.is_zero()
    }

    pub fn cmp_abs_float(&self, other: &Float) -> Ordering {
        self.0
            .cmp_abs(other)
            .unwrap_or(Ordering::Greater)
    }

    /// Decimal rendering with exactly `digits` digits after the point,
    /// correctly rounded (ties away from zero).
    pub fn to_fixed(&self, digits: usize) -> String {
        format_fixed(&self.0, digits)
    }

    /// Decimal scientific rendering with `digits` significant digits.
    pub fn to_sci(&self, digits: usize) -> String {
        self.0.to_string_radix(10, Some(digits.max(1)))
    }
}

pub(crate) fn format_fixed(x: &Float, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let extra = (digits as f64 * super::context::LOG2_10).ceil() as u32 + 64;
    let scaled = Float::with_val(x.prec() + extra, x * Integer::from(10).pow(digits as u32));
    let rounded = scaled.round().to_integer().unwrap_or_default();
    let negative = x.is_sign_negative() && !x.is_zero();
    let mut body = rounded.abs().to_string();
    if body.len() <= digits {
        body = format!("{}{}", "0".repeat(digits + 1 - body.len()), body);
    }
    let split = body.len() - digits;
    let sign = if negative { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{body}")
    } else {
        format!("{sign}{}.{}", &body[..split], &body[split..])
    }
}

/// Right-aligns a rendered number under the formatter's width without
/// treating the precision as a truncation length.
pub(crate) fn pad_number(f: &mut fmt::Formatter<'_>, text: &str) -> fmt::Result {
    match text.strip_prefix('-') {
        Some(rest) => f.pad_integral(false, "", rest),
        None => f.pad_integral(true, "", text),
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => pad_number(f, &self.to_fixed(p)),
            None => pad_number(f, &self.to_sci(20)),
        }
    }
}

impl Scalar for BigReal {
    type Context = PrecisionContext;

    fn zero(ctx: &PrecisionContext) -> Self {
        BigReal(Float::new(ctx.bits()))
    }

    fn from_rational(q: &Rational, ctx: &PrecisionContext) -> Self {
        BigReal(Float::with_val(ctx.bits(), q))
    }

    fn from_exact(value: &ExactComplex, ctx: &PrecisionContext) -> Result<Self, NumericsError> {
        if *value.im() != 0 {
            return Err(NumericsError::ComplexInRealField);
        }
        Ok(Self::from_rational(value.re(), ctx))
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn neg_assign(&mut self) {
        self.0.neg_assign();
    }

    fn add_assign_ref(&mut self, rhs: &Self) {
        self.0 += &rhs.0;
    }

    fn sub_assign_ref(&mut self, rhs: &Self) {
        self.0 -= &rhs.0;
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        BigReal(Float::with_val(self.0.prec(), &self.0 * &rhs.0))
    }

    fn assign_mul(&mut self, a: &Self, b: &Self) {
        self.0.assign(&a.0 * &b.0);
    }

    fn div_ref(&self, rhs: &Self) -> Option<Self> {
        if rhs.0.is_zero() {
            return None;
        }
        Some(BigReal(Float::with_val(self.0.prec(), &self.0 / &rhs.0)))
    }

    fn mul_u32_assign(&mut self, k: u32) {
        self.0 *= k;
    }

    fn div_u32_assign(&mut self, k: u32) {
        self.0 /= k;
    }

    fn log2_abs(&self) -> Option<f64> {
        if self.0.is_zero() {
            return None;
        }
        let (m, e) = self.0.to_f64_exp();
        Some(e as f64 + m.abs().log2())
    }

    fn cancellation_log2(ctx: &PrecisionContext) -> Option<f64> {
        Some(ctx.cancellation_log2())
    }

    fn to_big_complex(&self, ctx: &PrecisionContext) -> BigComplex {
        BigComplex::new(
            BigReal(Float::with_val(ctx.bits(), &self.0)),
            BigReal(Float::new(ctx.bits())),
        )
    }

    fn exp(&self) -> Result<Self, NumericsError> {
        Ok(BigReal(self.0.clone().exp()))
    }

    fn ln(&self) -> Result<Self, NumericsError> {
        if self.0 <= 0 {
            return Err(NumericsError::Domain("log of a non-positive real"));
        }
        Ok(BigReal(self.0.clone().ln()))
    }

    fn sin(&self) -> Result<Self, NumericsError> {
        Ok(BigReal(self.0.clone().sin()))
    }

    fn cos(&self) -> Result<Self, NumericsError> {
        Ok(BigReal(self.0.clone().cos()))
    }

    fn pow_rational(&self, q: &Rational) -> Result<Self, NumericsError> {
        if *q.denom() == 1 {
            if self.0.is_zero() && *q < 0 {
                return Err(NumericsError::DivisionByZero);
            }
            let mut r = Float::with_val(self.0.prec(), &self.0);
            r.pow_assign(q.numer());
            return Ok(BigReal(r));
        }
        if self.0.is_zero() {
            return if *q > 0 {
                Ok(self.clone())
            } else {
                Err(NumericsError::DivisionByZero)
            };
        }
        if self.0 < 0 {
            return Err(NumericsError::Domain("fractional power of a negative real"));
        }
        let exponent = Float::with_val(self.0.prec(), q);
        Ok(BigReal(self.0.clone().pow(exponent)))
    }

    fn pow_i64(&self, k: i64, _ctx: &PrecisionContext) -> Result<Self, NumericsError> {
        if k < 0 && self.0.is_zero() {
            return Err(NumericsError::DivisionByZero);
        }
        let prec = self.0.prec();
        let mut r = Float::with_val(prec, &self.0);
        r.pow_assign(&Integer::from(k));
        Ok(BigReal(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::with_dprec(50).unwrap()
    }

    #[test]
    fn rational_conversion_is_accurate() {
        let q = Rational::from((1, 3));
        let x = BigReal::from_rational(&q, &ctx());
        let back = x.0.to_rational().unwrap();
        let err = Float::with_val(300, (back - &q) / &q).abs();
        assert!(err < Float::with_val(64, 10).pow(-70i32));
    }

    #[test]
    fn fixed_formatting_rounds() {
        let c = ctx();
        let x = BigReal::parse("-2.2260838203794128527651", &c).unwrap();
        assert_eq!(x.to_fixed(20), "-2.22608382037941285277");
        let y = BigReal::parse("0.0049", &c).unwrap();
        assert_eq!(y.to_fixed(2), "0.00");
        assert_eq!(y.to_fixed(3), "0.005");
        let z = BigReal::parse("14.5", &c).unwrap();
        assert_eq!(z.to_fixed(0), "15");
        assert_eq!(format!("{:25.4}", z), "                  14.5000");
    }

    #[test]
    fn log2_magnitude() {
        let c = ctx();
        let x = BigReal::from_i64(-8, &c);
        assert!((x.log2_abs().unwrap() - 3.0).abs() < 1e-12);
        assert!(BigReal::zero(&c).log2_abs().is_none());
    }

    #[test]
    fn integer_powers() {
        let c = ctx();
        let x = BigReal::from_i64(3, &c);
        assert_eq!(x.pow_i64(-2, &c).unwrap().to_f64(), 1.0 / 9.0);
        let r = x.pow_rational(&Rational::from((4, 2))).unwrap();
        assert_eq!(r.to_f64(), 9.0);
    }

    #[test]
    fn domain_errors() {
        let c = ctx();
        let x = BigReal::from_i64(-3, &c);
        assert!(x.ln().is_err());
        assert!(x.sqrt().is_err());
    }
}
