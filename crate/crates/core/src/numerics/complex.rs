use std::fmt;

use rug::ops::NegAssign;
use rug::{Assign, Float, Rational};

use super::{BigReal, ExactComplex, NumericsError, PrecisionContext, Scalar};

/// Arbitrary-precision complex number as a pair of [`BigReal`]s sharing one
/// precision.
#[derive(Clone, Debug)]
pub struct BigComplex {
    re: Float,
    im: Float,
}

impl BigComplex {
    pub fn new(re: BigReal, im: BigReal) -> Self {
        BigComplex { re: re.0, im: im.0 }
    }

    pub(crate) fn from_floats(re: Float, im: Float) -> Self {
        BigComplex { re, im }
    }

    pub fn from_real(re: BigReal) -> Self {
        let prec = re.0.prec();
        BigComplex {
            re: re.0,
            im: Float::new(prec),
        }
    }

    pub fn i(ctx: &PrecisionContext) -> Self {
        BigComplex {
            re: Float::new(ctx.bits()),
            im: Float::with_val(ctx.bits(), 1),
        }
    }

    pub fn re(&self) -> &Float {
        &self.re
    }

    pub fn im(&self) -> &Float {
        &self.im
    }

    pub fn real(&self) -> BigReal {
        BigReal(self.re.clone())
    }

    pub fn imag(&self) -> BigReal {
        BigReal(self.im.clone())
    }

    pub fn precision(&self) -> u32 {
        self.re.prec()
    }

    /// Copy rounded to `bits` of precision.
    pub fn with_precision(&self, bits: u32) -> Self {
        BigComplex {
            re: Float::with_val(bits, &self.re),
            im: Float::with_val(bits, &self.im),
        }
    }

    pub fn conj(&self) -> Self {
        BigComplex {
            re: self.re.clone(),
            im: Float::with_val(self.im.prec(), -&self.im),
        }
    }

    pub fn norm_sqr(&self) -> Float {
        let mut n = Float::with_val(self.re.prec(), self.re.square_ref());
        n += Float::with_val(self.im.prec(), self.im.square_ref());
        n
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.re.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        out.sub_assign_ref(rhs);
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    fn arg(&self) -> Float {
        Float::with_val(self.re.prec(), self.im.atan2_ref(&self.re))
    }

    fn from_polar(modulus: Float, angle: &Float) -> Self {
        let prec = modulus.prec();
        let (s, c) = angle.clone().sin_cos(Float::new(prec));
        BigComplex {
            re: Float::with_val(prec, &modulus * &c),
            im: Float::with_val(prec, &modulus * &s),
        }
    }

    /// Decimal rendering `a + bi` with `digits` fraction digits on both parts.
    pub fn to_fixed(&self, digits: usize) -> String {
        let re = super::real::format_fixed(&self.re, digits);
        let im_abs = super::real::format_fixed(&Float::with_val(self.im.prec(), self.im.abs_ref()), digits);
        let sign = if self.im.is_sign_negative() { '-' } else { '+' };
        format!("{re} {sign} {im_abs}i")
    }
}

impl PartialEq for BigComplex {
    fn eq(&self, other: &Self) -> bool {
        self.re == other.re && self.im == other.im
    }
}

/// A complex value with zero imaginary part equals its real embedding.
impl PartialEq<BigReal> for BigComplex {
    fn eq(&self, other: &BigReal) -> bool {
        self.im.is_zero() && self.re == other.0
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => {
                let text = self.to_fixed(p);
                match f.width() {
                    Some(w) => write!(f, "{text:>w$}"),
                    None => write!(f, "{text}"),
                }
            }
            None => {
                let sign = if self.im.is_sign_negative() { '-' } else { '+' };
                let im = Float::with_val(self.im.prec(), self.im.abs_ref());
                write!(
                    f,
                    "{} {} {}i",
                    self.re.to_string_radix(10, Some(20)),
                    sign,
                    im.to_string_radix(10, Some(20))
                )
            }
        }
    }
}

impl Scalar for BigComplex {
    type Context = PrecisionContext;

    fn zero(ctx: &PrecisionContext) -> Self {
        BigComplex {
            re: Float::new(ctx.bits()),
            im: Float::new(ctx.bits()),
        }
    }

    fn from_rational(q: &Rational, ctx: &PrecisionContext) -> Self {
        BigComplex {
            re: Float::with_val(ctx.bits(), q),
            im: Float::new(ctx.bits()),
        }
    }

    fn from_exact(value: &ExactComplex, ctx: &PrecisionContext) -> Result<Self, NumericsError> {
        Ok(BigComplex {
            re: Float::with_val(ctx.bits(), value.re()),
            im: Float::with_val(ctx.bits(), value.im()),
        })
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn neg_assign(&mut self) {
        self.re.neg_assign();
        self.im.neg_assign();
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
        let mut out = BigComplex {
            re: Float::new(self.re.prec()),
            im: Float::new(self.re.prec()),
        };
        out.assign_mul(self, rhs);
        out
    }

    fn assign_mul(&mut self, a: &Self, b: &Self) {
        if a.im.is_zero() && b.im.is_zero() {
            self.re.assign(&a.re * &b.re);
            self.im.assign(0);
            return;
        }
        let prec = self.re.prec();
        let t = Float::with_val(prec, &a.im * &b.im);
        self.re.assign(&a.re * &b.re);
        self.re -= &t;
        let t = Float::with_val(prec, &a.re * &b.im);
        self.im.assign(&a.im * &b.re);
        self.im += &t;
    }

    fn div_ref(&self, rhs: &Self) -> Option<Self> {
        if rhs.is_zero() {
            return None;
        }
        let prec = self.re.prec();
        let denom = rhs.norm_sqr();
        let num = self.mul_ref(&rhs.conj());
        Some(BigComplex {
            re: Float::with_val(prec, &num.re / &denom),
            im: Float::with_val(prec, &num.im / &denom),
        })
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
        let r = BigReal(self.re.clone()).log2_abs();
        let i = BigReal(self.im.clone()).log2_abs();
        match (r, i) {
            (None, None) => None,
            (Some(a), None) | (None, Some(a)) => Some(a),
            (Some(a), Some(b)) => {
                let (hi, lo) = if a > b { (a, b) } else { (b, a) };
                Some(hi + 0.5 * (1.0 + (2f64).powf(2.0 * (lo - hi))).log2())
            }
        }
    }

    fn cancellation_log2(ctx: &PrecisionContext) -> Option<f64> {
        Some(ctx.cancellation_log2())
    }

    fn to_big_complex(&self, ctx: &PrecisionContext) -> BigComplex {
        self.with_precision(ctx.bits())
    }

    fn exp(&self) -> Result<Self, NumericsError> {
        let modulus = self.re.clone().exp();
        Ok(Self::from_polar(modulus, &self.im))
    }

    fn ln(&self) -> Result<Self, NumericsError> {
        if self.is_zero() {
            return Err(NumericsError::Domain("log of zero"));
        }
        let prec = self.re.prec();
        Ok(BigComplex {
            re: Float::with_val(prec, self.abs().ln_ref()),
            im: self.arg(),
        })
    }

    fn sin(&self) -> Result<Self, NumericsError> {
        let prec = self.re.prec();
        let (s, c) = self.re.clone().sin_cos(Float::new(prec));
        let (sh, ch) = self.im.clone().sinh_cosh(Float::new(prec));
        Ok(BigComplex {
            re: Float::with_val(prec, &s * &ch),
            im: Float::with_val(prec, &c * &sh),
        })
    }

    fn cos(&self) -> Result<Self, NumericsError> {
        let prec = self.re.prec();
        let (s, c) = self.re.clone().sin_cos(Float::new(prec));
        let (sh, ch) = self.im.clone().sinh_cosh(Float::new(prec));
        Ok(BigComplex {
            re: Float::with_val(prec, &c * &ch),
            im: Float::with_val(prec, -(s * sh)),
        })
    }

    fn sqrt(&self) -> Result<Self, NumericsError> {
        if self.is_zero() {
            return Ok(self.clone());
        }
        let prec = self.re.prec();
        let modulus = self.abs();
        // sqrt((|z| + re)/2) + i sign(im) sqrt((|z| - re)/2)
        let mut a = Float::with_val(prec, &modulus + &self.re);
        a /= 2u32;
        a.sqrt_mut();
        let mut b = Float::with_val(prec, &modulus - &self.re);
        b /= 2u32;
        b.sqrt_mut();
        if self.im.is_sign_negative() {
            b = -b;
        }
        Ok(BigComplex { re: a, im: b })
    }

    fn pow_rational(&self, q: &Rational) -> Result<Self, NumericsError> {
        if self.is_zero() {
            return if *q > 0 {
                Ok(self.clone())
            } else {
                Err(NumericsError::DivisionByZero)
            };
        }
        if *q.denom() == 1 {
            let k = q.numer().to_i64().ok_or(NumericsError::Domain("exponent too large"))?;
            let ctx_bits = self.re.prec();
            let mut acc = BigComplex {
                re: Float::with_val(ctx_bits, 1),
                im: Float::new(ctx_bits),
            };
            let mut base = if k < 0 {
                acc.div_ref(self).ok_or(NumericsError::DivisionByZero)?
            } else {
                self.clone()
            };
            let mut e = k.unsigned_abs();
            while e > 0 {
                if e & 1 == 1 {
                    acc = acc.mul_ref(&base);
                }
                e >>= 1;
                if e > 0 {
                    base = base.mul_ref(&base);
                }
            }
            return Ok(acc);
        }
        let prec = self.re.prec();
        let qf = Float::with_val(prec, q);
        let log = self.ln()?;
        let modulus = Float::with_val(prec, &log.re * &qf).exp();
        let angle = Float::with_val(prec, &log.im * &qf);
        Ok(Self::from_polar(modulus, &angle))
    }

    fn pow_i64(&self, k: i64, _ctx: &PrecisionContext) -> Result<Self, NumericsError> {
        self.pow_rational(&Rational::from(k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::with_dprec(40).unwrap()
    }

    fn close(a: &BigComplex, re: f64, im: f64) -> bool {
        let (x, y) = a.to_f64_pair();
        (x - re).abs() < 1e-14 && (y - im).abs() < 1e-14
    }

    #[test]
    fn i_squared_is_minus_one() {
        let i = BigComplex::i(&ctx());
        assert!(close(&i.mul_ref(&i), -1.0, 0.0));
    }

    #[test]
    fn real_embedding_compares_equal() {
        let c = ctx();
        let r = BigReal::from_i64(7, &c);
        let z = BigComplex::from_real(r.clone());
        assert_eq!(z, r);
        assert!(BigComplex::i(&c) != r);
    }

    #[test]
    fn transcendental_identities() {
        let c = ctx();
        let z = BigComplex::from_exact(&ExactComplex::new(Rational::from((1, 2)), Rational::from((3, 4))), &c).unwrap();
        let e = z.exp().unwrap();
        assert!(close(&e.ln().unwrap(), 0.5, 0.75));
        let s = z.sin().unwrap();
        let co = z.cos().unwrap();
        let one = s.mul_ref(&s).add(&co.mul_ref(&co));
        assert!(close(&one, 1.0, 0.0));
        let r = z.sqrt().unwrap();
        let back = r.mul_ref(&r);
        assert!(close(&back, 0.5, 0.75));
        let cube = z.pow_rational(&Rational::from((1, 3))).unwrap();
        assert!(close(&cube.pow_i64(3, &c).unwrap(), 0.5, 0.75));
    }

    #[test]
    fn division_roundtrip() {
        let c = ctx();
        let a = BigComplex::from_exact(&ExactComplex::new(Rational::from(3), Rational::from(-2)), &c).unwrap();
        let b = BigComplex::from_exact(&ExactComplex::new(Rational::from(1), Rational::from(5)), &c).unwrap();
        let q = a.div_ref(&b).unwrap();
        assert!(close(&q.mul_ref(&b), 3.0, -2.0));
        assert!(a.div_ref(&BigComplex::zero(&c)).is_none());
    }

    #[test]
    fn fixed_rendering() {
        let c = ctx();
        let z = BigComplex::from_exact(
            &ExactComplex::new(Rational::from((3736717, 10_000_000)), Rational::from((-889623, 10_000_000))),
            &c,
        )
        .unwrap();
        assert_eq!(z.to_fixed(7), "0.3736717 - 0.0889623i");
    }
}
