use std::fmt::Debug;

use rug::Rational;

use super::{BigComplex, ExactComplex, NumericsError, PrecisionContext};

/// Coefficient field of the eigenvalue polynomials and Taylor series.
///
/// Implemented for the multiprecision [`BigReal`](super::BigReal) and
/// [`BigComplex`] types used in production, and for exact rationals, which
/// the symbolic cross-checks run on. Operations never change the precision
/// of a value; every value of one computation is built from the same
/// context.
pub trait Scalar: Clone + Debug + Send + Sync + 'static {
    type Context: Clone + Debug + PartialEq + Send + Sync;

    fn zero(ctx: &Self::Context) -> Self;

    fn from_rational(q: &Rational, ctx: &Self::Context) -> Self;

    /// Embeds an exact complex rational; real fields reject a nonzero
    /// imaginary part.
    fn from_exact(value: &ExactComplex, ctx: &Self::Context) -> Result<Self, NumericsError>;

    fn one(ctx: &Self::Context) -> Self {
        Self::from_rational(&Rational::from(1), ctx)
    }

    fn is_zero(&self) -> bool;

    fn neg_assign(&mut self);

    fn add_assign_ref(&mut self, rhs: &Self);

    fn sub_assign_ref(&mut self, rhs: &Self);

    fn mul_ref(&self, rhs: &Self) -> Self;

    /// `self = a * b`, reusing the storage of `self`.
    fn assign_mul(&mut self, a: &Self, b: &Self);

    /// `None` when `rhs` is zero.
    fn div_ref(&self, rhs: &Self) -> Option<Self>;

    fn mul_u32_assign(&mut self, k: u32);

    fn div_u32_assign(&mut self, k: u32);

    /// log2 of the magnitude, `None` for zero. Only used for relative
    /// comparisons, so a few bits of error are harmless.
    fn log2_abs(&self) -> Option<f64>;

    /// Relative size below which a cancelled sum counts as noise; `None`
    /// for exact fields.
    fn cancellation_log2(ctx: &Self::Context) -> Option<f64>;

    fn to_big_complex(&self, ctx: &PrecisionContext) -> BigComplex;

    fn exp(&self) -> Result<Self, NumericsError> {
        Err(NumericsError::Unsupported("exp"))
    }

    fn ln(&self) -> Result<Self, NumericsError> {
        Err(NumericsError::Unsupported("log"))
    }

    fn sin(&self) -> Result<Self, NumericsError> {
        Err(NumericsError::Unsupported("sin"))
    }

    fn cos(&self) -> Result<Self, NumericsError> {
        Err(NumericsError::Unsupported("cos"))
    }

    fn sqrt(&self) -> Result<Self, NumericsError> {
        self.pow_rational(&Rational::from((1, 2)))
    }

    fn pow_rational(&self, _q: &Rational) -> Result<Self, NumericsError> {
        Err(NumericsError::Unsupported("rational power"))
    }

    fn pow_i64(&self, k: i64, ctx: &Self::Context) -> Result<Self, NumericsError> {
        let mut base = if k < 0 {
            Self::one(ctx).div_ref(self).ok_or(NumericsError::DivisionByZero)?
        } else {
            self.clone()
        };
        let mut e = k.unsigned_abs();
        let mut acc = Self::one(ctx);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_ref(&base);
            }
        }
        Ok(acc)
    }
}
