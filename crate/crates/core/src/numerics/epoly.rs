use std::fmt;

use super::{NumericsError, Scalar};

/// Univariate polynomial in the eigenvalue symbol, coefficients in ascending
/// degree.
///
/// Normalized form: the highest stored coefficient is nonzero, and the zero
/// polynomial has no coefficients at all (its [`degree`](Self::degree) is
/// `None`). Additions whose top coefficients cancel below the context's
/// noise threshold are trimmed relative to the operands, not to the largest
/// coefficient of the result.
#[derive(Clone, Debug)]
pub struct EPoly<T: Scalar> {
    coeffs: Vec<T>,
    ctx: T::Context,
}

impl<T: Scalar> EPoly<T> {
    pub fn zero(ctx: &T::Context) -> Self {
        EPoly {
            coeffs: Vec::new(),
            ctx: ctx.clone(),
        }
    }

    pub fn constant(c: T, ctx: &T::Context) -> Self {
        Self::from_coeffs(vec![c], ctx)
    }

    /// The polynomial `E`.
    pub fn eigen(ctx: &T::Context) -> Self {
        Self::from_coeffs(vec![T::zero(ctx), T::one(ctx)], ctx)
    }

    pub fn from_coeffs(coeffs: Vec<T>, ctx: &T::Context) -> Self {
        let mut p = EPoly {
            coeffs,
            ctx: ctx.clone(),
        };
        p.trim_zeros();
        p
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn context(&self) -> &T::Context {
        &self.ctx
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True for the zero polynomial and for constants.
    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn coeff(&self, k: usize) -> Option<&T> {
        self.coeffs.get(k)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    fn check(&self, other: &Self) -> Result<(), NumericsError> {
        if self.ctx != other.ctx {
            return Err(NumericsError::ContextMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, NumericsError> {
        self.check(other)?;
        let mut out = self.clone();
        out.add_assign_unchecked(other);
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, NumericsError> {
        self.check(other)?;
        let mut out = self.clone();
        out.sub_assign_unchecked(other);
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self, NumericsError> {
        self.check(other)?;
        let mut out = Self::zero(&self.ctx);
        let mut tmp = T::zero(&self.ctx);
        out.add_mul_assign(self, other, &mut tmp);
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        out.neg_assign();
        out
    }

    pub fn neg_assign(&mut self) {
        for c in &mut self.coeffs {
            c.neg_assign();
        }
    }

    pub fn scale(&self, s: &T) -> Self {
        if s.is_zero() {
            return Self::zero(&self.ctx);
        }
        let coeffs = self.coeffs.iter().map(|c| c.mul_ref(s)).collect();
        Self::from_coeffs(coeffs, &self.ctx)
    }

    /// Multiplies by `E^k`.
    pub fn shift_up(&mut self, k: usize) {
        if k > 0 && !self.coeffs.is_empty() {
            let zeros = (0..k).map(|_| T::zero(&self.ctx));
            self.coeffs.splice(0..0, zeros);
        }
    }

    pub fn mul_u32_assign(&mut self, k: u32) {
        if k == 0 {
            self.coeffs.clear();
            return;
        }
        for c in &mut self.coeffs {
            c.mul_u32_assign(k);
        }
    }

    /// Horner evaluation.
    pub fn eval(&self, z: &T) -> T {
        let mut acc = T::zero(&self.ctx);
        let mut tmp = T::zero(&self.ctx);
        for c in self.coeffs.iter().rev() {
            tmp.assign_mul(&acc, z);
            acc.clone_from(&tmp);
            acc.add_assign_ref(c);
        }
        acc
    }

    /// Formal derivative with respect to the eigenvalue symbol.
    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| {
                let mut c = c.clone();
                c.mul_u32_assign(k as u32);
                c
            })
            .collect();
        Self::from_coeffs(coeffs, &self.ctx)
    }

    /// Divides by the leading coefficient. `None` for the zero polynomial.
    pub fn monic(&self) -> Option<Self> {
        let lead = self.leading()?;
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.div_ref(lead))
            .collect::<Option<Vec<_>>>()?;
        Some(Self::from_coeffs(coeffs, &self.ctx))
    }

    pub fn map_coeffs<U: Scalar>(&self, ctx: &U::Context, f: impl Fn(&T) -> U) -> EPoly<U> {
        EPoly::from_coeffs(self.coeffs.iter().map(f).collect(), ctx)
    }

    fn trim_zeros(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    /// Drops top coefficients that are exact zeros or that cancelled to
    /// below the noise threshold relative to `reference` (log2 magnitudes of
    /// the largest contribution at each degree).
    fn trim_cancelled(&mut self, reference: impl Fn(usize) -> Option<f64>) {
        let threshold = T::cancellation_log2(&self.ctx);
        while let Some(top) = self.coeffs.last() {
            let k = self.coeffs.len() - 1;
            let noise = match (top.log2_abs(), threshold, reference(k)) {
                (None, _, _) => true,
                (Some(v), Some(t), Some(r)) => v < r + t,
                _ => false,
            };
            if !noise {
                break;
            }
            self.coeffs.pop();
        }
    }

    pub(crate) fn add_assign_unchecked(&mut self, other: &Self) {
        self.combine(other, false);
    }

    pub(crate) fn sub_assign_unchecked(&mut self, other: &Self) {
        self.combine(other, true);
    }

    fn combine(&mut self, other: &Self, subtract: bool) {
        let reference: Vec<Option<f64>> = (0..self.coeffs.len().max(other.coeffs.len()))
            .map(|k| {
                let a = self.coeffs.get(k).and_then(|c| c.log2_abs());
                let b = other.coeffs.get(k).and_then(|c| c.log2_abs());
                match (a, b) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            })
            .collect();
        if self.coeffs.len() < other.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), T::zero(&self.ctx));
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            if subtract {
                a.sub_assign_ref(b);
            } else {
                a.add_assign_ref(b);
            }
        }
        self.trim_cancelled(|k| reference.get(k).copied().flatten());
    }

    /// `self += a * b`. `tmp` is scratch storage. Only exact zeros are
    /// trimmed; the accumulation loops of the iteration kernel call this
    /// many times per coefficient.
    pub(crate) fn add_mul_assign(&mut self, a: &Self, b: &Self, tmp: &mut T) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        let len = a.coeffs.len() + b.coeffs.len() - 1;
        if self.coeffs.len() < len {
            self.coeffs.resize(len, T::zero(&self.ctx));
        }
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                tmp.assign_mul(x, y);
                self.coeffs[i + j].add_assign_ref(tmp);
            }
        }
        self.trim_zeros();
    }

    /// `self += s * b` for a scalar `s`.
    pub(crate) fn add_scaled_assign(&mut self, s: &T, b: &Self, tmp: &mut T) {
        if s.is_zero() || b.is_zero() {
            return;
        }
        if self.coeffs.len() < b.coeffs.len() {
            self.coeffs.resize(b.coeffs.len(), T::zero(&self.ctx));
        }
        for (acc, y) in self.coeffs.iter_mut().zip(&b.coeffs) {
            tmp.assign_mul(s, y);
            acc.add_assign_ref(tmp);
        }
        self.trim_zeros();
    }

    /// Largest coefficient magnitude (log2); `None` for the zero polynomial.
    pub fn max_log2(&self) -> Option<f64> {
        self.coeffs
            .iter()
            .filter_map(|c| c.log2_abs())
            .fold(None, |m, v| Some(m.map_or(v, |m: f64| m.max(v))))
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for EPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("({c})"),
                1 => format!("({c})*E"),
                _ => format!("({c})*E^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}
