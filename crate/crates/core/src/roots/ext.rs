//! Complex numbers with a double-precision mantissa and a wide binary
//! exponent. Deep-iteration quantization polynomials have coefficients far
//! outside the `f64` range, but their roots are located to a few digits
//! perfectly well in this format.

use rug::Float;

use crate::numerics::BigComplex;

/// `(re + i·im) · 2^exp`, with `max(|re|, |im|)` in `[0.5, 1)` unless zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct ExtComplex {
    re: f64,
    im: f64,
    exp: i64,
}

fn scale2(x: f64, k: i64) -> f64 {
    if k < -1074 {
        0.0
    } else if k > 1023 {
        x * f64::INFINITY
    } else if k < -1000 {
        x * 2f64.powi(-1000) * 2f64.powi((k + 1000) as i32)
    } else {
        x * 2f64.powi(k as i32)
    }
}

impl ExtComplex {
    pub const ZERO: ExtComplex = ExtComplex {
        re: 0.0,
        im: 0.0,
        exp: 0,
    };

    pub fn new(re: f64, im: f64) -> Self {
        ExtComplex { re, im, exp: 0 }.normalized()
    }

    fn normalized(self) -> Self {
        let m = self.re.abs().max(self.im.abs());
        if m == 0.0 || !m.is_finite() {
            return if m == 0.0 { ExtComplex::ZERO } else { self };
        }
        let (_, e) = frexp(m);
        ExtComplex {
            re: scale2(self.re, -e),
            im: scale2(self.im, -e),
            exp: self.exp + e,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// Polar construction from `log2` of the modulus.
    pub fn from_polar_log2(log2_r: f64, angle: f64) -> Self {
        let e = log2_r.floor();
        let frac = 2f64.powf(log2_r - e);
        ExtComplex {
            re: frac * angle.cos(),
            im: frac * angle.sin(),
            exp: e as i64,
        }
        .normalized()
    }

    pub fn from_big(z: &BigComplex) -> Self {
        let part = |x: &Float| -> (f64, i64) {
            if x.is_zero() {
                (0.0, i64::MIN)
            } else {
                let (m, e) = x.to_f64_exp();
                (m, e as i64)
            }
        };
        let (mr, er) = part(z.re());
        let (mi, ei) = part(z.im());
        let e = er.max(ei);
        if e == i64::MIN {
            return ExtComplex::ZERO;
        }
        let shift = |m: f64, ex: i64| if ex == i64::MIN { 0.0 } else { scale2(m, ex - e) };
        ExtComplex {
            re: shift(mr, er),
            im: shift(mi, ei),
            exp: e,
        }
        .normalized()
    }

    pub fn to_big(self, bits: u32) -> BigComplex {
        let conv = |x: f64| {
            let mut f = Float::with_val(bits, x);
            if self.exp >= 0 {
                f <<= self.exp.min(u32::MAX as i64) as u32;
            } else {
                f >>= (-self.exp).min(u32::MAX as i64) as u32;
            }
            f
        };
        BigComplex::new(
            crate::numerics::BigReal::from_float(conv(self.re)),
            crate::numerics::BigReal::from_float(conv(self.im)),
        )
    }

    /// log2 of the modulus; `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.re.hypot(self.im).log2() + self.exp as f64
    }

    pub fn add(self, o: Self) -> Self {
        if self.is_zero() {
            return o;
        }
        if o.is_zero() {
            return self;
        }
        let (big, small) = if self.exp >= o.exp { (self, o) } else { (o, self) };
        let d = small.exp - big.exp;
        ExtComplex {
            re: big.re + scale2(small.re, d),
            im: big.im + scale2(small.im, d),
            exp: big.exp,
        }
        .normalized()
    }

    pub fn neg(self) -> Self {
        ExtComplex {
            re: -self.re,
            im: -self.im,
            exp: self.exp,
        }
    }

    pub fn sub(self, o: Self) -> Self {
        self.add(o.neg())
    }

    pub fn mul(self, o: Self) -> Self {
        ExtComplex {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
            exp: self.exp + o.exp,
        }
        .normalized()
    }

    pub fn recip(self) -> Self {
        let n = self.re * self.re + self.im * self.im;
        ExtComplex {
            re: self.re / n,
            im: -self.im / n,
            exp: -self.exp,
        }
        .normalized()
    }

    pub fn div(self, o: Self) -> Self {
        self.mul(o.recip())
    }

    /// Components as plain doubles (may overflow or underflow).
    #[cfg(test)]
    pub fn to_f64_pair(self) -> (f64, f64) {
        (scale2(self.re, self.exp), scale2(self.im, self.exp))
    }
}

fn frexp(x: f64) -> (f64, i64) {
    // x > 0 and finite.
    let bits = x.to_bits();
    let raw = ((bits >> 52) & 0x7ff) as i64;
    if raw == 0 {
        let (m, e) = frexp(x * 2f64.powi(64));
        return (m, e - 64);
    }
    let e = raw - 1022;
    let m = f64::from_bits((bits & !(0x7ff << 52)) | (1022 << 52));
    (m, e)
}
