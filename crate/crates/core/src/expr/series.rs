use rug::Rational;

use super::{Expr, ExprError, Func};
use crate::numerics::{EPoly, ExactComplex, Scalar};

/// Largest accepted truncation order; a guard against runaway memory.
pub const MAX_ORDER: usize = 1 << 16;

/// Truncated Taylor series in `(var - x0)` whose coefficients are
/// polynomials in the eigenvalue symbol.
#[derive(Clone, Debug)]
pub struct XSeries<T: Scalar> {
    var: String,
    x0: Rational,
    coeffs: Vec<EPoly<T>>,
}

impl<T: Scalar> XSeries<T> {
    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn x0(&self) -> &Rational {
        &self.x0
    }

    pub fn coeffs(&self) -> &[EPoly<T>] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<EPoly<T>> {
        self.coeffs
    }

    /// Highest retained power.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Sums the series at `var = x0 + h`.
    pub fn eval_offset(&self, h: &T, ctx: &T::Context) -> EPoly<T> {
        let mut acc = EPoly::zero(ctx);
        let mut tmp = T::zero(ctx);
        for c in self.coeffs.iter().rev() {
            let mut next = EPoly::zero(ctx);
            next.add_scaled_assign(h, &acc, &mut tmp);
            next.add_assign_unchecked(c);
            acc = next;
        }
        acc
    }
}

/// Taylor expansion of a bound expression about `var = x0`, truncated
/// after `(var - x0)^order`.
///
/// Built bottom-up from series arithmetic. Transcendental nodes use the
/// first-order ODE each function satisfies, seeded with the value of the
/// function at `x0` rounded to the working precision.
pub fn expand_series<T: Scalar>(
    e: &Expr,
    eigen: &str,
    var: &str,
    x0: &Rational,
    order: usize,
    ctx: &T::Context,
) -> Result<XSeries<T>, ExprError> {
    if order > MAX_ORDER {
        return Err(ExprError::OrderTooLarge { order, limit: MAX_ORDER });
    }
    let ex = Expander::<T> {
        eigen,
        var,
        x0,
        n: order + 1,
        ctx,
    };
    Ok(XSeries {
        var: var.to_string(),
        x0: x0.clone(),
        coeffs: ex.series(e)?,
    })
}

/// Expansion of an expression free of the eigenvalue symbol, as plain
/// scalars.
pub fn expand_scalar_series<T: Scalar>(
    e: &Expr,
    var: &str,
    x0: &Rational,
    order: usize,
    ctx: &T::Context,
) -> Result<Vec<T>, ExprError> {
    // No valid symbol name starts with a space, so nothing matches it.
    let s = expand_series::<T>(e, " ", var, x0, order, ctx)?;
    Ok(s.coeffs.iter().map(|c| scalar_of(c, ctx)).collect())
}

fn scalar_of<T: Scalar>(p: &EPoly<T>, ctx: &T::Context) -> T {
    p.coeff(0).cloned().unwrap_or_else(|| T::zero(ctx))
}

struct Expander<'a, T: Scalar> {
    eigen: &'a str,
    var: &'a str,
    x0: &'a Rational,
    n: usize,
    ctx: &'a T::Context,
}

type Series<T> = Vec<EPoly<T>>;

impl<T: Scalar> Expander<'_, T> {
    fn constant(&self, c: EPoly<T>) -> Series<T> {
        let mut s = vec![EPoly::zero(self.ctx); self.n];
        s[0] = c;
        s
    }

    fn lift_scalars(&self, xs: Vec<T>) -> Series<T> {
        xs.into_iter().map(|c| EPoly::constant(c, self.ctx)).collect()
    }

    fn series(&self, e: &Expr) -> Result<Series<T>, ExprError> {
        Ok(match e {
            Expr::Rational(q) => self.constant(EPoly::constant(T::from_rational(q, self.ctx), self.ctx)),
            Expr::Imag => {
                let i = T::from_exact(&ExactComplex::i(), self.ctx)?;
                self.constant(EPoly::constant(i, self.ctx))
            }
            Expr::Symbol(s) if s == self.var => {
                let mut out = self.constant(EPoly::constant(T::from_rational(self.x0, self.ctx), self.ctx));
                if self.n > 1 {
                    out[1] = EPoly::constant(T::one(self.ctx), self.ctx);
                }
                out
            }
            Expr::Symbol(s) if s == self.eigen => self.constant(EPoly::eigen(self.ctx)),
            Expr::Symbol(s) => return Err(ExprError::Unbound(s.clone())),
            Expr::Neg(a) => {
                let mut s = self.series(a)?;
                s.iter_mut().for_each(EPoly::neg_assign);
                s
            }
            Expr::Add(xs) => {
                let mut acc = vec![EPoly::zero(self.ctx); self.n];
                for x in xs {
                    for (a, b) in acc.iter_mut().zip(self.series(x)?) {
                        a.add_assign_unchecked(&b);
                    }
                }
                acc
            }
            Expr::Mul(xs) => {
                let mut acc: Option<Series<T>> = None;
                for x in xs {
                    let s = self.series(x)?;
                    acc = Some(match acc {
                        None => s,
                        Some(a) => self.mul(&a, &s),
                    });
                }
                acc.unwrap_or_else(|| self.constant(EPoly::constant(T::one(self.ctx), self.ctx)))
            }
            Expr::Div(a, b) => {
                let num = self.series(a)?;
                let den = self.scalar_series(b, "a denominator")?;
                self.div(num, &den, b)?
            }
            Expr::PowInt(a, k) if *k >= 0 => {
                let base = self.series(a)?;
                let mut acc = self.constant(EPoly::constant(T::one(self.ctx), self.ctx));
                let mut sq = base;
                let mut e = *k as u64;
                while e > 0 {
                    if e & 1 == 1 {
                        acc = self.mul(&acc, &sq);
                    }
                    e >>= 1;
                    if e > 0 {
                        sq = self.mul(&sq, &sq);
                    }
                }
                acc
            }
            Expr::PowInt(a, k) => {
                let u = self.scalar_series(a, "a negative power")?;
                self.lift_scalars(self.pow_rat(&u, &Rational::from(*k), a)?)
            }
            Expr::PowRat(a, q) => {
                let u = self.scalar_series(a, "a rational power")?;
                self.lift_scalars(self.pow_rat(&u, q, a)?)
            }
            Expr::Func(f, a) => {
                let u = self.scalar_series(a, f.name())?;
                self.lift_scalars(self.func(*f, &u, a)?)
            }
        })
    }

    /// Series of a sub-expression that must not involve the eigenvalue.
    fn scalar_series(&self, e: &Expr, context: &str) -> Result<Vec<T>, ExprError> {
        if e.contains_symbol(self.eigen) {
            return Err(ExprError::EigenNotPolynomial(context.to_string()));
        }
        Ok(self.series(e)?.iter().map(|c| scalar_of(c, self.ctx)).collect())
    }

    fn mul(&self, a: &Series<T>, b: &Series<T>) -> Series<T> {
        let mut out = vec![EPoly::zero(self.ctx); self.n];
        let mut tmp = T::zero(self.ctx);
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().take(self.n - i).enumerate() {
                out[i + j].add_mul_assign(x, y, &mut tmp);
            }
        }
        out
    }

    fn div(&self, num: Series<T>, den: &[T], e: &Expr) -> Result<Series<T>, ExprError> {
        let inv = T::one(self.ctx)
            .div_ref(&den[0])
            .ok_or_else(|| ExprError::Singular(format!("{e} vanishes at {}", self.x0)))?;
        let mut tmp = T::zero(self.ctx);
        let mut out: Series<T> = Vec::with_capacity(self.n);
        for (k, mut q) in num.into_iter().enumerate() {
            for i in 1..=k {
                if den[i].is_zero() {
                    continue;
                }
                let mut neg = den[i].clone();
                neg.neg_assign();
                q.add_scaled_assign(&neg, &out[k - i], &mut tmp);
            }
            out.push(q.scale(&inv));
        }
        Ok(out)
    }

    fn pow_rat(&self, u: &[T], q: &Rational, e: &Expr) -> Result<Vec<T>, ExprError> {
        if u[0].is_zero() {
            return Err(ExprError::Singular(format!("{e} vanishes at {}", self.x0)));
        }
        let f0 = if *q.denom() == 1 {
            let k = q.numer().to_i64().ok_or(ExprError::OrderTooLarge {
                order: usize::MAX,
                limit: MAX_ORDER,
            })?;
            u[0].pow_i64(k, self.ctx)?
        } else {
            u[0].pow_rational(q)?
        };
        // u f' = q u' f  =>  k u0 f_k = sum_{j=1..k} (q j - k + j) u_j f_{k-j}
        let mut f = vec![f0];
        let mut tmp = T::zero(self.ctx);
        for k in 1..self.n {
            let mut acc = T::zero(self.ctx);
            for j in 1..=k {
                if u[j].is_zero() {
                    continue;
                }
                let w = Rational::from(q * j as u32) - Rational::from(k - j);
                if w == 0 {
                    continue;
                }
                tmp.assign_mul(&u[j], &f[k - j]);
                acc.add_assign_ref(&tmp.mul_ref(&T::from_rational(&w, self.ctx)));
            }
            acc = acc.div_ref(&u[0]).expect("nonzero constant term");
            acc.div_u32_assign(k as u32);
            f.push(acc);
        }
        Ok(f)
    }

    fn func(&self, g: Func, u: &[T], e: &Expr) -> Result<Vec<T>, ExprError> {
        let n = self.n;
        let mut tmp = T::zero(self.ctx);
        // sum_{j=1..k} j u_j f_{k-j}
        let weighted = |f: &[T], k: usize, tmp: &mut T| {
            let mut acc = T::zero(self.ctx);
            for j in 1..=k {
                if u[j].is_zero() {
                    continue;
                }
                tmp.assign_mul(&u[j], &f[k - j]);
                tmp.mul_u32_assign(j as u32);
                acc.add_assign_ref(tmp);
            }
            acc
        };
        Ok(match g {
            Func::Exp => {
                let mut f = vec![u[0].exp()?];
                for k in 1..n {
                    let mut c = weighted(&f, k, &mut tmp);
                    c.div_u32_assign(k as u32);
                    f.push(c);
                }
                f
            }
            Func::Log => {
                if u[0].is_zero() {
                    return Err(ExprError::Singular(format!("{e} vanishes at {}", self.x0)));
                }
                // u f' = u'  =>  k u0 f_k = k u_k - sum_{j=1..k-1} j f_j u_{k-j}
                let mut f = vec![u[0].ln()?];
                for k in 1..n {
                    let mut c = u[k].clone();
                    c.mul_u32_assign(k as u32);
                    for j in 1..k {
                        tmp.assign_mul(&f[j], &u[k - j]);
                        tmp.mul_u32_assign(j as u32);
                        c.sub_assign_ref(&tmp);
                    }
                    let mut c = c.div_ref(&u[0]).expect("nonzero constant term");
                    c.div_u32_assign(k as u32);
                    f.push(c);
                }
                f
            }
            Func::Sin | Func::Cos => {
                let mut s = vec![u[0].sin()?];
                let mut c = vec![u[0].cos()?];
                for k in 1..n {
                    let mut sk = weighted(&c, k, &mut tmp);
                    sk.div_u32_assign(k as u32);
                    let mut ck = weighted(&s, k, &mut tmp);
                    ck.div_u32_assign(k as u32);
                    ck.neg_assign();
                    s.push(sk);
                    c.push(ck);
                }
                if g == Func::Sin {
                    s
                } else {
                    c
                }
            }
            Func::Sqrt => self.pow_rat(u, &Rational::from((1, 2)), e)?,
        })
    }
}
