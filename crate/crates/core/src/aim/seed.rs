use rug::Rational;

use super::AimError;
use crate::expr::{eigen_components, expand_scalar_series, expand_series, rational_form, Expr};
use crate::numerics::{EPoly, ExactComplex, Scalar};
use crate::parallel::Execution;

/// One `E^power · m(x)` piece of λ0 or s0, in the form the convolution
/// sums use it.
#[derive(Clone, Debug)]
pub(crate) struct Component<T: Scalar> {
    power: usize,
    mult: Multiplier<T>,
}

#[derive(Clone, Debug)]
enum Multiplier<T: Scalar> {
    /// Taylor coefficients of `m`; a convolution costs O(I) per output.
    Dense(Vec<T>),
    /// `m = num(t) / den(t)`: multiply by `num`, then divide by `den` with a
    /// short recurrence. O(deg) per output.
    Rational { num: Vec<T>, den: Vec<T>, inv_den0: T },
}

/// The n = 0 data shared by every iteration level.
#[derive(Debug)]
pub struct Seed<T: Scalar> {
    pub(crate) c0: Vec<EPoly<T>>,
    pub(crate) d0: Vec<EPoly<T>>,
    lambda: Vec<Component<T>>,
    s: Vec<Component<T>>,
    pub(crate) ctx: T::Context,
}

/// Options for building a [`Seed`].
#[derive(Clone, Copy, Debug)]
pub struct SeedOptions {
    /// Use the recurrence form for rational pieces of λ0 and s0. Turning it
    /// off gives the plain dense convolutions; the results agree to working
    /// precision.
    pub rational_multipliers: bool,
}

impl Default for SeedOptions {
    fn default() -> Self {
        SeedOptions {
            rational_multipliers: true,
        }
    }
}

impl<T: Scalar> Seed<T> {
    /// Expands bound λ0 and s0 about `x0` to `order` and prepares the
    /// convolution multipliers.
    #[allow(clippy::too_many_arguments)]
    pub fn build(
        lambda0: &Expr,
        s0: &Expr,
        eigen: &str,
        var: &str,
        x0: &Rational,
        order: usize,
        ctx: &T::Context,
        options: SeedOptions,
    ) -> Result<Self, AimError> {
        let c0 = expand_series::<T>(lambda0, eigen, var, x0, order, ctx)?.into_coeffs();
        let d0 = expand_series::<T>(s0, eigen, var, x0, order, ctx)?.into_coeffs();
        let lambda = components(lambda0, eigen, var, x0, order, ctx, options)?;
        let s = components(s0, eigen, var, x0, order, ctx, options)?;
        Ok(Seed {
            c0,
            d0,
            lambda,
            s,
            ctx: ctx.clone(),
        })
    }

    /// Seed from already expanded series, using dense convolutions.
    pub fn from_series(c0: Vec<EPoly<T>>, d0: Vec<EPoly<T>>, ctx: &T::Context) -> Result<Self, AimError> {
        if c0.len() != d0.len() || c0.is_empty() {
            return Err(AimError::SeedMismatch(format!(
                "λ0 has {} coefficients, s0 has {}",
                c0.len(),
                d0.len()
            )));
        }
        let split = |series: &[EPoly<T>]| -> Vec<Component<T>> {
            let top = series.iter().filter_map(EPoly::degree).max();
            let Some(top) = top else { return Vec::new() };
            (0..=top)
                .map(|k| Component {
                    power: k,
                    mult: Multiplier::Dense(
                        series
                            .iter()
                            .map(|p| p.coeff(k).cloned().unwrap_or_else(|| T::zero(ctx)))
                            .collect(),
                    ),
                })
                .collect()
        };
        Ok(Seed {
            lambda: split(&c0),
            s: split(&d0),
            c0,
            d0,
            ctx: ctx.clone(),
        })
    }

    pub fn order(&self) -> usize {
        self.c0.len() - 1
    }

    pub fn lambda0(&self) -> &[EPoly<T>] {
        &self.c0
    }

    pub fn s0(&self) -> &[EPoly<T>] {
        &self.d0
    }

    /// `Σ_{j=0..i} λ0_j c_{i-j}` for `i < len`.
    pub(crate) fn convolve_lambda(&self, c: &[EPoly<T>], len: usize, exec: Execution) -> Vec<EPoly<T>> {
        convolve(&self.lambda, c, len, &self.ctx, exec)
    }

    /// `Σ_{j=0..i} s0_j c_{i-j}` for `i < len`.
    pub(crate) fn convolve_s(&self, c: &[EPoly<T>], len: usize, exec: Execution) -> Vec<EPoly<T>> {
        convolve(&self.s, c, len, &self.ctx, exec)
    }
}

fn components<T: Scalar>(
    e: &Expr,
    eigen: &str,
    var: &str,
    x0: &Rational,
    order: usize,
    ctx: &T::Context,
    options: SeedOptions,
) -> Result<Vec<Component<T>>, AimError> {
    let mut out = Vec::new();
    for (power, part) in eigen_components(e, eigen)?.into_iter().enumerate() {
        if part.as_exact().is_some_and(|v| v == ExactComplex::from(0)) {
            continue;
        }
        let form = options
            .rational_multipliers
            .then(|| rational_form(&part, var))
            .flatten();
        let mult = match form {
            Some(form) => {
                let shifted = form.shifted(&ExactComplex::real(x0.clone()));
                let conv = |p: &[ExactComplex]| -> Result<Vec<T>, AimError> {
                    p.iter().map(|v| Ok(T::from_exact(v, ctx)?)).collect()
                };
                let num = conv(&shifted.num)?;
                let den = conv(&shifted.den)?;
                let inv_den0 = T::one(ctx)
                    .div_ref(&den[0])
                    .ok_or_else(|| AimError::Expr(crate::expr::ExprError::Singular(format!("{part} at {x0}"))))?;
                Multiplier::Rational { num, den, inv_den0 }
            }
            None => Multiplier::Dense(expand_scalar_series::<T>(&part, var, x0, order, ctx)?),
        };
        out.push(Component { power, mult });
    }
    Ok(out)
}

fn convolve<T: Scalar>(
    parts: &[Component<T>],
    c: &[EPoly<T>],
    len: usize,
    ctx: &T::Context,
    exec: Execution,
) -> Vec<EPoly<T>> {
    let mut out = vec![EPoly::zero(ctx); len];
    for part in parts {
        let mut piece = match &part.mult {
            Multiplier::Dense(m) => exec.map_range(len, |i| {
                let mut acc = EPoly::zero(ctx);
                let mut tmp = T::zero(ctx);
                for j in 0..=i {
                    if !m[j].is_zero() {
                        acc.add_scaled_assign(&m[j], &c[i - j], &mut tmp);
                    }
                }
                acc
            }),
            Multiplier::Rational { num, den, inv_den0 } => {
                let g = exec.map_range(len, |i| {
                    let mut acc = EPoly::zero(ctx);
                    let mut tmp = T::zero(ctx);
                    for (l, a) in num.iter().enumerate().take(i + 1) {
                        if !a.is_zero() {
                            acc.add_scaled_assign(a, &c[i - l], &mut tmp);
                        }
                    }
                    acc
                });
                // den * r = g, solved for r term by term.
                let mut r: Vec<EPoly<T>> = Vec::with_capacity(len);
                let mut tmp = T::zero(ctx);
                for (i, mut gi) in g.into_iter().enumerate() {
                    for (l, b) in den.iter().enumerate().skip(1).take(i) {
                        if !b.is_zero() {
                            let mut neg = b.clone();
                            neg.neg_assign();
                            gi.add_scaled_assign(&neg, &r[i - l], &mut tmp);
                        }
                    }
                    r.push(gi.scale(inv_den0));
                }
                r
            }
        };
        for (o, p) in out.iter_mut().zip(piece.iter_mut()) {
            p.shift_up(part.power);
            o.add_assign_unchecked(p);
        }
    }
    out
}
