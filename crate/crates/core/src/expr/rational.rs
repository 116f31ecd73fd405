use super::Expr;
use crate::numerics::ExactComplex;

/// Beyond this degree a dense series product is as cheap as the rational
/// recurrence, so no form is reported.
const MAX_DEGREE: usize = 24;

/// `num(x) / den(x)` with exact coefficients, ascending powers of the
/// variable.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalForm {
    pub num: Vec<ExactComplex>,
    pub den: Vec<ExactComplex>,
}

impl RationalForm {
    /// The same function in the shifted variable `t = x - x0`.
    pub fn shifted(&self, x0: &ExactComplex) -> RationalForm {
        RationalForm {
            num: taylor_shift(&self.num, x0),
            den: taylor_shift(&self.den, x0),
        }
    }
}

/// Writes a bound expression in `var` as a ratio of two polynomials, when
/// it is one of modest degree. Transcendental functions and rational powers
/// give `None`.
pub fn rational_form(e: &Expr, var: &str) -> Option<RationalForm> {
    let (num, den) = form(e, var)?;
    let (num, den) = (trim(num), trim(den));
    if den.is_empty() {
        return None;
    }
    Some(RationalForm { num, den })
}

type Poly = Vec<ExactComplex>;

fn form(e: &Expr, var: &str) -> Option<(Poly, Poly)> {
    let one = || vec![ExactComplex::from(1)];
    let out = match e {
        Expr::Symbol(s) if s == var => (vec![ExactComplex::from(0), ExactComplex::from(1)], one()),
        Expr::Symbol(_) | Expr::Func(..) | Expr::PowRat(..) => {
            let v = e.as_exact()?;
            (vec![v], one())
        }
        Expr::Rational(_) | Expr::Imag => (vec![e.as_exact()?], one()),
        Expr::Neg(a) => {
            let (n, d) = form(a, var)?;
            (n.iter().map(ExactComplex::neg).collect(), d)
        }
        Expr::Add(xs) => {
            let mut acc: Option<(Poly, Poly)> = None;
            for x in xs {
                let (n, d) = form(x, var)?;
                acc = Some(match acc {
                    None => (n, d),
                    Some((an, ad)) if ad == d => (add(&an, &n), d),
                    Some((an, ad)) => (add(&mul(&an, &d), &mul(&n, &ad)), mul(&ad, &d)),
                });
            }
            acc?
        }
        Expr::Mul(xs) => {
            let mut n = one();
            let mut d = one();
            for x in xs {
                let (xn, xd) = form(x, var)?;
                n = mul(&n, &xn);
                d = mul(&d, &xd);
            }
            (n, d)
        }
        Expr::Div(a, b) => {
            let (an, ad) = form(a, var)?;
            let (bn, bd) = form(b, var)?;
            (mul(&an, &bd), mul(&ad, &bn))
        }
        Expr::PowInt(a, k) => {
            if k.unsigned_abs() > MAX_DEGREE as u64 {
                return None;
            }
            let (n, d) = form(a, var)?;
            let (base_n, base_d) = if *k < 0 { (d, n) } else { (n, d) };
            let mut pn = one();
            let mut pd = one();
            for _ in 0..k.unsigned_abs() {
                pn = mul(&pn, &base_n);
                pd = mul(&pd, &base_d);
            }
            (pn, pd)
        }
    };
    let out = (trim(out.0), trim(out.1));
    if out.0.len() > MAX_DEGREE + 1 || out.1.len() > MAX_DEGREE + 1 {
        return None;
    }
    Some(out)
}

fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(|c| *c == ExactComplex::from(0)) {
        p.pop();
    }
    p
}

fn add(a: &[ExactComplex], b: &[ExactComplex]) -> Poly {
    (0..a.len().max(b.len()))
        .map(|k| match (a.get(k), b.get(k)) {
            (Some(x), Some(y)) => x.add(y),
            (Some(x), None) | (None, Some(x)) => x.clone(),
            (None, None) => unreachable!(),
        })
        .collect()
}

fn mul(a: &[ExactComplex], b: &[ExactComplex]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ExactComplex::from(0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

/// Coefficients of `p(x0 + t)` in `t`.
fn taylor_shift(p: &[ExactComplex], x0: &ExactComplex) -> Poly {
    // Horner in the shifted basis.
    let mut out: Poly = Vec::new();
    for c in p.iter().rev() {
        let shifted = mul(&out, &[x0.clone(), ExactComplex::from(1)]);
        out = add(&shifted, std::slice::from_ref(c));
    }
    trim(out)
}

#[cfg(test)]
mod tests {
    use rug::Rational;

    use super::*;
    use crate::expr::parse_expression;

    fn q(a: i64, b: i64) -> ExactComplex {
        ExactComplex::real(Rational::from((a, b)))
    }

    #[test]
    fn yukawa_lambda0() {
        let e = parse_expression("6 - 2/r").unwrap();
        let f = rational_form(&e, "r").unwrap();
        assert_eq!(f.num, vec![q(-2, 1), q(6, 1)]);
        assert_eq!(f.den, vec![q(0, 1), q(1, 1)]);
        let s = f.shifted(&q(1, 3));
        assert_eq!(s.num, vec![q(0, 1), q(6, 1)]);
        assert_eq!(s.den, vec![q(1, 3), q(1, 1)]);
    }

    #[test]
    fn transcendental_has_no_form() {
        assert!(rational_form(&parse_expression("exp(-r/5)/r").unwrap(), "r").is_none());
        assert!(rational_form(&parse_expression("r^(1/2)").unwrap(), "r").is_none());
    }

    #[test]
    fn negative_powers() {
        let f = rational_form(&parse_expression("(1 - r)^-2 + 3").unwrap(), "r").unwrap();
        // 3 + 1/(1-r)^2 = (4 - 6r + 3r^2) / (1 - 2r + r^2)
        assert_eq!(f.num, vec![q(4, 1), q(-6, 1), q(3, 1)]);
        assert_eq!(f.den, vec![q(1, 1), q(-2, 1), q(1, 1)]);
    }
}
