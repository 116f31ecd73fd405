use std::collections::BTreeSet;
use std::fmt;

use rug::Rational;

use crate::numerics::ExactComplex;

/// Functions accepted by the expression grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
        }
    }
}

/// Expression tree. Every numeric leaf is an exact rational.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Rational(Rational),
    Imag,
    Symbol(String),
    Neg(Box<Expr>),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Div(Box<Expr>, Box<Expr>),
    PowInt(Box<Expr>, i64),
    PowRat(Box<Expr>, Rational),
    Func(Func, Box<Expr>),
}

impl Expr {
    pub fn int(v: i64) -> Expr {
        Expr::Rational(Rational::from(v))
    }

    pub fn symbol(name: &str) -> Expr {
        Expr::Symbol(name.to_string())
    }

    /// Constant node for an exact complex value: `q`, `q*I` or `a + b*I`.
    pub fn from_exact(value: &ExactComplex) -> Expr {
        let re = Expr::Rational(value.re().clone());
        if value.is_real() {
            return re;
        }
        let im = if *value.im() == 1 {
            Expr::Imag
        } else {
            Expr::Mul(vec![Expr::Rational(value.im().clone()), Expr::Imag])
        };
        if *value.re() == 0 {
            im
        } else {
            Expr::Add(vec![re, im])
        }
    }

    /// Free symbols, sorted.
    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |e| {
            if let Expr::Symbol(s) = e {
                out.insert(s.clone());
            }
        });
        out
    }

    pub fn contains_symbol(&self, name: &str) -> bool {
        let mut found = false;
        self.visit(&mut |e| {
            if matches!(e, Expr::Symbol(s) if s == name) {
                found = true;
            }
        });
        found
    }

    pub fn contains_imag(&self) -> bool {
        let mut found = false;
        self.visit(&mut |e| found |= matches!(e, Expr::Imag));
        found
    }

    fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Rational(_) | Expr::Imag | Expr::Symbol(_) => {}
            Expr::Neg(a) | Expr::PowInt(a, _) | Expr::PowRat(a, _) | Expr::Func(_, a) => a.visit(f),
            Expr::Add(xs) | Expr::Mul(xs) => xs.iter().for_each(|x| x.visit(f)),
            Expr::Div(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    /// Replaces symbols for which `f` returns a value.
    pub fn substitute(&self, f: &impl Fn(&str) -> Option<Expr>) -> Expr {
        let rec = |e: &Expr| Box::new(e.substitute(f));
        match self {
            Expr::Symbol(s) => f(s).unwrap_or_else(|| self.clone()),
            Expr::Rational(_) | Expr::Imag => self.clone(),
            Expr::Neg(a) => Expr::Neg(rec(a)),
            Expr::Add(xs) => Expr::Add(xs.iter().map(|x| x.substitute(f)).collect()),
            Expr::Mul(xs) => Expr::Mul(xs.iter().map(|x| x.substitute(f)).collect()),
            Expr::Div(a, b) => Expr::Div(rec(a), rec(b)),
            Expr::PowInt(a, k) => Expr::PowInt(rec(a), *k),
            Expr::PowRat(a, q) => Expr::PowRat(rec(a), q.clone()),
            Expr::Func(g, a) => Expr::Func(*g, rec(a)),
        }
    }

    /// Exact value when the expression is built from constants by field
    /// operations and integer powers only.
    pub fn as_exact(&self) -> Option<ExactComplex> {
        Some(match self {
            Expr::Rational(q) => ExactComplex::real(q.clone()),
            Expr::Imag => ExactComplex::i(),
            Expr::Symbol(_) | Expr::Func(..) => return None,
            Expr::Neg(a) => a.as_exact()?.neg(),
            Expr::Add(xs) => {
                let mut acc = ExactComplex::from(0);
                for x in xs {
                    acc = acc.add(&x.as_exact()?);
                }
                acc
            }
            Expr::Mul(xs) => {
                let mut acc = ExactComplex::from(1);
                for x in xs {
                    acc = acc.mul(&x.as_exact()?);
                }
                acc
            }
            Expr::Div(a, b) => a.as_exact()?.mul(&b.as_exact()?.inv()?),
            Expr::PowInt(a, k) => a.as_exact()?.powi(*k)?,
            Expr::PowRat(a, q) => {
                // Only exact when the power is itself rational, e.g. 4^(1/2).
                let base = a.as_exact()?;
                if !base.is_real() {
                    return None;
                }
                ExactComplex::real(exact_rational_power(base.re(), q)?)
            }
        })
    }

    /// Folds constant subtrees into single leaves and flattens nested sums
    /// and products. Transcendental constants such as `exp(1/5)` stay
    /// symbolic so no rounding happens here.
    pub fn fold(&self) -> Expr {
        if let Some(v) = self.as_exact() {
            return Expr::from_exact(&v);
        }
        match self {
            Expr::Neg(a) => match a.fold() {
                Expr::Neg(inner) => *inner,
                Expr::Mul(mut xs) if matches!(xs.first(), Some(Expr::Rational(_))) => {
                    if let Expr::Rational(q) = &mut xs[0] {
                        *q = Rational::from(-&*q);
                    }
                    Expr::Mul(xs)
                }
                other => Expr::Neg(Box::new(other)),
            },
            Expr::Add(xs) => fold_nary(xs, true),
            Expr::Mul(xs) => fold_nary(xs, false),
            Expr::Div(a, b) => Expr::Div(Box::new(a.fold()), Box::new(b.fold())),
            Expr::PowInt(a, k) => match k {
                0 => Expr::int(1),
                1 => a.fold(),
                _ => Expr::PowInt(Box::new(a.fold()), *k),
            },
            Expr::PowRat(a, q) => Expr::PowRat(Box::new(a.fold()), q.clone()),
            Expr::Func(g, a) => Expr::Func(*g, Box::new(a.fold())),
            _ => self.clone(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(_) => 1,
            Expr::Mul(_) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::PowInt(..) | Expr::PowRat(..) => 4,
            Expr::Rational(q) if *q.denom() != 1 => 2,
            Expr::Rational(q) if *q < 0 => 3,
            _ => 5,
        }
    }
}

fn fold_nary(xs: &[Expr], add: bool) -> Expr {
    let mut constant = if add { ExactComplex::from(0) } else { ExactComplex::from(1) };
    let mut rest = Vec::new();
    for x in xs {
        let x = x.fold();
        let parts = match x {
            Expr::Add(inner) if add => inner,
            Expr::Mul(inner) if !add => inner,
            other => vec![other],
        };
        for p in parts {
            match p.as_exact() {
                Some(v) if add => constant = constant.add(&v),
                Some(v) => constant = constant.mul(&v),
                None => rest.push(p),
            }
        }
    }
    if !add && constant == ExactComplex::from(0) {
        return Expr::int(0);
    }
    let neutral = if add { ExactComplex::from(0) } else { ExactComplex::from(1) };
    if constant != neutral {
        rest.insert(0, Expr::from_exact(&constant));
    }
    match rest.len() {
        0 => Expr::from_exact(&neutral),
        1 => rest.pop().unwrap(),
        _ if add => Expr::Add(rest),
        _ => Expr::Mul(rest),
    }
}

/// `base^q` when the result is rational.
fn exact_rational_power(base: &Rational, q: &Rational) -> Option<Rational> {
    let den = q.denom().to_u32()?;
    let num = q.numer().to_i32()?;
    if *base < 0 && den % 2 == 0 {
        return None;
    }
    let root = |z: &rug::Integer| -> Option<rug::Integer> {
        let r = z.clone().abs().root(den);
        if r.clone().pow(den) == z.clone().abs() {
            Some(if *z < 0 { -r } else { r })
        } else {
            None
        }
    };
    let r = Rational::from((root(base.numer())?, root(base.denom())?));
    if num < 0 {
        if r == 0 {
            return None;
        }
        Some(r.recip().pow(num.unsigned_abs()))
    } else {
        Some(r.pow(num as u32))
    }
}

use rug::ops::Pow;

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |e: &Expr, min: u8, f: &mut fmt::Formatter<'_>| {
            if e.precedence() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            Expr::Rational(q) => write!(f, "{q}"),
            Expr::Imag => write!(f, "I"),
            Expr::Symbol(s) => write!(f, "{s}"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                wrap(a, 2, f)
            }
            Expr::Add(xs) => {
                for (k, x) in xs.iter().enumerate() {
                    match (k, x) {
                        (0, _) => wrap(x, 1, f)?,
                        (_, Expr::Neg(inner)) => {
                            write!(f, " - ")?;
                            wrap(inner, 2, f)?
                        }
                        _ => {
                            write!(f, " + ")?;
                            wrap(x, 2, f)?
                        }
                    }
                }
                Ok(())
            }
            Expr::Mul(xs) => {
                for (k, x) in xs.iter().enumerate() {
                    if k > 0 {
                        write!(f, "*")?;
                    }
                    wrap(x, if k == 0 { 2 } else { 3 }, f)?;
                }
                Ok(())
            }
            Expr::Div(a, b) => {
                wrap(a, 2, f)?;
                write!(f, "/")?;
                wrap(b, 3, f)
            }
            Expr::PowInt(a, k) => {
                wrap(a, 5, f)?;
                write!(f, "^{k}")
            }
            Expr::PowRat(a, q) => {
                wrap(a, 5, f)?;
                write!(f, "^({q})")
            }
            Expr::Func(g, a) => write!(f, "{}({a})", g.name()),
        }
    }
}
