//! Exact reference oracles.
//!
//! [`classic_delta`] runs the original asymptotic iteration on polynomials
//! in `x` and `E` with rational coefficients: `λ_k = λ'_{k-1} + s_{k-1} +
//! λ0 λ_{k-1}`, `s_k = s'_{k-1} + s0 λ_{k-1}`, and returns the quantization
//! function `s_n λ_{n-1} - s_{n-1} λ_n` at a point. It differentiates whole
//! functions rather than Taylor coefficients, so it shares no code path with
//! the production recursion.

use std::collections::BTreeMap;
use std::fmt;

use rug::Rational;

/// Polynomial in `x` and `E`: `(i, k) -> coefficient of x^i E^k`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly2 {
    terms: BTreeMap<(u32, u32), Rational>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Self::default()
    }

    /// From `(x power, E power, coefficient)` triples; repeated keys add up.
    pub fn from_terms(terms: &[(u32, u32, i64)]) -> Self {
        let mut p = Poly2::zero();
        for &(i, k, c) in terms {
            p.add_term(i, k, Rational::from(c));
        }
        p
    }

    fn add_term(&mut self, i: u32, k: u32, c: Rational) {
        let slot = self.terms.entry((i, k)).or_default();
        *slot += c;
        if *slot == 0 {
            self.terms.remove(&(i, k));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (&(i, k), c) in &o.terms {
            out.add_term(i, k, c.clone());
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Poly2::zero();
        for (&(i1, k1), a) in &self.terms {
            for (&(i2, k2), b) in &o.terms {
                out.add_term(i1 + i2, k1 + k2, Rational::from(a * b));
            }
        }
        out
    }

    pub fn dx(&self) -> Self {
        let mut out = Poly2::zero();
        for (&(i, k), c) in &self.terms {
            if i > 0 {
                out.add_term(i - 1, k, Rational::from(c * i));
            }
        }
        out
    }

    /// Coefficients in `E` at `x = x0`, lowest first, trailing zeros removed.
    pub fn at(&self, x0: &Rational) -> Vec<Rational> {
        let mut out: Vec<Rational> = Vec::new();
        for (&(i, k), c) in &self.terms {
            let k = k as usize;
            if out.len() <= k {
                out.resize(k + 1, Rational::new());
            }
            let xi = x0.pow_ref_int(i);
            out[k] += Rational::from(c * &xi);
        }
        while out.last().is_some_and(|c| *c == 0) {
            out.pop();
        }
        out
    }
}

trait PowInt {
    fn pow_ref_int(&self, k: u32) -> Rational;
}

impl PowInt for Rational {
    fn pow_ref_int(&self, k: u32) -> Rational {
        let mut acc = Rational::from(1);
        for _ in 0..k {
            acc *= self;
        }
        acc
    }
}

/// Expression text in the grammar of the production parser, with variable
/// `x` and eigenvalue `E`.
impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (&(i, k), c)) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})")?;
            if i > 0 {
                write!(f, "*x^{i}")?;
            }
            if k > 0 {
                write!(f, "*E^{k}")?;
            }
        }
        Ok(())
    }
}

/// `δ_n = s_n λ_{n-1} - s_{n-1} λ_n` at `x0`, as coefficients in `E`.
/// `n >= 1`.
pub fn classic_delta(lambda0: &Poly2, s0: &Poly2, n: usize, x0: &Rational) -> Vec<Rational> {
    assert!(n >= 1);
    let mut lam = vec![lambda0.clone()];
    let mut s = vec![s0.clone()];
    for k in 1..=n {
        let l_prev = &lam[k - 1];
        let s_prev = &s[k - 1];
        let l_next = l_prev.dx().add(s_prev).add(&lambda0.mul(l_prev));
        let s_next = s_prev.dx().add(&s0.mul(l_prev));
        lam.push(l_next);
        s.push(s_next);
    }
    let minus_one = Poly2::from_terms(&[(0, 0, -1)]);
    s[n].mul(&lam[n - 1])
        .add(&minus_one.mul(&s[n - 1].mul(&lam[n])))
        .at(x0)
}

/// Divides by the leading coefficient; `None` for the zero polynomial.
pub fn monic(p: &[Rational]) -> Option<Vec<Rational>> {
    let lead = p.iter().rev().find(|c| **c != 0)?.clone();
    let len = p.iter().rposition(|c| *c != 0)? + 1;
    Some(p[..len].iter().map(|c| Rational::from(c / &lead)).collect())
}
