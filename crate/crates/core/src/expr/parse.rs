use rug::{Integer, Rational};

use super::{Expr, ExprError, Func};

/// Parses expression text into an [`Expr`].
///
/// Precedence, loosest first: binary `+ -`, then `* /`, then unary minus,
/// then `^`. A minus in front of a product negates the product as a whole.
/// A power chain `a^2^3` associates to the right. Division of two integer
/// literals is folded into a rational leaf at parse time.
pub fn parse_expression(text: &str) -> Result<Expr, ExprError> {
    let mut p = Parser { src: text, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < text.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn syntax(&self, message: &str) -> ExprError {
        ExprError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.peek_char().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_char()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ExprError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.syntax(&format!("expected '{c}'")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat('+') {
                terms.push(self.term()?);
            } else if self.eat('-') {
                terms.push(Expr::Neg(Box::new(self.term()?)));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::Add(terms) })
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        // A leading minus negates the whole product: -a*b is -(a*b).
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.term()?)));
        }
        let mut factors = vec![self.factor()?];
        loop {
            if self.eat('*') {
                factors.push(self.factor()?);
            } else if self.peek() == Some('/') {
                let at = self.pos;
                self.pos += 1;
                let rhs = self.factor()?;
                let lhs = factors.pop().unwrap();
                factors.push(divide(lhs, rhs, at)?);
            } else {
                break;
            }
        }
        Ok(if factors.len() == 1 { factors.pop().unwrap() } else { Expr::Mul(factors) })
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.base()?;
        if self.eat('^') {
            return self.exponent(base);
        }
        Ok(base)
    }

    fn exponent(&mut self, base: Expr) -> Result<Expr, ExprError> {
        if self.eat('(') {
            let negative = self.eat('-');
            let q = self.rational()?;
            self.expect(')')?;
            let q = if negative { -q } else { q };
            return Ok(if *q.denom() == 1 {
                Expr::PowInt(Box::new(base), self.small_int(q.numer())?)
            } else {
                Expr::PowRat(Box::new(base), q)
            });
        }
        let negative = self.eat('-');
        let start = self.pos;
        let mut k = self.integer()?;
        // Right associativity: 2^3^2 is 2^9.
        if self.eat('^') {
            let inner = self.exponent(Expr::Rational(Rational::from(k.clone())))?;
            k = match inner.as_exact() {
                Some(v) if v.is_real() && *v.re().denom() == 1 => v.re().numer().clone(),
                _ => {
                    self.pos = start;
                    return Err(self.syntax("exponent must be an integer or a parenthesized rational"));
                }
            };
        }
        if negative {
            k = -k;
        }
        Ok(Expr::PowInt(Box::new(base), self.small_int(&k)?))
    }

    fn small_int(&self, k: &Integer) -> Result<i64, ExprError> {
        k.to_i64()
            .filter(|v| v.unsigned_abs() <= 1 << 20)
            .ok_or_else(|| self.syntax("exponent out of range"))
    }

    fn base(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => Ok(Expr::Rational(Rational::from(self.integer()?))),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self
                    .peek_char()
                    .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
                {
                    self.pos += 1;
                }
                let name = &self.src[start..self.pos];
                if name == "I" {
                    return Ok(Expr::Imag);
                }
                if let Some(func) = Func::from_name(name) {
                    self.expect('(')?;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return Ok(Expr::Func(func, Box::new(arg)));
                }
                if self.peek() == Some('(') {
                    return Err(ExprError::UnknownFunction {
                        name: name.to_string(),
                        offset: start,
                    });
                }
                Ok(Expr::Symbol(name.to_string()))
            }
            Some(_) => Err(self.syntax("expected a number, symbol, function or '('")),
            None => Err(self.syntax("unexpected end of input")),
        }
    }

    fn integer(&mut self) -> Result<Integer, ExprError> {
        self.skip_ws();
        let start = self.pos;
        while self.peek_char().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.syntax("expected an integer"));
        }
        if matches!(self.peek_char(), Some('.') | Some('e') | Some('E')) {
            return Err(ExprError::MalformedRational {
                offset: start,
                message: "decimal literals are not accepted, write a fraction such as 2/10".into(),
            });
        }
        Ok(self.src[start..self.pos].parse().expect("digits parse as an integer"))
    }

    fn rational(&mut self) -> Result<Rational, ExprError> {
        let num = self.integer()?;
        if !self.eat('/') {
            return Ok(Rational::from(num));
        }
        let at = self.pos;
        let den = self.integer()?;
        if den == 0 {
            return Err(ExprError::MalformedRational {
                offset: at,
                message: "zero denominator".into(),
            });
        }
        Ok(Rational::from((num, den)))
    }
}

fn divide(lhs: Expr, rhs: Expr, at: usize) -> Result<Expr, ExprError> {
    if let (Expr::Rational(a), Expr::Rational(b)) = (&lhs, &rhs) {
        if *a.denom() == 1 && *b.denom() == 1 {
            if *b == 0 {
                return Err(ExprError::MalformedRational {
                    offset: at,
                    message: "zero denominator".into(),
                });
            }
            return Ok(Expr::Rational(Rational::from(a / b)));
        }
    }
    Ok(Expr::Div(Box::new(lhs), Box::new(rhs)))
}
