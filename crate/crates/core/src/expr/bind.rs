use std::collections::BTreeMap;

use super::{Expr, ExprError};
use crate::numerics::ExactComplex;

/// Exact values for the named parameters of a problem.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParameterBinding {
    values: BTreeMap<String, ExactComplex>,
}

impl ParameterBinding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: &str, value: ExactComplex) {
        self.values.insert(name.to_string(), value);
    }

    /// Evaluates `e` against the current bindings and stores the result
    /// under `name`. The value must come out exact.
    pub fn define(&mut self, name: &str, e: &Expr) -> Result<ExactComplex, ExprError> {
        let bound = e.substitute(&|s| self.values.get(s).map(Expr::from_exact));
        if let Some(free) = bound.symbols().into_iter().next() {
            return Err(ExprError::Unbound(free));
        }
        let value = bound
            .as_exact()
            .ok_or_else(|| ExprError::NotExact(e.to_string()))?;
        self.insert(name, value.clone());
        Ok(value)
    }

    pub fn get(&self, name: &str) -> Option<&ExactComplex> {
        self.values.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.values.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &ExactComplex)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Replaces every bound parameter of `e` by its exact value and folds
/// constants. Symbols other than `eigen` and `var` must all be bound.
pub fn bind_parameters(
    e: &Expr,
    binding: &ParameterBinding,
    eigen: &str,
    var: &str,
) -> Result<Expr, ExprError> {
    for reserved in [eigen, var] {
        if binding.contains(reserved) {
            return Err(ExprError::ReservedBinding(reserved.to_string()));
        }
    }
    let bound = e.substitute(&|s| binding.get(s).map(Expr::from_exact));
    if let Some(free) = bound.symbols().into_iter().find(|s| s != eigen && s != var) {
        return Err(ExprError::Unbound(free));
    }
    Ok(bound.fold())
}

/// Splits `e` into `[e_0, e_1, ...]` with `e = Σ eigen^k e_k` and every
/// `e_k` free of `eigen`. Fails when `eigen` appears non-polynomially.
pub fn eigen_components(e: &Expr, eigen: &str) -> Result<Vec<Expr>, ExprError> {
    if !e.contains_symbol(eigen) {
        return Ok(vec![e.clone()]);
    }
    let parts = match e {
        Expr::Symbol(_) => vec![Expr::int(0), Expr::int(1)],
        Expr::Neg(a) => eigen_components(a, eigen)?
            .into_iter()
            .map(|c| Expr::Neg(Box::new(c)))
            .collect(),
        Expr::Add(xs) => {
            let mut acc: Vec<Vec<Expr>> = Vec::new();
            for x in xs {
                for (k, c) in eigen_components(x, eigen)?.into_iter().enumerate() {
                    if acc.len() <= k {
                        acc.resize(k + 1, Vec::new());
                    }
                    acc[k].push(c);
                }
            }
            acc.into_iter().map(Expr::Add).collect()
        }
        Expr::Mul(xs) => {
            let mut acc = vec![Expr::int(1)];
            for x in xs {
                acc = convolve(&acc, &eigen_components(x, eigen)?);
            }
            acc
        }
        Expr::Div(a, b) => {
            if b.contains_symbol(eigen) {
                return Err(ExprError::EigenNotPolynomial(format!("the denominator {b}")));
            }
            eigen_components(a, eigen)?
                .into_iter()
                .map(|c| Expr::Div(Box::new(c), b.clone()))
                .collect()
        }
        Expr::PowInt(a, k) if *k >= 0 => {
            let base = eigen_components(a, eigen)?;
            let mut acc = vec![Expr::int(1)];
            for _ in 0..*k {
                acc = convolve(&acc, &base);
            }
            acc
        }
        other => return Err(ExprError::EigenNotPolynomial(other.to_string())),
    };
    let mut parts: Vec<Expr> = parts.iter().map(Expr::fold).collect();
    while parts.len() > 1 && parts.last().is_some_and(|p| p.as_exact().is_some_and(|v| v == ExactComplex::from(0))) {
        parts.pop();
    }
    Ok(parts)
}

fn convolve(a: &[Expr], b: &[Expr]) -> Vec<Expr> {
    let mut out: Vec<Vec<Expr>> = vec![Vec::new(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j].push(Expr::Mul(vec![x.clone(), y.clone()]));
        }
    }
    out.into_iter().map(Expr::Add).collect()
}

#[cfg(test)]
mod tests {
    use rug::Rational;

    use super::*;
    use crate::expr::parse_expression;

    fn binding(pairs: &[(&str, (i64, i64))]) -> ParameterBinding {
        let mut b = ParameterBinding::new();
        for (k, v) in pairs {
            b.insert(k, ExactComplex::real(Rational::from(*v)));
        }
        b
    }

    #[test]
    fn binds_beta() {
        let e = parse_expression("2*beta - 2/r").unwrap();
        let got = bind_parameters(&e, &binding(&[("beta", (3, 1))]), "En", "r").unwrap();
        assert_eq!(got, parse_expression("6 - 2/r").unwrap());
        assert_eq!(got.to_string(), "6 - 2/r");
    }

    #[test]
    fn binds_alpha() {
        let e = parse_expression("exp(-alpha*r)").unwrap();
        let got = bind_parameters(&e, &binding(&[("alpha", (1, 5))]), "En", "r").unwrap();
        assert_eq!(got.to_string(), "exp(-1/5*r)");
    }

    #[test]
    fn partial_binding_keeps_eigen() {
        let e = parse_expression("En + m").unwrap();
        let got = bind_parameters(&e, &binding(&[("m", (1, 2))]), "En", "r").unwrap();
        assert_eq!(got.to_string(), "1/2 + En");
        assert_eq!(got.symbols().into_iter().collect::<Vec<_>>(), vec!["En".to_string()]);
    }

    #[test]
    fn binding_errors() {
        let e = parse_expression("gamma*r + En").unwrap();
        assert_eq!(
            bind_parameters(&e, &ParameterBinding::new(), "En", "r"),
            Err(ExprError::Unbound("gamma".into()))
        );
        assert_eq!(
            bind_parameters(&e, &binding(&[("gamma", (1, 1)), ("r", (1, 1))]), "En", "r"),
            Err(ExprError::ReservedBinding("r".into()))
        );
    }

    #[test]
    fn defines_from_earlier_parameters() {
        let mut b = binding(&[("m", (1, 2)), ("hbar", (1, 1)), ("A", (4, 1))]);
        let v = b.define("A1", &parse_expression("2*m/hbar^2*A").unwrap()).unwrap();
        assert_eq!(v, ExactComplex::from(4));
        assert!(matches!(
            b.define("x", &parse_expression("exp(1)").unwrap()),
            Err(ExprError::NotExact(_))
        ));
    }

    #[test]
    fn components() {
        let e = parse_expression("(2 + En)^2*r - 3*En/r").unwrap();
        let parts = eigen_components(&e, "En").unwrap();
        assert_eq!(parts.len(), 3);
        let at = |k: usize| {
            parts[k]
                .substitute(&|s| (s == "r").then(|| Expr::int(2)))
                .as_exact()
                .unwrap()
        };
        // At r = 2: 8 + (8 - 3/2) En + 2 En^2.
        assert_eq!(at(0), ExactComplex::from(8));
        assert_eq!(at(1), ExactComplex::real(Rational::from((13, 2))));
        assert_eq!(at(2), ExactComplex::from(2));
        assert!(eigen_components(&parse_expression("exp(En)").unwrap(), "En").is_err());
        assert!(eigen_components(&parse_expression("1/En").unwrap(), "En").is_err());
    }
}
