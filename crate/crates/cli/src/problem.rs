//! Problem files.
//!
//! A problem file is line oriented:
//!
//! ```text
//! # comment
//! [problem]
//! name = yukawa
//! [symbols]
//! eigenvalue = En
//! variable = r
//! [expressions]
//! lambda0 = 2*beta - 2/r
//! s0 = ...
//! [parameters]
//! beta = 3
//! [definitions]
//! A1 = 2*m/hbar^2*A
//! [solver]
//! x0 = 1/beta
//! tol = 1e-20
//! [oracle]
//! potential = -A*exp(-alpha*r)/r + L*(L+1)/r^2
//! ```
//!
//! Values are expressions in the solver grammar, so every number stays
//! exact. Parameters are exact constants and may be overridden;
//! definitions are evaluated after the parameters, in file order, and may be
//! constants or functions of the variable. Names listed under `[required]`
//! must be supplied by an override before the problem can run.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use aimkit::aim::{AimProblem, Seed, SeedOptions, SolverParams};
use aimkit::expr::{bind_parameters, parse_expression, Expr, ParameterBinding};
use aimkit::numerics::{BigComplex, PrecisionContext};
use aimkit::parallel::Execution;
use aimkit::roots::{RootFilter, TolMode};
use rug::Rational;

use crate::oracle::OracleSpec;

const SECTIONS: [&str; 8] = [
    "problem",
    "symbols",
    "expressions",
    "parameters",
    "definitions",
    "required",
    "solver",
    "oracle",
];

/// Keys accepted in `[solver]` and as solver overrides.
pub const SOLVER_KEYS: [&str; 12] = [
    "nmax",
    "nstep",
    "dprec",
    "guard",
    "tol",
    "tol_mode",
    "x0",
    "filter",
    "digits",
    "print_every",
    "real_eps",
    "execution",
];

const ORACLE_KEYS: [&str; 7] = ["potential", "energy_scale", "r_min", "r_max", "h", "e_min", "e_max"];

/// One `key = value` line.
#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

/// A parsed, not yet evaluated problem description.
#[derive(Clone, Debug, Default)]
pub struct ProblemSpec {
    pub name: String,
    pub description: String,
    pub eigen: String,
    pub var: String,
    pub lambda0: String,
    pub s0: String,
    pub parameters: Vec<Entry>,
    pub definitions: Vec<Entry>,
    /// Names that must be supplied as overrides, with a description.
    pub required: Vec<Entry>,
    pub solver: Vec<Entry>,
    pub oracle: Vec<Entry>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ProblemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// Every problem found in one pass.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemErrors(pub Vec<ProblemError>);

impl fmt::Display for ProblemErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ProblemErrors {}

impl ProblemErrors {
    fn single(line: Option<usize>, message: impl Into<String>) -> Self {
        ProblemErrors(vec![ProblemError {
            line,
            message: message.into(),
        }])
    }
}

/// Everything a solve needs, with all parameters bound.
#[derive(Clone, Debug)]
pub struct ResolvedProblem {
    pub name: String,
    pub problem: AimProblem,
    pub params: SolverParams,
    pub binding: ParameterBinding,
    pub oracle: Option<OracleSpec>,
}

struct Errors(Vec<ProblemError>);

impl Errors {
    fn push(&mut self, line: Option<usize>, message: impl Into<String>) {
        self.0.push(ProblemError {
            line,
            message: message.into(),
        });
    }

    fn finish<T>(self, value: T) -> Result<T, ProblemErrors> {
        if self.0.is_empty() {
            Ok(value)
        } else {
            Err(ProblemErrors(self.0))
        }
    }
}

impl ProblemSpec {
    /// Parses the file text and validates it: expressions parse, every free
    /// symbol is bound, and λ0, s0 are regular at the expansion point.
    pub fn parse(text: &str) -> Result<Self, ProblemErrors> {
        let spec = Self::parse_unchecked(text)?;
        spec.validate()?;
        Ok(spec)
    }

    fn parse_unchecked(text: &str) -> Result<Self, ProblemErrors> {
        let mut errs = Errors(Vec::new());
        let mut spec = ProblemSpec::default();
        let mut section: Option<&str> = None;
        let mut seen: BTreeSet<(String, String)> = BTreeSet::new();
        let mut lines: BTreeMap<&str, usize> = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                let name = name.trim();
                match SECTIONS.iter().find(|s| **s == name) {
                    Some(s) => section = Some(s),
                    None => {
                        errs.push(Some(line), format!("unknown section [{name}]"));
                        section = None;
                    }
                }
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                errs.push(Some(line), format!("expected 'key = value', found '{content}'"));
                continue;
            };
            let (key, value) = (key.trim().to_string(), value.trim().to_string());
            let Some(sec) = section else {
                errs.push(Some(line), "entry outside of a section");
                continue;
            };
            if key.is_empty() || value.is_empty() {
                errs.push(Some(line), "empty key or value");
                continue;
            }
            if !seen.insert((sec.to_string(), key.clone())) {
                errs.push(Some(line), format!("duplicate key '{key}' in [{sec}]"));
                continue;
            }
            let entry = Entry {
                key: key.clone(),
                value: value.clone(),
                line,
            };
            match (sec, key.as_str()) {
                ("problem", "name") => spec.name = value,
                ("problem", "description") => spec.description = value,
                ("symbols", "eigenvalue") => spec.eigen = value,
                ("symbols", "variable") => spec.var = value,
                ("expressions", "lambda0") => {
                    spec.lambda0 = value;
                    lines.insert("lambda0", line);
                }
                ("expressions", "s0") => {
                    spec.s0 = value;
                    lines.insert("s0", line);
                }
                ("parameters", _) => spec.parameters.push(entry),
                ("definitions", _) => spec.definitions.push(entry),
                ("required", _) => spec.required.push(entry),
                ("solver", k) if SOLVER_KEYS.contains(&k) => spec.solver.push(entry),
                ("oracle", k) if ORACLE_KEYS.contains(&k) => spec.oracle.push(entry),
                (s, k) => errs.push(Some(line), format!("unknown key '{k}' in [{s}]")),
            }
        }
        for (what, value) in [
            ("[problem] name", &spec.name),
            ("[symbols] eigenvalue", &spec.eigen),
            ("[symbols] variable", &spec.var),
            ("[expressions] lambda0", &spec.lambda0),
            ("[expressions] s0", &spec.s0),
        ] {
            if value.is_empty() {
                errs.push(None, format!("missing {what}"));
            }
        }
        for (name, key) in [("lambda0", &spec.lambda0), ("s0", &spec.s0)] {
            if !key.is_empty() {
                if let Err(e) = parse_expression(key) {
                    errs.push(lines.get(name).copied(), format!("{name}: {e}"));
                }
            }
        }
        errs.finish(spec)
    }

    /// Full resolution without overrides, plus a trial expansion at `x0`.
    /// Problems with unfilled `[required]` names are only checked as far
    /// as possible without them.
    fn validate(&self) -> Result<(), ProblemErrors> {
        if !self.required.is_empty() {
            return self.check_symbols_with_required();
        }
        let r = self.resolve(&[])?;
        let ctx = PrecisionContext::with_dprec(30).expect("valid precision");
        Seed::<BigComplex>::build(
            &r.problem.lambda0,
            &r.problem.s0,
            &r.problem.eigen,
            &r.problem.var,
            &r.params.x0,
            1,
            &ctx,
            SeedOptions::default(),
        )
        .map_err(|e| ProblemErrors::single(None, format!("at x0 = {}: {e}", r.params.x0)))?;
        Ok(())
    }

    fn check_symbols_with_required(&self) -> Result<(), ProblemErrors> {
        let mut errs = Errors(Vec::new());
        let mut known: BTreeSet<String> = [self.eigen.clone(), self.var.clone()].into();
        known.extend(self.parameters.iter().map(|e| e.key.clone()));
        known.extend(self.definitions.iter().map(|e| e.key.clone()));
        known.extend(self.required.iter().map(|e| e.key.clone()));
        let exprs = [("lambda0", &self.lambda0), ("s0", &self.s0)];
        for (name, text) in exprs {
            if let Ok(e) = parse_expression(text) {
                for s in e.symbols().difference(&known) {
                    errs.push(None, format!("{name}: unbound symbol '{s}'"));
                }
            }
        }
        errs.finish(())
    }

    pub fn parameter_names(&self) -> Vec<&str> {
        self.parameters.iter().map(|e| e.key.as_str()).collect()
    }

    /// Binds everything, applying `key=value` overrides to parameters,
    /// required names and solver settings.
    pub fn resolve(&self, overrides: &[(String, String)]) -> Result<ResolvedProblem, ProblemErrors> {
        let mut errs = Errors(Vec::new());
        let mut params: Vec<Entry> = self.parameters.clone();
        let mut solver: Vec<Entry> = self.solver.clone();
        let mut supplied: BTreeMap<String, String> = BTreeMap::new();
        for (key, value) in overrides {
            let entry = |line| Entry {
                key: key.clone(),
                value: value.clone(),
                line,
            };
            if let Some(p) = params.iter_mut().find(|e| &e.key == key) {
                *p = entry(p.line);
            } else if self.required.iter().any(|e| &e.key == key) {
                supplied.insert(key.clone(), value.clone());
            } else if SOLVER_KEYS.contains(&key.as_str()) {
                solver.retain(|e| &e.key != key);
                solver.push(entry(0));
            } else {
                errs.push(None, format!("override '{key}' is not a parameter or solver setting of {}", self.name));
            }
        }
        let missing: Vec<&str> = self
            .required
            .iter()
            .filter(|e| !supplied.contains_key(&e.key))
            .map(|e| e.key.as_str())
            .collect();
        if !missing.is_empty() {
            let detail: Vec<String> = self
                .required
                .iter()
                .filter(|e| missing.contains(&e.key.as_str()))
                .map(|e| format!("{} ({})", e.key, e.value))
                .collect();
            errs.push(
                None,
                format!(
                    "{} needs values for {}; supply them with --set name=expression",
                    self.name,
                    detail.join(", ")
                ),
            );
        }
        if !errs.0.is_empty() {
            return Err(ProblemErrors(errs.0));
        }

        let reserved = [self.eigen.as_str(), self.var.as_str()];
        let line_of = |e: &Entry| (e.line > 0).then_some(e.line);
        let mut binding = ParameterBinding::new();
        for e in &params {
            if reserved.contains(&e.key.as_str()) {
                errs.push(line_of(e), format!("'{}' is reserved", e.key));
                continue;
            }
            match parse_value(&e.value).map_err(|m| m.to_string()).and_then(|x| {
                binding.define(&e.key, &x).map_err(|m| m.to_string())
            }) {
                Ok(_) => {}
                Err(m) => errs.push(line_of(e), format!("parameter {}: {m}", e.key)),
            }
        }
        // Non-constant definitions are substituted symbolically.
        let mut functions: Vec<(String, Expr)> = Vec::new();
        let defs = self.definitions.iter().map(|e| (e, e.value.clone())).chain(
            self.required
                .iter()
                .filter_map(|e| supplied.get(&e.key).map(|v| (e, v.clone()))),
        );
        for (e, text) in defs {
            let parsed = match parse_value(&text) {
                Ok(x) => x,
                Err(m) => {
                    errs.push(line_of(e), format!("definition {}: {m}", e.key));
                    continue;
                }
            };
            let expanded = substitute_all(&parsed, &functions);
            let bound = expanded.substitute(&|s| binding.get(s).map(Expr::from_exact)).fold();
            match bound.as_exact() {
                Some(v) if bound.symbols().is_empty() => binding.insert(&e.key, v),
                _ => functions.push((e.key.clone(), bound)),
            }
        }
        let expr = |name: &str, text: &str, errs: &mut Errors| -> Option<Expr> {
            let parsed = parse_expression(text).ok()?;
            let expanded = substitute_all(&parsed, &functions);
            match bind_parameters(&expanded, &binding, &self.eigen, &self.var) {
                Ok(e) => Some(e),
                Err(m) => {
                    errs.push(None, format!("{name}: {m}"));
                    None
                }
            }
        };
        let lambda0 = expr("lambda0", &self.lambda0, &mut errs);
        let s0 = expr("s0", &self.s0, &mut errs);
        let params = solver_params(&solver, &binding, &mut errs);
        let oracle = if self.oracle.is_empty() {
            None
        } else {
            oracle_spec(&self.oracle, &binding, &functions, &self.var, &mut errs)
        };
        let (Some(lambda0), Some(s0)) = (lambda0, s0) else {
            return Err(ProblemErrors(errs.0));
        };
        errs.finish(ResolvedProblem {
            name: self.name.clone(),
            problem: AimProblem {
                lambda0,
                s0,
                eigen: self.eigen.clone(),
                var: self.var.clone(),
            },
            params,
            binding,
            oracle,
        })
    }
}

fn substitute_all(e: &Expr, functions: &[(String, Expr)]) -> Expr {
    // Later definitions may use earlier ones, so apply in reverse order.
    let mut out = e.clone();
    for (name, value) in functions.iter().rev() {
        out = out.substitute(&|s| (s == name).then(|| value.clone()));
    }
    out
}

/// Expression text, also accepting plain decimals like `0.01`, which are
/// converted exactly.
pub fn parse_value(text: &str) -> Result<Expr, String> {
    if let Some(q) = exact_decimal(text) {
        return Ok(Expr::Rational(q));
    }
    parse_expression(text).map_err(|e| e.to_string())
}

fn exact_decimal(text: &str) -> Option<Rational> {
    let t = text.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, t),
    };
    let (int, frac) = body.split_once('.')?;
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let num: rug::Integer = digits.parse().ok()?;
    let den = rug::Integer::from(rug::Integer::u_pow_u(10, frac.len() as u32));
    let q = Rational::from((num, den));
    Some(if neg { -q } else { q })
}

/// `log10` of a positive tolerance written as `1e-20`, `2.5E-101`,
/// `10^-30` or an exact expression such as `1/1000`.
pub fn parse_tol_log10(text: &str) -> Result<f64, String> {
    let t = text.trim();
    let bad = || format!("tolerance must be a positive number, found '{t}'");
    if let Some((m, e)) = t.split_once(['e', 'E']) {
        let m: f64 = m.parse().map_err(|_| bad())?;
        let e: f64 = e.parse().map_err(|_| bad())?;
        if m <= 0.0 || !m.is_finite() {
            return Err(bad());
        }
        return Ok(m.log10() + e);
    }
    if let Some(e) = t.strip_prefix("10^") {
        let e = e.trim_start_matches('(').trim_end_matches(')');
        return e.parse::<f64>().map_err(|_| bad());
    }
    let q = parse_value(t)?.as_exact().filter(|v| v.is_real()).ok_or_else(bad)?;
    let q = q.re().clone();
    if q <= 0 {
        return Err(bad());
    }
    let log2 = |i: &rug::Integer| {
        let bits = i.significant_bits();
        let shift = bits.saturating_sub(53);
        let top = rug::Integer::from(i >> shift).to_f64();
        top.log2() + shift as f64
    };
    Ok((log2(q.numer()) - log2(q.denom())) / std::f64::consts::LOG2_10)
}

fn exact_rational(text: &str, binding: &ParameterBinding) -> Result<Rational, String> {
    let e = parse_value(text)?;
    let bound = e.substitute(&|s| binding.get(s).map(Expr::from_exact));
    if let Some(s) = bound.symbols().into_iter().next() {
        return Err(format!("unbound symbol '{s}'"));
    }
    match bound.as_exact() {
        Some(v) if v.is_real() => Ok(v.re().clone()),
        _ => Err(format!("'{text}' is not an exact real number")),
    }
}

fn solver_params(entries: &[Entry], binding: &ParameterBinding, errs: &mut Errors) -> SolverParams {
    let mut p = SolverParams::default();
    for e in entries {
        let line = (e.line > 0).then_some(e.line);
        let v = e.value.as_str();
        let int = |v: &str| v.parse::<usize>().map_err(|_| format!("expected a non-negative integer, found '{v}'"));
        let res: Result<(), String> = match e.key.as_str() {
            "nmax" => int(v).map(|x| p.nmax = x),
            "nstep" => int(v).map(|x| p.nstep = x),
            "dprec" => int(v).and_then(|x| u32::try_from(x).map_err(|e| e.to_string())).map(|x| p.dprec = x),
            "guard" => int(v).and_then(|x| u32::try_from(x).map_err(|e| e.to_string())).map(|x| p.guard = x),
            "digits" => int(v).map(|x| p.digits = x),
            "print_every" => int(v).map(|x| p.print_every = x),
            "tol" => parse_tol_log10(v).map(|x| p.tol_log10 = x),
            "real_eps" => parse_tol_log10(v).map(|x| p.real_eps_log10 = Some(x)),
            "tol_mode" => match v {
                "distance" => {
                    let _: () = p.tol_mode = TolMode::Distance;
                    Ok(())
                },
                "strict" => {
                    let _: () = p.tol_mode = TolMode::Strict;
                    Ok(())
                },
                _ => Err(format!("tol_mode must be 'distance' or 'strict', found '{v}'")),
            },
            "execution" => match v {
                "parallel" => {
                    let _: () = p.exec = Execution::Parallel;
                    Ok(())
                },
                "sequential" => {
                    let _: () = p.exec = Execution::Sequential;
                    Ok(())
                },
                _ => Err(format!("execution must be 'parallel' or 'sequential', found '{v}'")),
            },
            "filter" => v.parse::<RootFilter>().map(|f| p.filter = f),
            "x0" => exact_rational(v, binding).map(|x| p.x0 = x),
            other => Err(format!("unknown solver key '{other}'")),
        };
        if let Err(m) = res {
            errs.push(line, format!("{}: {m}", e.key));
        }
    }
    if let Err(m) = p.validate() {
        errs.push(None, m.to_string());
    }
    p
}

fn oracle_spec(
    entries: &[Entry],
    binding: &ParameterBinding,
    functions: &[(String, Expr)],
    var: &str,
    errs: &mut Errors,
) -> Option<OracleSpec> {
    let mut spec = OracleSpec::default_for(Expr::int(0), var);
    let mut have_potential = false;
    for e in entries {
        let line = Some(e.line);
        let number = |errs: &mut Errors| match exact_rational(&e.value, binding) {
            Ok(q) => Some(q.to_f64()),
            Err(m) => {
                errs.push(line, format!("oracle {}: {m}", e.key));
                None
            }
        };
        match e.key.as_str() {
            "potential" => match parse_value(&e.value) {
                Ok(x) => {
                    let x = substitute_all(&x, functions);
                    let bound = x.substitute(&|s| binding.get(s).map(Expr::from_exact)).fold();
                    if let Some(s) = bound.symbols().into_iter().find(|s| s != var) {
                        errs.push(line, format!("oracle potential: unbound symbol '{s}'"));
                    } else {
                        spec.potential = bound;
                        have_potential = true;
                    }
                }
                Err(m) => errs.push(line, format!("oracle potential: {m}")),
            },
            "energy_scale" => spec.energy_scale = number(errs)?,
            "r_min" => spec.r_min = number(errs)?,
            "r_max" => spec.r_max = number(errs)?,
            "h" => spec.h = number(errs)?,
            "e_min" => spec.e_min = Some(number(errs)?),
            "e_max" => spec.e_max = Some(number(errs)?),
            _ => {}
        }
    }
    if !have_potential {
        errs.push(None, "[oracle] needs a potential");
        return None;
    }
    Some(spec)
}

/// Splits a `key=value` override.
pub fn parse_override(text: &str) -> Result<(String, String), String> {
    let (k, v) = text
        .split_once('=')
        .ok_or_else(|| format!("override '{text}' is not of the form key=value"))?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() || v.is_empty() {
        return Err(format!("override '{text}' is not of the form key=value"));
    }
    Ok((k.to_string(), v.to_string()))
}

impl ResolvedProblem {
    /// Parameter values in file order for display.
    pub fn parameter_text(&self) -> Vec<(String, String)> {
        self.binding
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }
}

