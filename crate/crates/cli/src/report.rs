//! Solve reports and their text renderings.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::{Duration, Instant};

use aimkit::aim::{run, AimError, SolverParams};
use aimkit::numerics::BigComplex;
use aimkit::roots::{ConvergenceTrace, RootFilter};
use serde_json::{json, Value};

use crate::problem::ResolvedProblem;

/// Result of one solve. Never modified after construction.
#[derive(Clone, Debug)]
pub struct Report {
    pub problem: String,
    pub params: SolverParams,
    /// Bound parameter values as exact text.
    pub parameters: Vec<(String, String)>,
    pub trace: ConvergenceTrace,
    pub wall_time: Duration,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Table,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table" => Ok(Format::Table),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format '{s}' (expected table, csv or json)")),
        }
    }
}

impl Report {
    pub fn solve(r: &ResolvedProblem) -> Result<Report, AimError> {
        let start = Instant::now();
        let trace = run(&r.problem, &r.params)?;
        Ok(Report {
            problem: r.name.clone(),
            params: r.params.clone(),
            parameters: r.parameter_text(),
            trace,
            wall_time: start.elapsed(),
        })
    }

    fn real_output(&self) -> bool {
        matches!(
            self.params.filter,
            RootFilter::NegativeReal | RootFilter::PositiveReal | RootFilter::Real
        )
    }

    /// `E{k}{L}` when the problem has an `L` parameter, else `E{k}`.
    fn label(&self, k: usize) -> String {
        match self.parameters.iter().find(|(n, _)| n == "L") {
            Some((_, l)) => format!("E{k}{l}"),
            None => format!("E{k}"),
        }
    }

    fn fixed(&self, z: &BigComplex) -> String {
        if self.real_output() {
            z.real().to_fixed(self.params.digits)
        } else {
            z.to_fixed(self.params.digits)
        }
    }

    /// Printed value of each converged eigenvalue, by index.
    pub fn eigenvalues(&self) -> Vec<String> {
        self.trace.converged.iter().map(|c| self.fixed(&c.value)).collect()
    }
}

fn full(x: &rug::Float, dprec: u32) -> String {
    x.to_string_radix(10, Some(dprec as usize))
}

fn tol_text(log10: f64) -> String {
    let e = log10.floor();
    let m = 10f64.powf(log10 - e);
    if (m - 1.0).abs() < 1e-9 {
        format!("1e{}", e as i64)
    } else {
        format!("{m:.3}e{}", e as i64)
    }
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Table => render_table(report),
        Format::Csv => render_csv(report),
        Format::Json => serde_json::to_string_pretty(&to_json(report)).expect("json values serialize"),
    }
}

fn render_table(r: &Report) -> String {
    let digits = r.params.digits;
    let width = if r.real_output() { digits + 5 } else { 2 * digits + 13 };
    let rows: Vec<_> = r
        .trace
        .checkpoints
        .iter()
        .enumerate()
        .filter(|(k, _)| k % r.params.print_every.max(1) == 0)
        .map(|(_, c)| c)
        .collect();
    let columns = rows.iter().map(|c| c.roots.len()).max().unwrap_or(0);
    let mut out = String::new();
    let mut header = String::from("iteration");
    for k in 0..columns {
        // Row prefix plus separator is 7 wide, "iteration" is 9.
        let w = if k == 0 { width - 2 } else { width + 1 };
        let _ = write!(header, "{:>w$}", r.label(k));
    }
    out.push_str(header.trim_end());
    out.push('\n');
    for cp in rows {
        let mut line = format!("   {:03}", cp.n);
        for root in &cp.roots {
            let _ = write!(line, " {:>width$}", r.fixed(&root.value));
        }
        out.push_str(&line);
        out.push('\n');
    }
    out.push('\n');
    if r.trace.converged.is_empty() {
        out.push_str("no converged eigenvalues\n");
    } else {
        let _ = writeln!(
            out,
            "converged eigenvalues ({} tol {}):",
            match r.params.tol_mode {
                aimkit::roots::TolMode::Distance => "distance",
                aimkit::roots::TolMode::Strict => "strict",
            },
            tol_text(r.params.tol_log10)
        );
        for c in &r.trace.converged {
            let _ = writeln!(
                out,
                "  {:<6} {:>width$}   since n = {}",
                r.label(c.index),
                r.fixed(&c.value),
                c.converged_at
            );
        }
    }
    let _ = writeln!(out, "Wall time: {:.2} s", r.wall_time.as_secs_f64());
    out
}

fn render_csv(r: &Report) -> String {
    let d = r.params.dprec;
    let mut out = String::from("kind,n,index,re,im\n");
    for cp in &r.trace.checkpoints {
        for (k, root) in cp.roots.iter().enumerate() {
            let _ = writeln!(
                out,
                "root,{},{},{},{}",
                cp.n,
                k,
                full(root.value.re(), d),
                full(root.value.im(), d)
            );
        }
    }
    for c in &r.trace.converged {
        let _ = writeln!(
            out,
            "converged,{},{},{},{}",
            c.converged_at,
            c.index,
            full(c.value.re(), d),
            full(c.value.im(), d)
        );
    }
    out
}

fn to_json(r: &Report) -> Value {
    let d = r.params.dprec;
    let cx = |z: &BigComplex| json!({"re": full(z.re(), d), "im": full(z.im(), d)});
    let parameters: serde_json::Map<String, Value> =
        r.parameters.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
    json!({
        "problem": r.problem,
        "params": {
            "nmax": r.params.nmax,
            "nstep": r.params.nstep,
            "dprec": r.params.dprec,
            "guard": r.params.guard,
            "tol": tol_text(r.params.tol_log10),
            "tol_mode": r.params.tol_mode,
            "x0": r.params.x0.to_string(),
            "filter": r.params.filter,
            "digits": r.params.digits,
            "parameters": parameters,
        },
        "checkpoints": r.trace.checkpoints.iter().map(|c| json!({
            "n": c.n,
            "degree": c.degree,
            "roots": c.roots.iter().map(|x| cx(&x.value)).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "converged": r.trace.converged.iter().map(|c| json!({
            "index": c.index,
            "value": cx(&c.value),
            "printed": r.fixed(&c.value),
            "converged_at": c.converged_at,
            "last_change_log10": c.last_change_log10,
        })).collect::<Vec<_>>(),
        "wall_time_s": r.wall_time.as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use aimkit::numerics::{BigReal, PrecisionContext};
    use aimkit::roots::{Checkpoint, Root, TolMode};

    fn report(values: &[&[&str]], converged: bool) -> Report {
        let ctx = PrecisionContext::with_dprec(40).unwrap();
        let cps: Vec<Checkpoint> = values
            .iter()
            .enumerate()
            .map(|(k, vs)| Checkpoint {
                n: 1 + 10 * k,
                roots: vs
                    .iter()
                    .map(|v| Root {
                        value: BigComplex::from_real(BigReal::parse(v, &ctx).unwrap()),
                        residual_log10: -50.0,
                        radius_log10: -50.0,
                    })
                    .collect(),
                degree: vs.len(),
            })
            .collect();
        let tol = if converged { -20.0 } else { -200.0 };
        let trace = aimkit::roots::track(cps, tol, TolMode::Distance);
        Report {
            problem: "test".into(),
            params: SolverParams {
                filter: RootFilter::NegativeReal,
                dprec: 40,
                ..SolverParams::default()
            },
            parameters: vec![("L".into(), "0".into())],
            trace,
            wall_time: Duration::from_millis(1500),
        }
    }

    #[test]
    fn table_rows_match_listing_layout() {
        let r = report(
            &[
                &["-2.2260838203794128527651"],
                &["-3.2564642449044305823512", "-0.3950393050532261032971"],
            ],
            true,
        );
        let text = render(&r, Format::Table);
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("iteration"));
        assert_eq!(lines[1], "   001   -2.22608382037941285277");
        assert_eq!(lines[2], "   011   -3.25646424490443058235   -0.39503930505322610330");
        assert!(text.contains("Wall time: 1.50 s"));
    }

    #[test]
    fn empty_converged_set_has_footer() {
        let r = report(&[&["-1"], &["-2"]], false);
        let text = render(&r, Format::Table);
        assert!(text.lines().next().unwrap().starts_with("iteration"));
        assert!(text.contains("no converged eigenvalues"));
    }

    #[test]
    fn json_roundtrip_keeps_digits() {
        let r = report(&[&["-3.25646424490722525404"], &["-3.25646424490722525404"]], true);
        let v: Value = serde_json::from_str(&render(&r, Format::Json)).unwrap();
        for key in ["problem", "params", "checkpoints", "converged", "wall_time_s"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        let ctx = PrecisionContext::with_dprec(40).unwrap();
        let re = v["converged"][0]["value"]["re"].as_str().unwrap();
        let back = BigReal::parse(re, &ctx).unwrap();
        assert_eq!(back.to_fixed(20), "-3.25646424490722525404");
        assert_eq!(v["checkpoints"][1]["n"], 11);
    }

    #[test]
    fn csv_has_every_root() {
        let r = report(&[&["-1", "-2"], &["-1", "-2"]], true);
        let text = render(&r, Format::Csv);
        assert_eq!(text.lines().filter(|l| l.starts_with("root,")).count(), 4);
        assert_eq!(text.lines().filter(|l| l.starts_with("converged,")).count(), 2);
    }

    #[test]
    fn tolerance_text() {
        assert_eq!(tol_text(-20.0), "1e-20");
        assert_eq!(tol_text(-101.0), "1e-101");
    }
}
