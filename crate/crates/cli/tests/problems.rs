use std::process::Command;

use aimkit::numerics::{BigReal, PrecisionContext};
use aimkit_cli::catalog;
use aimkit_cli::oracle::numerov_oracle;
use aimkit_cli::problem::{parse_tol_log10, ProblemSpec};
use aimkit_cli::report::{render, Format, Report};
use rug::Rational;

fn set(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

fn solve(name: &str, overrides: &[(&str, &str)]) -> Report {
    let r = catalog::load(name).unwrap().resolve(&set(overrides)).unwrap();
    Report::solve(&r).unwrap()
}

fn values(r: &Report) -> Vec<rug::Float> {
    r.trace.converged.iter().map(|c| c.value.re().clone()).collect()
}

#[test]
fn yukawa_file_contents() {
    let spec = catalog::load("yukawa").unwrap();
    assert_eq!(spec.lambda0, "2*beta - 2/r");
    let r = spec.resolve(&[]).unwrap();
    let params: Vec<(String, String)> = r.parameter_text();
    for (k, v) in [("A", "4"), ("L", "0"), ("alpha", "1/5"), ("m", "1/2"), ("hbar", "1"), ("beta", "3")] {
        assert!(params.contains(&(k.to_string(), v.to_string())), "{k}");
    }
    assert_eq!(r.params.x0, Rational::from((1, 3)));
    assert_eq!(r.params.nmax, 201);
    assert_eq!(r.params.dprec, 500);
}

#[test]
fn every_catalog_entry_loads() {
    for name in catalog::names() {
        let spec = catalog::load(name).unwrap();
        assert_eq!(spec.name, name);
    }
}

const TEMPLATE: &str = "\
[problem]
name = t
[symbols]
eigenvalue = E
variable = r
[expressions]
lambda0 = 2*beta - 2/r
s0 = -E + S0
[parameters]
beta = 3
[solver]
x0 = X0
";

fn file(s0: &str, x0: &str) -> String {
    TEMPLATE.replace("S0", s0).replace("X0", x0)
}

#[test]
fn unbound_symbol_is_named() {
    let err = ProblemSpec::parse(&file("gamma/r", "1/3")).unwrap_err();
    assert!(err.to_string().contains("gamma"), "{err}");
}

#[test]
fn singular_expansion_point() {
    let err = ProblemSpec::parse(&file("1/r", "0")).unwrap_err();
    let text = err.to_string();
    assert!(text.contains("x0 = 0"), "{text}");
    assert!(text.to_lowercase().contains("singular"), "{text}");
}

#[test]
fn errors_carry_line_numbers_and_are_collected() {
    let text = file("1/r", "1/3").replace("beta = 3", "beta = 3\nbroken line\n[nonsense]");
    let err = ProblemSpec::parse(&text).unwrap_err();
    assert_eq!(err.0.len(), 2, "{err}");
    assert_eq!(err.0[0].line, Some(11));
    assert_eq!(err.0[1].line, Some(12));
}

#[test]
fn unknown_override_rejected() {
    let spec = catalog::load("yukawa").unwrap();
    let err = spec.resolve(&set(&[("gamma", "1")])).unwrap_err();
    assert!(err.to_string().contains("gamma"));
    assert!(catalog::load("no-such-problem").is_err());
}

#[test]
fn qnm_requires_its_functions() {
    let spec = catalog::load("qnm").unwrap();
    let err = spec.resolve(&[]).unwrap_err().to_string();
    for name in ["p", "dp", "kappa1", "xi1"] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn ecsc_constants_are_exact() {
    let r = catalog::load("ecsc").unwrap().resolve(&set(&[("delta", "1/100")])).unwrap();
    let text = r.parameter_text();
    let get = |k: &str| text.iter().find(|(n, _)| n == k).map(|(_, v)| v.clone()).unwrap();
    assert_eq!(get("A1"), "2");
    assert_eq!(get("A2"), "1/50");
    assert_eq!(get("A6"), "1/31500000000000000");
}

#[test]
fn tolerance_syntax() {
    assert_eq!(parse_tol_log10("1e-20").unwrap(), -20.0);
    assert_eq!(parse_tol_log10("10^-30").unwrap(), -30.0);
    assert!((parse_tol_log10("1/1000").unwrap() + 3.0).abs() < 1e-12);
    assert!(parse_tol_log10("-1").is_err());
}

#[test]
fn coulomb_limit() {
    let r = solve("yukawa", &[("alpha", "0"), ("nmax", "101"), ("dprec", "200")]);
    let e = values(&r);
    assert!((e[0].to_f64() + 4.0).abs() < 1e-15);
    assert!((e[1].to_f64() + 1.0).abs() < 1e-15);
}

#[test]
fn harmonic_oscillator_spectrum() {
    for l in 0..=2 {
        let r = solve("harmonic", &[("L", &l.to_string())]);
        let e = values(&r);
        assert!(e.len() >= 4, "L = {l}");
        for (n, v) in e.iter().take(4).enumerate() {
            let want = (4 * n + 2 * l + 3) as f64;
            let got = v.to_f64();
            assert!((got - want).abs() < 1e-15, "n = {n}, L = {l}: {got}");
        }
    }
}

#[test]
fn json_roundtrip_of_a_solve() {
    let r = solve("yukawa", &[("nmax", "41"), ("dprec", "100")]);
    let v: serde_json::Value = serde_json::from_str(&render(&r, Format::Json)).unwrap();
    let ctx = PrecisionContext::with_dprec(100).unwrap();
    for (c, printed) in v["converged"].as_array().unwrap().iter().zip(r.eigenvalues()) {
        let re = BigReal::parse(c["value"]["re"].as_str().unwrap(), &ctx).unwrap();
        assert_eq!(re.to_fixed(r.params.digits), printed);
    }
    assert_eq!(v["checkpoints"].as_array().unwrap().len(), 5);
}

#[test]
fn yukawa_oracle_ground_state() {
    let r = catalog::load("yukawa").unwrap().resolve(&[]).unwrap();
    let e = numerov_oracle(r.oracle.as_ref().unwrap(), 1).unwrap();
    assert_eq!(format!("{:.6}", e[0]), "-3.256464");
}

fn aimkit(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_aimkit")).args(args).output().unwrap()
}

#[test]
fn exit_codes() {
    let ok = aimkit(&["run", "harmonic", "--nmax", "11"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).starts_with("iteration"));
    let none = aimkit(&["run", "harmonic", "--nmax", "2", "--nstep", "1", "--filter", "-r"]);
    assert_eq!(none.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&none.stdout).contains("no converged eigenvalues"));
    let bad = aimkit(&["run", "harmonic", "--set", "nope=1"]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(aimkit(&["list"]).status.code(), Some(0));
    let show = aimkit(&["show", "ecsc"]);
    assert!(String::from_utf8_lossy(&show.stdout).contains("A6"));
    let csv = aimkit(&["run", "harmonic", "--format", "csv", "--nmax", "6"]);
    assert!(String::from_utf8_lossy(&csv.stdout).starts_with("kind,n,index,re,im"));
}
