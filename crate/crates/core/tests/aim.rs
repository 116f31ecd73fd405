use std::sync::Arc;

use aimkit::aim::{delta, deltas, run, AimError, AimProblem, AimState, Seed, SeedOptions, SolverParams};
use aimkit::expr::parse_expression;
use aimkit::numerics::{BigReal, EPoly, PrecisionContext, Scalar};
use aimkit::parallel::Execution;
use aimkit::roots::RootFilter;
use aimkit_testkit::{classic_delta, monic, Poly2};
use proptest::prelude::*;
use rug::Rational;

fn q(v: i64) -> Rational {
    Rational::from(v)
}

fn exact_seed(l0: &str, s0: &str, x0: &Rational, order: usize, options: SeedOptions) -> Arc<Seed<Rational>> {
    let l0 = parse_expression(l0).unwrap();
    let s0 = parse_expression(s0).unwrap();
    Arc::new(Seed::build(&l0, &s0, "E", "x", x0, order, &(), options).unwrap())
}

fn exact_coeffs(p: &EPoly<Rational>) -> Vec<Rational> {
    p.coeffs().to_vec()
}

fn epoly(v: &[i64]) -> Vec<Rational> {
    let p = EPoly::from_coeffs(v.iter().map(|&c| q(c)).collect(), &());
    p.coeffs().to_vec()
}

#[test]
fn harmonic_seed() {
    let seed = exact_seed("2*x", "1 - E", &q(0), 3, SeedOptions::default());
    let s = AimState::seed(seed);
    let c: Vec<_> = s.c().iter().map(exact_coeffs).collect();
    let d: Vec<_> = s.d().iter().map(exact_coeffs).collect();
    assert_eq!(c, vec![epoly(&[]), epoly(&[2]), epoly(&[]), epoly(&[])]);
    assert_eq!(d, vec![epoly(&[1, -1]), epoly(&[]), epoly(&[]), epoly(&[])]);
    assert_eq!(s.order(), 3);
}

#[test]
fn order_zero_cannot_iterate() {
    let seed = exact_seed("2*x", "1 - E", &q(0), 0, SeedOptions::default());
    let s = AimState::seed(seed);
    assert_eq!(s.order(), 0);
    assert!(matches!(s.iterate(Execution::Sequential), Err(AimError::Exhausted { n: 0 })));
}

#[test]
fn harmonic_first_iteration() {
    let seed = exact_seed("2*x", "1 - E", &q(0), 3, SeedOptions::default());
    let s0 = AimState::seed(seed);
    let s1 = s0.iterate(Execution::Sequential).unwrap();
    assert_eq!(s1.order(), 2);
    assert_eq!(exact_coeffs(&s1.c()[0]), epoly(&[3, -1]));
    assert!(s1.d()[0].is_zero());
    let d = delta(&s1, &s0).unwrap();
    assert_eq!(d.n, 1);
    assert_eq!(exact_coeffs(&d.poly), epoly(&[-3, 4, -1]));
}

#[test]
fn harmonic_general_point() {
    let x0 = Rational::from((3, 7));
    let seed = exact_seed("2*x", "1 - E", &x0, 3, SeedOptions::default());
    let s0 = AimState::seed(seed);
    let s1 = s0.iterate(Execution::Sequential).unwrap();
    // c1^0 = 3 - E + 4 x0^2, d1^0 = 2 x0 (1 - E).
    let four_x2 = 4 * x0.clone() * &x0;
    let two_x: Rational = 2 * x0.clone();
    assert_eq!(exact_coeffs(&s1.c()[0]), vec![four_x2 + 3, q(-1)]);
    assert_eq!(exact_coeffs(&s1.d()[0]), vec![two_x.clone(), -two_x]);
    let d = delta(&s1, &s0).unwrap();
    assert_eq!(exact_coeffs(&d.poly), epoly(&[-3, 4, -1]));
}

#[test]
fn non_consecutive_states_rejected() {
    let seed = exact_seed("2*x", "1 - E", &q(0), 4, SeedOptions::default());
    let s0 = AimState::seed(seed);
    let s1 = s0.iterate(Execution::Sequential).unwrap();
    let s2 = s1.iterate(Execution::Sequential).unwrap();
    assert!(matches!(delta(&s2, &s0), Err(AimError::NonConsecutive { curr: 2, prev: 0 })));
    let other = AimState::seed(exact_seed("2*x", "1 - E", &q(0), 4, SeedOptions::default()));
    assert!(delta(&s1, &other).is_err());
}

#[test]
fn zero_problem_stays_zero() {
    let seed = exact_seed("0", "0", &q(1), 6, SeedOptions::default());
    let mut prev = AimState::seed(seed);
    for _ in 0..5 {
        let next = prev.iterate(Execution::Sequential).unwrap();
        assert!(next.c().iter().chain(next.d()).all(EPoly::is_zero));
        assert!(delta(&next, &prev).unwrap().poly.is_zero());
        prev = next;
    }
}

#[test]
fn seed_from_series_checks_lengths() {
    let a = vec![EPoly::constant(q(1), &()); 3];
    let b = vec![EPoly::constant(q(1), &()); 2];
    assert!(matches!(Seed::from_series(a, b, &()), Err(AimError::SeedMismatch(_))));
}

/// Random `Σ c x^i E^k` with small integer coefficients.
fn poly2(max_e: u32) -> impl Strategy<Value = Poly2> {
    prop::collection::vec((0u32..=3, 0u32..=max_e, -3i64..=3), 1..5).prop_map(|t| Poly2::from_terms(&t))
}

fn iterate_to(seed: Arc<Seed<Rational>>, n: usize) -> EPoly<Rational> {
    let mut prev = AimState::seed(seed);
    let mut curr = prev.iterate(Execution::Sequential).unwrap();
    for _ in 1..n {
        prev = curr;
        curr = prev.iterate(Execution::Sequential).unwrap();
    }
    delta(&curr, &prev).unwrap().poly
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    // The coefficient recursion reproduces the classic iteration exactly.
    #[test]
    fn recursion_matches_symbolic_iteration(
        l0 in poly2(0),
        s0 in poly2(1),
        n in 1usize..=4,
        x0 in -3i64..=3,
        dense in any::<bool>(),
    ) {
        let x0 = q(x0);
        let options = SeedOptions { rational_multipliers: !dense };
        let seed = exact_seed(&l0.to_string(), &s0.to_string(), &x0, n + 1, options);
        let got = iterate_to(seed, n);
        let want = classic_delta(&l0, &s0, n, &x0);
        prop_assert_eq!(monic(got.coeffs()), monic(&want));
    }

    // deg_E λ0 = 0 and deg_E s0 = 1 give deg_E c_n <= n, deg_E d_n <= n+1.
    #[test]
    fn eigen_degree_bound(l0 in poly2(0), s0 in poly2(1), x0 in -2i64..=2) {
        let seed = exact_seed(&l0.to_string(), &s0.to_string(), &q(x0), 7, SeedOptions::default());
        let mut prev = AimState::seed(seed);
        for n in 1..=5 {
            let curr = prev.iterate(Execution::Sequential).unwrap();
            for c in curr.c() {
                prop_assert!(c.degree().is_none_or(|d| d <= n));
            }
            for d in curr.d() {
                prop_assert!(d.degree().is_none_or(|k| k <= n + 1));
            }
            let dl = delta(&curr, &prev).unwrap().poly;
            prop_assert!(dl.degree().is_none_or(|d| d <= 2 * n + 1));
            prev = curr;
        }
    }
}

#[test]
fn rational_and_dense_multipliers_agree() {
    let ctx = PrecisionContext::with_dprec(60).unwrap();
    let l0 = parse_expression("6 - 2/r").unwrap();
    let s0 = parse_expression("-(En + 4*exp(-1/5*r)/r) + 6/r - 9").unwrap();
    let x0 = Rational::from((1, 3));
    let build = |rational_multipliers| {
        let seed = Seed::<BigReal>::build(&l0, &s0, "En", "r", &x0, 16, &ctx, SeedOptions { rational_multipliers })
            .unwrap();
        let mut prev = AimState::seed(Arc::new(seed));
        for _ in 0..14 {
            prev = prev.iterate(Execution::Sequential).unwrap();
        }
        let curr = prev.iterate(Execution::Sequential).unwrap();
        delta(&curr, &prev).unwrap().poly.monic().unwrap()
    };
    let a = build(true);
    let b = build(false);
    assert_eq!(a.degree(), b.degree());
    for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
        let diff = x.clone().into_float() - y.as_float();
        let scale = x.log2_abs().unwrap_or(0.0).max(0.0);
        let rel = diff.to_f64().abs().log2() - scale;
        assert!(rel < -150.0, "relative difference 2^{rel}");
    }
}

fn problem(l0: &str, s0: &str, eigen: &str, var: &str) -> AimProblem {
    AimProblem {
        lambda0: parse_expression(l0).unwrap(),
        s0: parse_expression(s0).unwrap(),
        eigen: eigen.into(),
        var: var.into(),
    }
}

#[test]
fn harmonic_roots_at_every_checkpoint() {
    // δ_n vanishes on the exact spectrum 1, 3, 5, ... for n large enough;
    // 1 and 3 are already roots of δ_1.
    let p = problem("2*x", "1 - E", "E", "x");
    let params = SolverParams {
        nmax: 5,
        nstep: 1,
        dprec: 60,
        filter: RootFilter::Real,
        exec: Execution::Sequential,
        ..SolverParams::default()
    };
    let trace = run(&p, &params).unwrap();
    assert_eq!(trace.checkpoints.len(), 5);
    for cp in &trace.checkpoints {
        for target in [1, 3] {
            let hit = cp.roots.iter().any(|r| {
                let d = r.value.sub(&aimkit::numerics::BigComplex::from_real(BigReal::from_i64(target, &PrecisionContext::with_dprec(60).unwrap()))).abs();
                d.to_f64() < 1e-30
            });
            assert!(hit, "n = {}: {target} missing", cp.n);
        }
    }
    let values: Vec<f64> = trace.converged.iter().map(|c| c.value.re().to_f64()).collect();
    assert!(values.len() >= 2);
    assert!((values[0] - 1.0).abs() < 1e-15 && (values[1] - 3.0).abs() < 1e-15);
}

#[test]
fn degenerate_problem_has_no_eigenvalues() {
    let p = problem("0", "0", "E", "x");
    let params = SolverParams {
        nmax: 4,
        nstep: 1,
        dprec: 50,
        ..SolverParams::default()
    };
    let trace = run(&p, &params).unwrap();
    assert!(trace.converged.is_empty());
    assert!(trace.checkpoints.iter().all(|c| c.roots.is_empty()));
}

#[test]
fn checkpoint_schedule() {
    let params = SolverParams {
        nmax: 201,
        nstep: 10,
        ..SolverParams::default()
    };
    let cps = params.checkpoints();
    assert_eq!(cps.len(), 21);
    assert_eq!(&cps[..3], &[1, 11, 21]);
    assert_eq!(*cps.last().unwrap(), 201);
}

#[test]
fn invalid_params_rejected() {
    let base = SolverParams::default();
    for bad in [
        SolverParams { nstep: 0, ..base.clone() },
        SolverParams { nstep: base.nmax + 1, ..base.clone() },
        SolverParams { digits: 0, ..base.clone() },
        SolverParams { dprec: 10, ..base.clone() },
        SolverParams { dprec: 30, digits: 25, ..base.clone() },
    ] {
        assert!(bad.validate().is_err());
    }
}

#[test]
fn sequential_and_parallel_agree() {
    let p = problem("2*x", "1 - E + 1/10*x^2", "E", "x");
    let mk = |exec| SolverParams {
        nmax: 12,
        nstep: 3,
        dprec: 50,
        exec,
        ..SolverParams::default()
    };
    let a = deltas::<BigReal>(&p, &mk(Execution::Sequential)).unwrap();
    let b = deltas::<BigReal>(&p, &mk(Execution::Parallel)).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.poly.to_string(), y.poly.to_string());
    }
}

#[test]
fn doubling_precision_keeps_printed_digits() {
    let p = problem(
        "6 - 2/r",
        "-(En + 4*exp(-1/5*r)/r) + 6/r - 9",
        "En",
        "r",
    );
    let solve = |dprec| {
        let params = SolverParams {
            nmax: 61,
            dprec,
            x0: Rational::from((1, 3)),
            filter: RootFilter::NegativeReal,
            ..SolverParams::default()
        };
        let trace = run(&p, &params).unwrap();
        trace.converged.iter().map(|c| c.value.real().to_fixed(20)).collect::<Vec<_>>()
    };
    let lo = solve(120);
    assert_eq!(lo.first().map(String::as_str), Some("-3.25646424490722525404"));
    assert_eq!(lo, solve(240));
}
