use aimkit::numerics::{BigComplex, BigReal, EPoly, PrecisionContext, Scalar};
use aimkit::roots::{
    filter_roots, find_roots, track, Checkpoint, Root, RootError, RootFilter, RootOptions, TolMode,
};
use proptest::prelude::*;
use rug::Float;

fn ctx(d: u32) -> PrecisionContext {
    PrecisionContext::with_dprec(d).unwrap()
}

fn real_poly(c: &[i64], ctx: &PrecisionContext) -> EPoly<BigReal> {
    EPoly::from_coeffs(c.iter().map(|&v| BigReal::from_i64(v, ctx)).collect(), ctx)
}

fn cx(re: &str, im: &str, ctx: &PrecisionContext) -> BigComplex {
    BigComplex::new(BigReal::parse(re, ctx).unwrap(), BigReal::parse(im, ctx).unwrap())
}

fn root(re: &str, im: &str, ctx: &PrecisionContext) -> Root {
    Root {
        value: cx(re, im, ctx),
        residual_log10: f64::NEG_INFINITY,
        radius_log10: f64::NEG_INFINITY,
    }
}

fn dist(a: &BigComplex, b: &BigComplex) -> f64 {
    let d = a.sub(b).abs();
    if d.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (m, e) = d.to_f64_exp();
    (e as f64 + m.log2()) / std::f64::consts::LOG2_10
}

fn sorted(mut v: Vec<Root>) -> Vec<Root> {
    v.sort_by(|a, b| a.value.re().partial_cmp(b.value.re()).unwrap().then(a.value.im().partial_cmp(b.value.im()).unwrap()));
    v
}

#[test]
fn unit_imaginary_pair() {
    let c = ctx(50);
    let set = find_roots(&real_poly(&[1, 0, 1], &c), &c, RootOptions::default()).unwrap();
    assert_eq!(set.degree, 2);
    let r = sorted(set.roots);
    assert!(dist(&r[0].value, &cx("0", "-1", &c)) < -45.0);
    assert!(dist(&r[1].value, &cx("0", "1", &c)) < -45.0);
}

#[test]
fn harmonic_delta_roots() {
    let c = ctx(100);
    let set = find_roots(&real_poly(&[-3, 4, -1], &c), &c, RootOptions::default()).unwrap();
    let r = sorted(set.roots);
    assert!(dist(&r[0].value, &cx("1", "0", &c)) < -50.0);
    assert!(dist(&r[1].value, &cx("3", "0", &c)) < -50.0);
}

#[test]
fn triple_root() {
    let c = ctx(60);
    let set = find_roots(&real_poly(&[-1, 3, -3, 1], &c), &c, RootOptions::default()).unwrap();
    assert_eq!(set.roots.len(), 3);
    for r in &set.roots {
        let d = dist(&r.value, &cx("1", "0", &c));
        assert!(d < -20.0, "distance 1e{d} residual {} radius {} sweeps {}", r.residual_log10, r.radius_log10, set.sweeps);
    }
}

#[test]
fn zero_roots_split_off() {
    let c = ctx(40);
    let set = find_roots(&real_poly(&[0, 0, -2, 1], &c), &c, RootOptions::default()).unwrap();
    let r = sorted(set.roots);
    assert_eq!(r.len(), 3);
    assert!(r[0].value.is_zero() && r[1].value.is_zero());
    assert!(dist(&r[2].value, &cx("2", "0", &c)) < -35.0);
}

#[test]
fn degenerate_inputs() {
    let c = ctx(30);
    assert_eq!(
        find_roots(&EPoly::<BigReal>::zero(&c), &c, RootOptions::default()).unwrap_err(),
        RootError::ZeroPolynomial
    );
    assert_eq!(
        find_roots(&real_poly(&[5], &c), &c, RootOptions::default()).unwrap_err(),
        RootError::ConstantPolynomial
    );
}

#[test]
fn huge_coefficient_range() {
    // Roots 10^-300, 1, 10^300: coefficients span 600 decades.
    let c = ctx(700);
    let a = Float::with_val(c.bits(), Float::i_pow_u(10, 300));
    let b = Float::with_val(c.bits(), 1u32 / &a);
    let roots = [b, Float::with_val(c.bits(), 1), a];
    let mut p = EPoly::constant(BigReal::from_i64(1, &c), &c);
    for r in &roots {
        let lin = EPoly::from_coeffs(vec![BigReal::from_float(Float::with_val(c.bits(), -r)), BigReal::from_i64(1, &c)], &c);
        p = p.mul(&lin).unwrap();
    }
    let set = find_roots(&p, &c, RootOptions::default()).unwrap();
    let got = sorted(set.roots);
    for (g, want) in got.iter().zip(&roots) {
        let diff = Float::with_val(c.bits(), g.value.re() - want);
        let rel = Float::with_val(64, diff / want).to_f64().abs();
        assert!(rel < 1e-300, "relative error {rel}");
    }
}

#[test]
fn filter_examples() {
    let c = ctx(40);
    let set = vec![root("1", "0", &c), root("3", "0", &c), root("-2", "0", &c), root("0", "1", &c)];
    let eps = -10.0;
    let re = |v: Vec<Root>| v.iter().map(|r| r.value.re().to_f64()).collect::<Vec<_>>();
    assert_eq!(re(filter_roots(&set, RootFilter::NegativeReal, eps)), vec![-2.0]);
    assert_eq!(re(filter_roots(&set, RootFilter::PositiveReal, eps)), vec![1.0, 3.0]);
    assert_eq!(re(filter_roots(&set, RootFilter::Real, eps)), vec![-2.0, 1.0, 3.0]);
    assert_eq!(filter_roots(&set, RootFilter::UpperHalf, eps).len(), 1);
    assert_eq!(filter_roots(&set, RootFilter::All, eps).len(), 4);

    let qnm = vec![root("0.3736717", "-0.0889623", &c), root("0.3736717", "0.0889623", &c)];
    let kept = filter_roots(&qnm, RootFilter::LowerHalf, eps);
    assert_eq!(kept.len(), 1);
    assert!(kept[0].value.im().is_sign_negative());
}

#[test]
fn filter_strings_roundtrip() {
    for f in RootFilter::ALL {
        assert_eq!(f.as_str().parse::<RootFilter>().unwrap(), f);
    }
    assert!("x".parse::<RootFilter>().is_err());
}

#[test]
fn tiny_imaginary_part_counts_as_real() {
    let c = ctx(40);
    let r = root("-1", "1e-30", &c);
    assert!(RootFilter::NegativeReal.accepts(&r, -10.0));
    assert!(!RootFilter::NegativeReal.accepts(&r, -35.0));
    assert!(RootFilter::PositiveReal.accepts(&root("0", "0", &c), -10.0));
}

fn checkpoint(n: usize, values: &[&str], c: &PrecisionContext) -> Checkpoint {
    Checkpoint {
        n,
        roots: values.iter().map(|v| root(v, "0", c)).collect(),
        degree: values.len(),
    }
}

#[test]
fn identical_checkpoints_converge() {
    let c = ctx(40);
    let cps = vec![checkpoint(1, &["-2", "5"], &c), checkpoint(11, &["-2", "5"], &c)];
    let t = track(cps, -20.0, TolMode::Distance);
    assert_eq!(t.converged.len(), 2);
    assert_eq!(t.converged[0].index, 0);
    assert_eq!(t.converged[0].converged_at, 11);
}

#[test]
fn paper_listing_tail() {
    // Rows 181 and 201 of the Yukawa listing (A = 4, L = 0).
    let c = ctx(40);
    let cps = vec![
        checkpoint(181, &["-3.25646424490722525404", "-0.39942617065535111388", "-0.02566436900553236619"], &c),
        checkpoint(191, &["-3.25646424490722525404", "-0.39942617065535111388", "-0.02566437225727462679"], &c),
        checkpoint(201, &["-3.25646424490722525404", "-0.39942617065535111388", "-0.02566437337375074847"], &c),
    ];
    let t = track(cps, -20.0, TolMode::Distance);
    let got: Vec<f64> = t.converged.iter().map(|r| r.value.re().to_f64()).collect();
    assert_eq!(got.len(), 2, "E2 must not count as converged");
    assert!((got[0] + 3.2564642449).abs() < 1e-9);
    assert!((got[1] + 0.3994261706).abs() < 1e-9);
    assert_eq!(t.converged[0].converged_at, 191);
}

#[test]
fn chain_that_appears_late_and_strict_mode() {
    let c = ctx(40);
    let mut cps = vec![
        checkpoint(1, &["-1.5"], &c),
        checkpoint(2, &["-1.0", "-7"], &c),
        checkpoint(3, &["-1.0", "-7"], &c),
    ];
    let t = track(cps.clone(), -20.0, TolMode::Distance);
    assert_eq!(t.converged.len(), 2);
    assert_eq!(t.converged[1].converged_at, 3);
    // A loose inclusion radius blocks strict convergence.
    cps[2].roots[0].radius_log10 = -5.0;
    let t = track(cps, -20.0, TolMode::Strict);
    assert_eq!(t.converged.len(), 1);
    assert_eq!(t.converged[0].value.re().to_f64(), -7.0);
}

fn real_coeffs() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-9i64..=9, 2..9).prop_filter("nonconstant", |v| v.iter().skip(1).any(|&c| c != 0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn root_count_and_residual(coeffs in real_coeffs()) {
        let c = ctx(60);
        let p = real_poly(&coeffs, &c);
        let deg = p.degree().unwrap();
        let set = find_roots(&p, &c, RootOptions::default()).unwrap();
        prop_assert_eq!(set.roots.len(), deg);
        prop_assert_eq!(set.degree, deg);
        // |P(z)| / max|a_k| <= 10^(-dprec/2 + guard), evaluated afresh.
        let maxc = coeffs.iter().map(|v| v.abs()).max().unwrap() as f64;
        let bound = -(c.dprec() as f64) / 2.0 + c.guard() as f64;
        for r in &set.roots {
            let mut acc = BigComplex::zero(&c);
            for a in p.coeffs().iter().rev() {
                acc = acc.mul_ref(&r.value);
                acc.add_assign_ref(&BigComplex::from_real(a.clone()));
            }
            let v = acc.abs().to_f64();
            prop_assert!(v == 0.0 || (v / maxc).log10() <= bound, "residual {}", v);
            prop_assert!(r.residual_log10 <= bound);
        }
    }

    #[test]
    fn real_polynomials_have_conjugate_symmetric_roots(coeffs in real_coeffs()) {
        let c = ctx(60);
        let set = find_roots(&real_poly(&coeffs, &c), &c, RootOptions::default()).unwrap();
        for r in &set.roots {
            let conj = r.value.conj();
            let best = set.roots.iter().map(|s| dist(&s.value, &conj)).fold(f64::INFINITY, f64::min);
            // Multiple roots are only determined to about dprec/m digits.
            prop_assert!(best < -60.0 / 8.0, "no conjugate partner, distance 1e{best}");
        }
    }

    #[test]
    fn filters_partition_the_roots(coeffs in real_coeffs()) {
        let c = ctx(60);
        let set = find_roots(&real_poly(&coeffs, &c), &c, RootOptions::default()).unwrap();
        let eps = -15.0;
        let neg = filter_roots(&set.roots, RootFilter::NegativeReal, eps).len();
        let pos = filter_roots(&set.roots, RootFilter::PositiveReal, eps).len();
        let up = filter_roots(&set.roots, RootFilter::UpperHalf, eps).len();
        let down = filter_roots(&set.roots, RootFilter::LowerHalf, eps).len();
        prop_assert_eq!(neg + pos + up + down, set.roots.len());
        prop_assert_eq!(neg + pos, filter_roots(&set.roots, RootFilter::Real, eps).len());
    }

    #[test]
    fn tracking_ignores_input_order(
        values in prop::collection::vec(-50i64..50, 1..6),
        seed in any::<u64>(),
    ) {
        let c = ctx(30);
        let text: Vec<String> = values.iter().map(|v| format!("{}", *v as f64 / 7.0)).collect();
        let refs: Vec<&str> = text.iter().map(String::as_str).collect();
        let base = vec![checkpoint(1, &refs, &c), checkpoint(2, &refs, &c)];
        let mut shuffled = base.clone();
        let mut s = seed;
        for cp in &mut shuffled {
            let n = cp.roots.len();
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                cp.roots.swap(i, (s >> 33) as usize % (i + 1));
            }
        }
        let a = track(base, -20.0, TolMode::Distance);
        let b = track(shuffled, -20.0, TolMode::Distance);
        let key = |t: &aimkit::roots::ConvergenceTrace| t.converged.iter().map(|r| r.value.to_string()).collect::<Vec<_>>();
        prop_assert_eq!(key(&a), key(&b));
    }
}
