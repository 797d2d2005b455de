use gaugeqed::quad::*;
use gaugeqed::Error;
use proptest::prelude::*;

#[test]
fn gauss_legendre_is_exact_for_polynomials() {
    for n in [1, 2, 5, 10, 21] {
        let (x, w) = gauss_legendre(n);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        for k in 0..2 * n {
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k as i32)).sum();
            let want = if k % 2 == 1 { 0.0 } else { 2.0 / (k + 1) as f64 };
            assert!((got - want).abs() < 1e-13, "n {n} degree {k}: {got} vs {want}");
        }
    }
}

#[test]
fn adaptive_rule_on_known_integrals() {
    let opts = QuadOptions::new(0.0, 1e-12);
    let r = integrate(|x| x.exp(), 0.0, 3.0, opts).unwrap();
    assert!((r.value - (3f64.exp() - 1.0)).abs() < 1e-12 * r.value);
    // A sharp peak the initial estimate misses.
    let r = integrate(|x| 1e-4 / (x * x + 1e-8), -1.0, 1.0, opts).unwrap();
    let want = 2.0 * (1.0f64 / 1e-4).atan();
    assert!((r.value - want).abs() < 1e-10 * want, "{} vs {want}", r.value);
    let r = integrate(|x| x.sqrt(), 0.0, 1.0, opts).unwrap();
    assert!((r.value - 2.0 / 3.0).abs() < 1e-11);
    let r = integrate(|x| x, 2.0, 0.0, opts).unwrap();
    assert!((r.value + 2.0).abs() < 1e-14);
}

#[test]
fn semi_infinite_range() {
    let opts = QuadOptions::new(0.0, 1e-11);
    let r = integrate_to_infinity(|x| (-x).exp(), 0.0, opts).unwrap();
    assert!((r.value - 1.0).abs() < 1e-11);
    let r = integrate_to_infinity(|x| 1.0 / (1.0 + x * x), 1.0, opts).unwrap();
    assert!((r.value - std::f64::consts::FRAC_PI_4).abs() < 1e-11);
}

#[test]
fn oscillatory_integral_split_at_zeros() {
    // ∫₀^{100} sin²(25x) dx = 50 − sin(5000)/100
    let opts = QuadOptions::new(0.0, 1e-12);
    let breaks = periodic_breaks(0.0, 100.0, 0.0, std::f64::consts::PI / 25.0);
    assert!(breaks.len() > 700);
    let r = integrate_pieces(|x| (25.0 * x).sin().powi(2), &breaks, opts).unwrap();
    let want = 50.0 - (5000f64).sin() / 100.0;
    assert!((r.value - want).abs() < 1e-10, "{} vs {want}", r.value);
    let t = tanh_sinh_pieces(|x| (25.0 * x).sin().powi(2), &breaks, opts).unwrap();
    assert!((t.value - want).abs() < 1e-10);
}

#[test]
fn breakpoint_helpers() {
    let b = periodic_breaks(0.0, 1.0, -0.05, 0.3);
    assert_eq!(b.len(), 5);
    assert!((b[1] - 0.25).abs() < 1e-15 && (b[3] - 0.85).abs() < 1e-15);
    let m = merge_breaks(vec![0.0, 0.5, 1.0], &[0.5, 0.2, 3.0, -1.0]);
    assert_eq!(m, vec![0.0, 0.2, 0.5, 1.0]);
}

#[test]
fn failures_are_reported() {
    let opts = QuadOptions { abs_tol: 0.0, rel_tol: 1e-14, max_intervals: 4 };
    let e = integrate(|x| (1.0 / x).sin(), 1e-6, 1.0, opts).unwrap_err();
    assert!(matches!(e, Error::Quadrature { estimate, target } if estimate > target));
    assert!(integrate_pieces(|x| x, &[0.0, 0.0], QuadOptions::default()).is_err());
    assert!(integrate_pieces(|x| x, &[1.0], QuadOptions::default()).is_err());
    let e = integrate(|x| 1.0 / x, -1.0, 1.0, QuadOptions::default());
    assert!(e.is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn two_rules_agree(a in -3.0f64..3.0, w in 0.1f64..20.0, c in 0.1f64..5.0) {
        let f = |x: f64| (w * x + a).cos() * (-c * x * x).exp();
        let opts = QuadOptions::new(1e-14, 1e-11);
        let g = integrate_pieces(f, &[-4.0, 0.0, 4.0], opts).unwrap();
        let t = tanh_sinh_pieces(f, &[-4.0, 0.0, 4.0], opts).unwrap();
        prop_assert!((g.value - t.value).abs() < 1e-12 + 1e-9 * g.value.abs());
    }
}
