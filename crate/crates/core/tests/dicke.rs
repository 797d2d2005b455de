use gaugeqed::dicke::*;
use gaugeqed::opalg::eigvals_hermitian;
use gaugeqed::Error;
use faer::Mat;
use proptest::prelude::*;

fn params(tau: f64, alpha: f64) -> DickeParams {
    DickeParams::at_tau(1.0, 1.0, tau, alpha)
}

#[test]
fn coupling_constants() {
    let p = params(0.7, 1.0);
    assert_eq!(p.cal_c(), 0.0);
    assert_eq!(p.g_prime(), 0.0);
    assert!((p.omega_alpha() - 1.0).abs() < 1e-15);
    assert!((p.tau() - 0.7).abs() < 1e-14);
    assert_eq!(params(1.0, 0.3).tau(), 1.0);
    let c = params(0.7, 0.0);
    assert_eq!(c.g(), 0.0);
    // ω_0² = ω² + 2ω_m ρd² = ω² + ω_m²/τ
    assert!((c.omega_alpha().powi(2) - (1.0 + 1.0 / 0.7)).abs() < 1e-13);
    assert!((c.cal_c() - 0.25 / 0.7).abs() < 1e-15);
}

#[test]
fn finite_n_is_hermitian_and_validated() {
    let h = build_dicke_finite_n(&params(0.8, 0.3).with_size(4, 10)).unwrap();
    assert!(h.is_hermitian());
    assert_eq!(h.dim(), 50);
    assert!(matches!(build_dicke_finite_n(&params(0.8, 0.3).with_size(17, 10)), Err(Error::InvalidInput(_))));
    assert!(matches!(build_dicke_finite_n(&params(0.8, 0.3).with_size(4, 61)), Err(Error::InvalidInput(_))));
    let bad = DickeParams { rho: 0.0, ..params(1.0, 0.0) };
    assert!(matches!(bad.validate(), Err(Error::InvalidInput(_))));
}

#[test]
fn zero_coupling_is_free_spins_and_boson() {
    let p = DickeParams { d: 0.0, omega: 1.7, ..params(1.0, 0.4) }.with_size(3, 8);
    let e = eigvals_hermitian(&build_dicke_finite_n(&p).unwrap()).unwrap();
    let mut expect: Vec<f64> =
        (0..4).flat_map(|m| (0..8).map(move |k| m as f64 - 1.5 + 1.7 * (k as f64 + 0.5))).collect();
    expect.sort_by(f64::total_cmp);
    for (a, b) in e.iter().zip(&expect) {
        assert!((a - b).abs() < 1e-12);
    }
    let (ep, em) = polariton_energies(&p, Phase::Normal).unwrap();
    assert!((ep - 1.7).abs() < 1e-14 && (em - 1.0).abs() < 1e-14);
}

#[test]
fn truncated_gauges_give_distinct_spectra() {
    let e0 = finite_n_levels(&params(0.8, 0.0).with_size(8, 30), true).unwrap();
    let e1 = finite_n_levels(&params(0.8, 1.0).with_size(8, 30), true).unwrap();
    let diff = e0.iter().zip(&e1).take(6).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(diff > 1e-2, "{diff}");
}

#[test]
fn multipolar_normal_form_is_standard_dicke() {
    let p = params(50.0, 1.0);
    let q = hp_quadratic(&p, Phase::Normal).unwrap();
    assert_eq!((q.a, q.k, q.omega_c, q.g_prime), (1.0, 0.0, 1.0, 0.0));
    // λ = g_α = d√(ρω/2)
    assert!((q.g - (0.01f64 * 0.5).sqrt()).abs() < 1e-15);
    // Standard result: E±² = ½[ω² + ω_m² ± √((ω² − ω_m²)² + 16λ²ωω_m)]
    let (hi, lo) = q.frequencies_sq();
    let l2 = q.g * q.g;
    let root = (16.0 * l2).sqrt();
    assert!((hi - 0.5 * (2.0 + root)).abs() < 1e-14);
    assert!((lo - 0.5 * (2.0 - root)).abs() < 1e-14);
}

/// Eigenvalues of the dynamical matrix Ω M, with Ω the symplectic form.
fn dynamical_frequencies(q: &QuadraticForm) -> Vec<f64> {
    let m = q.matrix();
    let omega = [[0.0, 1.0, 0.0, 0.0], [-1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0], [0.0, 0.0, -1.0, 0.0]];
    let a = Mat::<f64>::from_fn(4, 4, |i, j| (0..4).map(|k| omega[i][k] * m[k][j]).sum());
    let ev = a.eigenvalues().unwrap();
    let mut w: Vec<f64> = ev.iter().filter(|z| z.im > 0.0).map(|z| z.im).collect();
    w.sort_by(|a, b| b.total_cmp(a));
    w
}

#[test]
fn symplectic_invariants_match_dynamical_matrix() {
    for (tau, phase) in [(2.0, Phase::Normal), (1.3, Phase::Normal), (0.6, Phase::Abnormal), (0.95, Phase::Abnormal)] {
        for alpha in [0.0, 0.3, 0.5, 1.0] {
            let p = params(tau, alpha);
            let q = hp_quadratic(&p, phase).unwrap();
            assert!(q.is_positive(), "tau {tau} alpha {alpha}");
            let (ep, em) = polariton_energies(&p, phase).unwrap();
            let w = dynamical_frequencies(&q);
            assert_eq!(w.len(), 2);
            assert!((w[0] - ep).abs() < 1e-10 && (w[1] - em).abs() < 1e-10, "{w:?} vs {ep} {em}");
        }
    }
}

#[test]
fn wrong_side_of_transition_is_rejected() {
    let p = params(1.5, 0.5);
    assert!(matches!(hp_quadratic(&p, Phase::Abnormal), Err(Error::PhaseViolation { .. })));
    let q = params(0.8, 0.5);
    assert!(matches!(polariton_energies(&q, Phase::Normal), Err(Error::PhaseViolation { .. })));
    assert!(!hp_quadratic(&q, Phase::Normal).unwrap().is_positive());
    assert!(lower_polariton_sq_normal(&q).unwrap() < 0.0);
}

#[test]
fn critical_point_is_gauge_invariant() {
    for alpha in [0.0, 0.5, 1.0] {
        let p = params(1.0, alpha);
        let tc = critical_tau(&p, 0.5, 2.0).unwrap();
        assert!((tc - 1.0).abs() < 1e-10, "alpha {alpha}: {tc}");
        for eps in [1e-3, 1e-5, 1e-7] {
            let (_, above) = polariton_energies(&p.with_tau(1.0 + eps), Phase::Normal).unwrap();
            let (_, below) = polariton_energies(&p.with_tau(1.0 - eps), Phase::Abnormal).unwrap();
            assert!(above < 10.0 * eps.sqrt() && below < 10.0 * eps.sqrt(), "{above} {below}");
        }
        // The two expansions coincide at τ = 1.
        let n = hp_quadratic(&p, Phase::Normal).unwrap();
        let a = hp_quadratic(&p, Phase::Abnormal).unwrap();
        assert_eq!(n, a);
    }
}

#[test]
fn mean_field_angle_and_displacement() {
    for alpha in [0.0, 0.5, 1.0] {
        for tau in [0.2, 0.6, 0.99] {
            let p = params(tau, alpha);
            let mf = mean_field(&p).unwrap();
            assert!((mf.theta.cos() - tau).abs() < 1e-12);
            assert!((mf.y - p.g() * mf.theta.sin() / p.omega_alpha()).abs() < 1e-14);
        }
        let near = mean_field(&params(1.0 - 1e-8, alpha)).unwrap();
        assert!(near.theta < 2e-4);
        assert_eq!(mean_field(&params(1.2, alpha)).unwrap().theta, 0.0);
    }
}

#[test]
fn order_parameter_values() {
    let tau: f64 = 0.6;
    let p = params(tau, 1.0);
    let rho_d = p.rho * p.d;
    assert!((order_parameter(&p).unwrap() + 0.8 * rho_d).abs() < 1e-10 * rho_d);
    assert_eq!(order_parameter(&params(1.0, 0.7)).unwrap(), 0.0);
    assert_eq!(order_parameter(&params(1.4, 0.7)).unwrap(), 0.0);
    for alpha in [0.0, 0.25, 0.5, 1.0] {
        for tau in [0.1, 0.5, 0.9, 0.999] {
            let p = params(tau, alpha);
            let s = (1.0 - tau * tau).sqrt();
            let rd = p.rho * p.d;
            assert!((order_parameter(&p).unwrap() + alpha * rd * s).abs() < 1e-10 * rd);
            assert!((transverse_polarization(&p).unwrap() + rd * s).abs() < 1e-10 * rd);
        }
    }
    // Coulomb partition: no macroscopic canonical field.
    assert_eq!(pi_expectation(&params(0.5, 0.0)).unwrap(), 0.0);
}

#[test]
fn pi_sum_rule() {
    for alpha in [0.0, 0.3, 0.5, 0.8, 1.0] {
        for tau in [0.05, 0.4, 0.8, 0.999, 1.0, 2.0] {
            let p = params(tau, alpha);
            let sum = pi_expectation(&p).unwrap() + order_parameter(&p).unwrap();
            assert!(sum.abs() < 1e-12, "alpha {alpha} tau {tau}: {sum}");
        }
    }
}

#[test]
fn order_parameter_square_root_onset() {
    let taus: Vec<f64> = (0..8).map(|i| 0.9 + 0.0125 * i as f64).collect();
    let x: Vec<f64> = taus.iter().map(|t| 1.0 - t * t).collect();
    let y: Vec<f64> = taus
        .iter()
        .map(|&t| {
            let p = params(t, 1.0);
            order_parameter(&p).unwrap().abs() / (p.rho * p.d)
        })
        .collect();
    let p = gaugeqed::data::power_law_exponent(&x, &y);
    assert!((p - 0.5).abs() < 1e-8, "{p}");
}

#[test]
fn finite_n_approaches_polaritons() {
    for alpha in [0.0, 0.5, 1.0] {
        let p = params(2.0, alpha);
        let (_, em) = polariton_energies(&p, Phase::Normal).unwrap();
        let gap = |n: usize| {
            let q = p.with_size(n, 30);
            finite_n_levels(&q, false).unwrap()[0] - finite_n_levels(&q, true).unwrap()[0]
        };
        let (g8, g16) = (gap(8), gap(16));
        assert!((g16 - em).abs() < (g8 - em).abs());
        assert!((g16 - em).abs() < 0.05, "alpha {alpha}: {g16} vs {em}");
        let eg = thermodynamic_ground_energy(&p, 16.0).unwrap();
        let e0 = finite_n_levels(&p.with_size(16, 30), true).unwrap()[0];
        assert!((eg - e0).abs() < 0.01, "{eg} vs {e0}");
    }
}

#[test]
fn thermodynamic_ground_energy_continuous_at_critical_point() {
    for alpha in [0.0, 0.5, 1.0] {
        let e = |t: f64| thermodynamic_ground_energy(&params(t, alpha), 100.0).unwrap();
        let jump = e(1.0 + 1e-9) - e(1.0 - 1e-9);
        assert!(jump.abs() < 1e-3, "alpha {alpha}: {jump}");
    }
}

/// τ at which the parity-resolved finite-N gap is smallest.
fn gap_minimum(n: usize) -> f64 {
    let base = params(1.0, 1.0).with_size(n, 30);
    let gap = |t: f64| finite_n_gap(&base.with_tau(t)).unwrap();
    let grid: Vec<f64> = (0..=18).map(|i| 0.4 + 0.05 * i as f64).collect();
    let k = (0..grid.len()).min_by(|&a, &b| gap(grid[a]).total_cmp(&gap(grid[b]))).unwrap();
    let (mut a, mut b) = (grid[k.saturating_sub(1)], grid[(k + 1).min(grid.len() - 1)]);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..25 {
        let (c, d) = (b - r * (b - a), a + r * (b - a));
        if gap(c) < gap(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

#[test]
fn finite_n_gap_minimum_drifts_to_critical_point() {
    let mins: Vec<f64> = [4, 6, 8, 10, 12].iter().map(|&n| gap_minimum(n)).collect();
    for w in mins.windows(2) {
        assert!((1.0 - w[1]).abs() < (1.0 - w[0]).abs(), "{mins:?}");
    }
}

#[test]
fn boson_truncation_is_converged() {
    for alpha in [0.0, 1.0] {
        let tail = boson_tail(&params(0.5, alpha).with_size(12, 30)).unwrap();
        assert!(tail < 1e-8, "{tail}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stable_on_own_side(tau in 0.05f64..5.0, alpha in -0.5f64..1.5, omega in 0.2f64..3.0) {
        let p = DickeParams { omega, ..params(tau, alpha) };
        let phase = phase_at(&p);
        let q = hp_quadratic(&p, phase).unwrap();
        prop_assert!(q.is_positive() || (tau - 1.0).abs() < 1e-12);
        let (ep, em) = polariton_energies(&p, phase).unwrap();
        prop_assert!(ep >= em && em >= 0.0);
    }

    #[test]
    fn sum_rule_everywhere(tau in 0.01f64..3.0, alpha in -1.0f64..2.0) {
        let p = params(tau, alpha);
        let s = pi_expectation(&p).unwrap() + order_parameter(&p).unwrap();
        prop_assert!(s.abs() < 1e-12 * (1.0 + p.rho * p.d));
    }
}
