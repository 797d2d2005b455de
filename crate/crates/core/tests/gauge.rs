use gaugeqed::gauge::*;
use gaugeqed::material::*;
use gaugeqed::opalg::*;
use gaugeqed::Error;
use proptest::prelude::*;
use std::sync::OnceLock;

fn double_well_70() -> &'static MaterialSpectrum {
    static S: OnceLock<MaterialSpectrum> = OnceLock::new();
    S.get_or_init(|| solve_material(&calibrate_anharmonicity(Family::DoubleWell, 70.0, 44).unwrap()).unwrap())
}

fn harmonic() -> &'static MaterialSpectrum {
    static S: OnceLock<MaterialSpectrum> = OnceLock::new();
    S.get_or_init(|| MaterialSpectrum::harmonic_exact(60))
}

fn cfg(material: &MaterialSpectrum, m: usize, nf: usize, delta: f64, eta: f64, alpha: f64) -> SystemConfig<'_> {
    SystemConfig { material, n_levels: m, n_fock: nf, delta, eta, alpha }
}

fn idx(nf: usize, matter: usize, photon: usize) -> usize {
    matter * nf + photon
}

#[test]
fn zero_coupling_is_decoupled() {
    let s = double_well_70();
    for alpha in [0.0, 0.3, 1.0] {
        let c = cfg(s, 6, 8, 1.3, 0.0, alpha);
        let h = build_h_alpha(&c).unwrap();
        let field = Operator::diagonal(&(0..8).map(|n| 1.3 * (n as f64 + 0.5)).collect::<Vec<_>>());
        let want = &tensor(&s.h_op(6).unwrap(), &Operator::identity(vec![8]))
            + &tensor(&Operator::identity(vec![6]), &field);
        assert!(max_abs_diff(&h, &want) < 1e-14);
    }
}

#[test]
fn config_validation() {
    let s = harmonic();
    assert!(SystemConfig::new(s, 4, 1.0, 0.5, 0.0).unwrap().n_fock == 30);
    assert!(cfg(s, 4, 3, 1.0, 0.1, 0.0).validate().is_err());
    assert!(cfg(s, 4, 8, 1.0, -0.1, 0.0).validate().is_err());
    assert!(cfg(s, 4, 8, 0.0, 0.1, 0.0).validate().is_err());
    assert!(cfg(s, 61, 8, 1.0, 0.1, 0.0).validate().is_err());
    assert!(build_h_alpha(&cfg(s, 4, 3, 1.0, 0.1, 0.0)).is_err());
}

#[test]
fn default_fock_cutoff_grows_with_coupling() {
    assert_eq!(default_n_fock(0.0), 20);
    assert_eq!(default_n_fock(0.5), 30);
    assert_eq!(default_n_fock(1.0), 60);
}

fn check_harmonic_bilinears(alpha: f64, eta: f64, delta: f64) {
    let nf = 6;
    let h = build_h_alpha(&cfg(harmonic(), 6, nf, delta, eta, alpha)).unwrap();
    let e = oscillator_eta(eta, delta);
    let u_plus = 0.5 * e * delta.sqrt() * ((1.0 - alpha) - delta * alpha);
    let u_minus = 0.5 * e * delta.sqrt() * ((1.0 - alpha) + delta * alpha);
    // a†b† |00⟩ and a b† |0_b 1_a⟩ carry i u^+ and i u^-.
    let z = h.get(idx(nf, 1, 1), idx(nf, 0, 0));
    assert!(z.re.abs() < 1e-12 && (z.im - u_plus).abs() < 1e-12, "u+ {z} vs {u_plus}");
    let z = h.get(idx(nf, 1, 0), idx(nf, 0, 1));
    assert!(z.re.abs() < 1e-12 && (z.im - u_minus).abs() < 1e-12, "u- {z} vs {u_minus}");
    // Self-energies (η'²ω/4)[(1−α)²(a+a†)² + δα²(b+b†)²].
    let w = delta;
    let sa = e * e * w / 4.0 * (1.0 - alpha).powi(2) * 2f64.sqrt();
    let sb = e * e * w / 4.0 * delta * alpha * alpha * 2f64.sqrt();
    assert!((h.get(idx(nf, 0, 2), idx(nf, 0, 0)).re - sa).abs() < 1e-12);
    assert!((h.get(idx(nf, 2, 0), idx(nf, 0, 0)).re - sb).abs() < 1e-12);
}

#[test]
fn harmonic_bilinear_coefficients_resonant() {
    check_harmonic_bilinears(0.0, 0.4, 1.0);
    check_harmonic_bilinears(1.0, 0.4, 1.0);
    check_harmonic_bilinears(0.5, 1.2, 1.0);
}

#[test]
fn isospectral_across_gauges_mu_70() {
    let s = double_well_70();
    let spectra: Vec<Vec<f64>> = [0.0, 1.0]
        .iter()
        .map(|&a| eigvals_hermitian(&build_h_alpha(&cfg(s, 30, 60, 1.0, 1.0, a)).unwrap()).unwrap())
        .collect();
    for k in 0..8 {
        let (a, b) = (spectra[0][k], spectra[1][k]);
        assert!((a - b).abs() < 1e-9 * a.abs(), "level {k}: {a} vs {b}");
    }
}

#[test]
fn isospectral_across_intermediate_gauges() {
    let s = double_well_70();
    let aj = alpha_jc(1.0, 1.0);
    let reference = eigvals_hermitian(&build_h_alpha(&cfg(s, 24, 30, 1.0, 0.4, 1.0)).unwrap()).unwrap();
    for a in [0.0, 0.25, 0.5, aj] {
        let e = eigvals_hermitian(&build_h_alpha(&cfg(s, 24, 30, 1.0, 0.4, a)).unwrap()).unwrap();
        for k in 0..8 {
            assert!((e[k] - reference[k]).abs() < 1e-9 * reference[k].abs(), "alpha {a} level {k}");
        }
    }
}

#[test]
fn gauge_unitary_identity_inverse_and_unitarity() {
    let c = cfg(double_well_70(), 8, 12, 1.0, 0.6, 0.0);
    let id = gauge_unitary(&c, 0.4, 0.4).unwrap();
    assert!(max_abs_diff(&id, &Operator::identity(c.dims())) < 1e-13);
    let r01 = gauge_unitary(&c, 0.0, 1.0).unwrap();
    let r10 = gauge_unitary(&c, 1.0, 0.0).unwrap();
    assert!(r01.is_unitary());
    assert!(max_abs_diff(&(&r01 * &r10), &Operator::identity(c.dims())) < 1e-12);
}

#[test]
fn transformed_coulomb_matches_multipolar_elementwise() {
    // The truncated R only reproduces the untruncated map on states far from
    // the cutoffs, so compare a low block of a large truncation.
    let s = harmonic();
    let (m, nf) = (40, 50);
    let c0 = cfg(s, m, nf, 1.0, 0.3, 0.0);
    let c1 = c0.with_alpha(1.0);
    let r = gauge_unitary(&c0, 0.0, 1.0).unwrap();
    let moved = build_h_alpha(&c0).unwrap().conjugate_by(&r);
    let direct = build_h_alpha(&c1).unwrap();
    let keep: Vec<usize> = (0..8).flat_map(|i| (0..10).map(move |j| idx(nf, i, j))).collect();
    let a = moved.select(&keep, None).unwrap();
    let b = direct.select(&keep, None).unwrap();
    let scale = b.max_abs();
    assert!(max_abs_diff(&a, &b) < 1e-9 * scale, "{}", max_abs_diff(&a, &b));
}

#[test]
fn transformed_double_well_matches_elementwise() {
    let s = double_well_70();
    let (m, nf) = (40, 50);
    let c1 = cfg(s, m, nf, 1.0, 0.3, 1.0);
    let r = gauge_unitary(&c1, 1.0, 0.5).unwrap();
    let moved = build_h_alpha(&c1).unwrap().conjugate_by(&r);
    let direct = build_h_alpha(&c1.with_alpha(0.5)).unwrap();
    let keep: Vec<usize> = (0..4).flat_map(|i| (0..10).map(move |j| idx(nf, i, j))).collect();
    let a = moved.select(&keep, None).unwrap();
    let b = direct.select(&keep, None).unwrap();
    assert!(max_abs_diff(&a, &b) < 1e-9 * b.max_abs(), "{}", max_abs_diff(&a, &b));
}

#[test]
fn alpha_jc_examples() {
    assert_eq!(alpha_jc(1.0, 1.0), 0.5);
    assert!((alpha_jc(1.0, 1e-12) - 1.0).abs() < 1e-11);
    assert!((alpha_jc(2.0, 6.0) - 0.25).abs() < 1e-15);
}

#[test]
fn gauge_profile_evaluation() {
    assert_eq!(GaugeProfile::Scalar(0.3).alpha_at(1.0, 5.0), 0.3);
    assert_eq!(GaugeProfile::JaynesCummings.alpha_at(1.0, 3.0), 0.25);
    let p = GaugeProfile::Sampled { omegas: vec![1.0, 2.0, 4.0], alphas: vec![0.0, 1.0, 0.5] };
    p.validate().unwrap();
    assert_eq!(p.alpha_at(1.0, 2.0), 1.0);
    assert!((p.alpha_at(1.0, 3.0) - 0.75).abs() < 1e-15);
    assert_eq!(p.alpha_at(1.0, 0.5), 0.0);
    assert_eq!(p.alpha_at(1.0, 9.0), 0.5);
    let bad = GaugeProfile::Sampled { omegas: vec![2.0, 1.0], alphas: vec![0.0, 1.0] };
    assert!(bad.validate().is_err());
}

#[test]
fn uncoupled_ground_has_no_photons() {
    for alpha in [0.0, 0.5, 1.0] {
        let n = ground_photons(&cfg(double_well_70(), 10, 10, 1.0, 0.0, alpha)).unwrap();
        assert!(n.abs() < 1e-14);
    }
}

/// d†d for the harmonic material dressed by its x² self-energy.
fn dressed_matter_number(c: &SystemConfig) -> Operator {
    let s = c.coupling_scale();
    let k = c.alpha * c.alpha * s * s * c.delta;
    let wm = (1.0 + 2.0 * k).sqrt();
    let m = c.n_levels;
    let hm = &c.material.h_op(m).unwrap() + &c.material.x2_op(m).unwrap().scale_real(k);
    let d = &hm.scale_real(1.0 / wm) - &Operator::identity(vec![m]).scale_real(0.5);
    tensor(&d, &Operator::identity(vec![c.n_fock]))
}

#[test]
fn harmonic_jc_ground_state_is_the_dressed_vacuum() {
    for (delta, eta) in [(1.0, 0.5), (0.7, 0.3), (1.5, 0.8)] {
        let c = cfg(harmonic(), 40, 50, delta, eta, alpha_jc(1.0, delta));
        let g = ground(&c).unwrap();
        let nc = dressed_photon_number(&c).unwrap().expect(&g).re;
        let nd = dressed_matter_number(&c).expect(&g).re;
        // 1 − |⟨0_d 0_c|G⟩|² ≤ N_c + N_d
        assert!(nc.abs() < 1e-10 && nd.abs() < 1e-10, "delta {delta} eta {eta}: {nc} {nd}");
        // Projecting the dressed matter onto its two lowest states leaves G unchanged.
        let hm = &c.material.h_op(40).unwrap()
            + &c.material.x2_op(40).unwrap().scale_real((c.alpha * c.coupling_scale()).powi(2) * delta);
        let e = eig_hermitian(&hm).unwrap();
        let p2 = Operator::from_fn(vec![40], |i, j| {
            (0..2).map(|k| e.vectors.get(i, k) * e.vectors.get(j, k).conj()).sum()
        });
        let proj = tensor(&p2, &Operator::identity(vec![50]));
        assert!(1.0 - proj.expect(&g).re < 1e-10);
        // The bare photon number is not zero: the dressed vacuum is squeezed.
        assert!(ground_photons(&c).unwrap() > 1e-6);
    }
}

#[test]
fn photon_number_cross_gauge_contract() {
    let c = cfg(double_well_70(), 12, 20, 1.0, 0.3, 0.0);
    let g = ground(&c).unwrap();
    let n = photon_number_rel(&c).unwrap();
    let r = gauge_unitary(&c, 0.0, 1.0).unwrap();
    let moved = r.apply(&g);
    let n_moved = n.conjugate_by(&r);
    assert!((n.expect(&g).re - n_moved.expect(&moved).re).abs() < 1e-10);
}

#[test]
fn jc_gauge_has_fewest_ground_photons_mu_70() {
    let s = double_well_70();
    let n = |a: f64| {
        let c = cfg(s, 20, 40, 1.0, 0.5, a);
        ground_photons(&c).unwrap()
    };
    let (n0, n1, nj) = (n(0.0), n(1.0), n(alpha_jc(1.0, 1.0)));
    assert!(nj < n0 && nj < n1, "N0 {n0} N1 {n1} NJC {nj}");
}

#[test]
fn ground_photons_grow_continuously_from_zero() {
    let s = double_well_70();
    let mut last = 0.0;
    for k in 1..=5 {
        let eta = 0.05 * k as f64;
        let n = ground_photons(&cfg(s, 16, 24, 1.0, eta, 0.0)).unwrap();
        assert!(n > last && n - last < 0.02, "eta {eta}: {n}");
        last = n;
    }
}

#[test]
fn convergence_report() {
    let s = double_well_70();
    let c = cfg(s, 12, 20, 1.0, 0.2, 1.0);
    let rep = check_convergence(&c, 1e-6, ground_photons).unwrap();
    assert!(rep.converged, "{rep:?}");
    let c = cfg(s, 2, 4, 1.0, 1.0, 0.0);
    let rep = check_convergence(&c, 1e-6, ground_photons).unwrap();
    assert!(!rep.converged);
}

#[test]
fn envelope_derivatives_match_finite_differences() {
    let envs = [
        Envelope::Gaussian { center: 3.0, width: 1.2 },
        Envelope::RaisedCosine { start: 1.0, end: 6.0 },
        Envelope::Constant(0.7),
    ];
    for env in envs {
        for k in 0..40 {
            let t = 0.17 * k as f64 + 0.013;
            let h = 1e-6;
            let fd = (env.value(t + h) - env.value(t - h)) / (2.0 * h);
            assert!((env.derivative(t).unwrap() - fd).abs() < 1e-7, "{env:?} at {t}");
        }
    }
    assert!(Envelope::Step { on: 0.0, off: 1.0 }.derivative(0.5).is_none());
}

fn fast_opts() -> EvolveOptions {
    EvolveOptions { tol: 1e-9, ..EvolveOptions::default() }
}

#[test]
fn switched_off_coupling_creates_no_photons() {
    let c = cfg(double_well_70(), 4, 8, 1.0, 0.3, 0.0);
    let grid: Vec<f64> = (0..11).map(|k| k as f64).collect();
    let n = evolve_switched(&c, &Envelope::Constant(0.0), &grid, fast_opts()).unwrap();
    assert!(n.values.iter().all(|v| v.abs() < 1e-14));
}

#[test]
fn photon_number_frozen_after_sudden_switch_off() {
    let c = cfg(double_well_70(), 4, 10, 1.0, 0.3, 1.0);
    let grid: Vec<f64> = (0..=20).map(|k| 0.5 * k as f64).collect();
    let env = Envelope::Step { on: -1.0, off: 4.0 };
    let n = evolve_switched(&c, &env, &grid, fast_opts()).unwrap();
    let after: Vec<f64> = n.t.iter().zip(&n.values).filter(|(t, _)| **t >= 4.0).map(|(_, v)| *v).collect();
    assert!(after[0] > 1e-4);
    for v in &after {
        assert!((v - after[0]).abs() < 1e-9);
    }
}

#[test]
fn moving_frame_with_equal_gauges_is_the_plain_hamiltonian() {
    let c = cfg(double_well_70(), 4, 8, 1.0, 0.3, 0.4);
    let env = Envelope::Gaussian { center: 2.0, width: 1.0 };
    for t in [0.0, 1.3, 2.0, 3.7] {
        let a = transformed_h_of_t(&c, 0.4, &env, t).unwrap();
        let b = h_of_t(&c, &env, t).unwrap();
        assert!(max_abs_diff(&a, &b) < 1e-14);
    }
}

#[test]
fn constant_envelope_gives_the_static_transform() {
    let c = cfg(double_well_70(), 4, 8, 1.0, 0.3, 1.0);
    let h = transformed_h_of_t(&c, 0.0, &Envelope::Constant(1.0), 0.7).unwrap();
    let r = gauge_unitary(&c, 1.0, 0.0).unwrap();
    let want = build_h_alpha(&c).unwrap().conjugate_by(&r);
    assert!(max_abs_diff(&h, &want) < 1e-12);
}

#[test]
fn step_envelope_cannot_drive_a_moving_frame() {
    let c = cfg(double_well_70(), 4, 8, 1.0, 0.3, 1.0);
    let env = Envelope::Step { on: 0.0, off: 1.0 };
    assert!(matches!(transformed_h_of_t(&c, 0.0, &env, 0.5), Err(Error::InvalidInput(_))));
    assert!(evolve_switched_transformed(&c, 0.0, &env, &[0.0, 1.0], fast_opts()).is_err());
}

#[test]
fn moving_frame_reproduces_photon_number() {
    let c = cfg(double_well_70(), 3, 8, 1.0, 0.3, 1.0);
    let env = Envelope::Gaussian { center: 4.0, width: 1.0 };
    let grid: Vec<f64> = (0..=16).map(|k| 0.5 * k as f64).collect();
    let opts = EvolveOptions { tol: 1e-10, ..EvolveOptions::default() };
    let direct = evolve_switched(&c, &env, &grid, opts).unwrap();
    let moved = evolve_switched_transformed(&c, 0.0, &env, &grid, opts).unwrap();
    assert!(direct.max_diff(&moved) < 1e-8, "{}", direct.max_diff(&moved));
    let other = evolve_switched(&c.with_alpha(0.0), &env, &grid, opts).unwrap();
    assert!(direct.max_diff(&other) > 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn jc_gauge_removes_counter_rotating_terms(wm in 0.1f64..5.0, w in 0.1f64..5.0) {
        let a = alpha_jc(wm, w);
        let delta = w / wm;
        prop_assert!(((1.0 - a) - delta * a).abs() < 1e-15);
    }

    #[test]
    fn harmonic_bilinears_any_gauge(alpha in -0.5f64..1.5, eta in 0.0f64..1.5, delta in 0.2f64..3.0) {
        check_harmonic_bilinears(alpha, eta, delta);
    }

    #[test]
    fn gauge_unitaries_compose(a in 0.0f64..1.0, b in 0.0f64..1.0, c in 0.0f64..1.0) {
        let cf = cfg(double_well_70(), 4, 6, 1.0, 0.5, 0.0);
        let ab = gauge_unitary(&cf, a, b).unwrap();
        let bc = gauge_unitary(&cf, b, c).unwrap();
        let ac = gauge_unitary(&cf, a, c).unwrap();
        prop_assert!(max_abs_diff(&(&bc * &ab), &ac) < 1e-12);
    }
}
