use gaugeqed::material::*;
use gaugeqed::Error;
use proptest::prelude::*;

fn solve(kind: MaterialKind, levels: usize) -> MaterialSpectrum {
    solve_material(&MaterialModel::auto(kind, levels).unwrap()).unwrap()
}

#[test]
fn harmonic_grid_solution_is_the_oscillator() {
    let s = solve(MaterialKind::Harmonic { omega_m: 1.0 }, 12);
    for (n, e) in s.levels.iter().enumerate() {
        assert!((e - (n as f64 + 0.5)).abs() < 1e-9, "level {n}: {e}");
    }
    assert!((s.x01() - 0.5f64.sqrt()).abs() < 1e-9);
    assert!((s.m_eff - 1.0).abs() < 1e-9);
    assert!(s.mu.abs() < 1e-9);
    // p = i m ω x holds exactly by construction; compare with the ladder form.
    let p01 = s.p(0, 1);
    assert!((p01.im + 0.5f64.sqrt()).abs() < 1e-9);
}

#[test]
fn harmonic_exact_matches_grid_solution() {
    let exact = MaterialSpectrum::harmonic_exact(10);
    let grid = solve(MaterialKind::Harmonic { omega_m: 1.0 }, 10);
    for n in 0..10 {
        for m in 0..10 {
            assert!((exact.x(n, m) - grid.x(n, m)).abs() < 1e-9);
            assert!((exact.x2(n, m) - grid.x2(n, m)).abs() < 1e-8);
        }
    }
}

#[test]
fn double_well_parity_selection() {
    for beta in [1.0, 2.5, 3.6] {
        let s = solve(MaterialKind::DoubleWell { beta }, 8);
        for n in 0..8 {
            for m in 0..8 {
                if (n + m) % 2 == 0 {
                    assert!(s.x(n, m).abs() < 1e-10, "beta {beta}: x[{n},{m}] = {}", s.x(n, m));
                }
            }
        }
    }
}

#[test]
fn levels_converge_under_grid_doubling() {
    let model = MaterialModel::auto(MaterialKind::DoubleWell { beta: 3.0 }, 20).unwrap();
    let a = solve_material(&model).unwrap();
    let finer = MaterialModel { grid: Grid { points: 2 * model.grid.points, ..model.grid }, ..model };
    let b = solve_material(&finer).unwrap();
    for n in 1..20 {
        let (wa, wb) = (a.omega(n, 0), b.omega(n, 0));
        assert!(((wa - wb) / wb).abs() < 1e-8, "transition {n}: {wa} vs {wb}");
    }
}

#[test]
fn calibration_reaches_mu_70() {
    let model = calibrate_anharmonicity(Family::DoubleWell, 70.0, 10).unwrap();
    let s = solve_material(&model).unwrap();
    assert!((s.mu - 70.0).abs() < 1e-3 * 70.0, "mu = {}", s.mu);
    assert!((s.mu - 70.0).abs() < 0.5);
}

#[test]
fn calibration_reaches_mu_3() {
    for family in [Family::DoubleWell, Family::Josephson] {
        let model = calibrate_anharmonicity(family, 3.0, 6).unwrap();
        let s = solve_material(&model).unwrap();
        assert!((s.mu - 3.0).abs() < 3e-3, "{family:?}: mu = {}", s.mu);
    }
}

#[test]
fn calibration_harmonic_is_trivial_and_bracketing_fails_loudly() {
    let m = calibrate_anharmonicity(Family::Harmonic, 0.0, 4).unwrap();
    assert!(solve_material(&m).unwrap().mu.abs() < 1e-9);
    match calibrate_anharmonicity(Family::DoubleWell, 1e9, 4) {
        Err(Error::Bracketing { .. }) => {}
        other => panic!("expected bracketing failure, got {other:?}"),
    }
}

#[test]
fn narrow_grid_is_rejected_with_leak() {
    let model = MaterialModel::new(MaterialKind::DoubleWell { beta: 3.0 }, Grid { half_width: 2.0, points: 200 }, 10).unwrap();
    match solve_material(&model) {
        Err(Error::BoundaryLeak { leak, .. }) => assert!(leak > 1e-8),
        other => panic!("expected leak, got {other:?}"),
    }
}

#[test]
fn model_requires_eight_points_per_level() {
    let g = Grid { half_width: 10.0, points: 79 };
    assert!(MaterialModel::new(MaterialKind::Harmonic { omega_m: 1.0 }, g, 10).is_err());
}

#[test]
fn trk_harmonic_saturates_with_two_levels() {
    let s = MaterialSpectrum::harmonic_exact(6);
    assert!((trk_check(&s, 0, 2).unwrap() - 0.5).abs() < 1e-15);
    assert!((trk_check(&s, 0, 6).unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn trk_two_level_restriction_signs() {
    let s = solve(MaterialKind::DoubleWell { beta: 3.58 }, 6);
    let x01 = s.x01();
    assert!((trk_check(&s, 1, 2).unwrap() + x01 * x01).abs() < 1e-12);
    assert!((trk_check(&s, 0, 2).unwrap() - x01 * x01).abs() < 1e-12);
}

#[test]
fn trk_converges_for_mu_70() {
    let model = calibrate_anharmonicity(Family::DoubleWell, 70.0, 80).unwrap();
    let s = solve_material(&model).unwrap();
    let a = trk_check(&s, 0, 40).unwrap();
    let b = trk_check(&s, 0, 80).unwrap();
    assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    assert!((b - 0.5 / s.m_eff).abs() < 1e-6 * b);
    let c = trk_check(&s, 1, 60).unwrap();
    assert!((a - c).abs() < 1e-5 * a);
}

#[test]
fn position_momentum_commutator_is_canonical_low_in_the_basis() {
    let s = solve(MaterialKind::DoubleWell { beta: 2.0 }, 60);
    let m = 60;
    let x = s.x_op(m).unwrap();
    let p = s.p_op(m).unwrap();
    let c = x.commutator(&p);
    for n in 0..m / 4 {
        for k in 0..m / 4 {
            let want = if n == k { 1.0 } else { 0.0 };
            let z = c.get(n, k);
            assert!(z.re.abs() < 1e-4 && (z.im - want).abs() < 1e-4, "[x,p]_{n}{k} = {z}");
        }
    }
}

#[test]
fn shifted_grid_origin_leaves_spectrum_unchanged() {
    let kind = MaterialKind::DoubleWell { beta: 2.0 };
    let model = MaterialModel::auto(kind, 10).unwrap();
    // A grid with one extra point shifts every node relative to the origin.
    let shifted = MaterialModel { grid: Grid { points: model.grid.points + 1, ..model.grid }, ..model };
    let a = solve_material(&model).unwrap();
    let b = solve_material(&shifted).unwrap();
    for n in 0..10 {
        assert!((a.levels[n] - b.levels[n]).abs() < 1e-8 * a.levels[n].abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn any_double_well_respects_parity(beta in 0.2f64..4.0) {
        let s = solve(MaterialKind::DoubleWell { beta }, 4);
        prop_assert!(s.x(0, 2).abs() < 1e-10);
        prop_assert!(s.x(1, 3).abs() < 1e-10);
        prop_assert!(s.x01() > 0.0);
    }
}
