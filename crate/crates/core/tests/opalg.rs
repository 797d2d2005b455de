use faer::c64;
use gaugeqed::opalg::*;
use gaugeqed::Error;
use proptest::prelude::*;

fn herm_from(vals: &[f64], n: usize) -> Operator {
    let mut k = 0;
    let mut next = || {
        let v = vals[k % vals.len()];
        k += 1;
        v
    };
    let mut m = vec![vec![c64::ZERO; n]; n];
    for i in 0..n {
        m[i][i] = c64::new(next(), 0.0);
        for j in i + 1..n {
            let z = c64::new(next(), next());
            m[i][j] = z;
            m[j][i] = z.conj();
        }
    }
    Operator::from_fn(vec![n], |i, j| m[i][j])
}

fn residual(h: &Operator, e: &Eigen) -> f64 {
    let mut r = 0.0f64;
    for k in 0..h.dim() {
        let v = e.vector(k);
        let hv = h.apply(&v);
        for i in 0..h.dim() {
            r = r.max((hv.amp(i) - v.amp(i) * e.values[k]).norm());
        }
    }
    r
}

#[test]
fn tensor_of_identities_is_identity() {
    let t = tensor(&Operator::identity(vec![2]), &Operator::identity(vec![3]));
    assert_eq!(t.dims(), &[2, 3]);
    assert_eq!(max_abs_diff(&t, &Operator::identity(vec![6])), 0.0);
}

#[test]
fn disjoint_factors_commute() {
    let a = tensor(&pauli::z(), &Operator::identity(vec![2]));
    let b = tensor(&Operator::identity(vec![2]), &pauli::z());
    assert_eq!(a.commutator(&b).max_abs(), 0.0);
}

#[test]
fn tensor_matches_index_arithmetic() {
    let x = Operator::from_real_fn(vec![3], |i, j| (i as f64 + 1.0) * 0.3 - (j as f64) * 0.7 + (i * j) as f64);
    let q = quad_x(4);
    let t = tensor(&x, &q);
    for i1 in 0..3 {
        for j1 in 0..3 {
            for i2 in 0..4 {
                for j2 in 0..4 {
                    let want = x.get(i1, j1) * q.get(i2, j2);
                    assert_eq!(t.get(i1 * 4 + i2, j1 * 4 + j2), want);
                }
            }
        }
    }
}

#[test]
fn eig_of_two_level_diagonal() {
    let e = eig_hermitian(&Operator::diagonal(&[0.5, -0.5])).unwrap();
    assert_eq!(e.values, vec![-0.5, 0.5]);
}

#[test]
fn eig_of_oscillator() {
    let n = 5;
    let h = &number(n) + &Operator::identity(vec![n]).scale_real(0.5);
    let h = h.scale_real(1.7);
    let e = eig_hermitian(&h).unwrap();
    for (k, v) in e.values.iter().enumerate() {
        assert!((v - 1.7 * (k as f64 + 0.5)).abs() < 1e-13);
    }
}

// Characteristic polynomial by Faddeev–LeVerrier, then real roots by
// bracketing sign changes on a fine scan plus bisection.
fn charpoly_roots(h: &Operator) -> Vec<f64> {
    let n = h.dim();
    let mut coeffs = vec![c64::ONE; n + 1]; // p(λ) = Σ c_k λ^{n-k}
    let mut m = Operator::zeros(vec![n]);
    for k in 1..=n {
        let shifted = &m + &Operator::identity(vec![n]).scale(coeffs[k - 1]);
        m = h * &shifted;
        coeffs[k] = -m.trace() / (k as f64);
    }
    let p = |x: f64| coeffs.iter().fold(0.0, |acc, c| acc * x + c.re);
    let bound = 1.0 + coeffs.iter().skip(1).map(|c| c.norm()).fold(0.0, f64::max);
    let steps = 200_000;
    let mut roots = vec![];
    let mut xa = -bound;
    let mut pa = p(xa);
    for s in 1..=steps {
        let xb = -bound + 2.0 * bound * s as f64 / steps as f64;
        let pb = p(xb);
        if pa == 0.0 || pa.signum() != pb.signum() {
            let (mut lo, mut hi) = (xa, xb);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if p(lo).signum() == p(mid).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        xa = xb;
        pa = pb;
    }
    roots
}

#[test]
fn eig_matches_characteristic_polynomial_roots() {
    let vals: Vec<f64> = (0..80).map(|k| ((k * 37 % 23) as f64 - 11.0) / 7.0).collect();
    let h = herm_from(&vals, 6);
    let e = eig_hermitian(&h).unwrap();
    let roots = charpoly_roots(&h);
    assert_eq!(roots.len(), 6, "roots {roots:?}");
    for (a, b) in e.values.iter().zip(&roots) {
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }
    assert!(residual(&h, &e) < 1e-10 * h.max_abs());
}

#[test]
fn eig_rejects_non_hermitian() {
    let a = Operator::from_real_fn(vec![2], |i, j| if i == 0 && j == 1 { 1.0 } else { 0.0 });
    match eig_hermitian(&a) {
        Err(Error::NotHermitian { residual, .. }) => assert_eq!(residual, 1.0),
        other => panic!("expected rejection, got {other:?}"),
    }
}

#[test]
fn eig_handles_phase_realizable_and_generic_matrices() {
    // i^n phases make the oscillator quadrature Y real-representable.
    let y = &quad_y(7) + &Operator::diagonal(&[0.1, 0.4, -0.3, 0.9, 0.0, 1.2, -1.1]);
    let e = eig_hermitian(&y).unwrap();
    assert!(residual(&y, &e) < 1e-12);
    // A 3-cycle with a non-trivial flux cannot be made real.
    let w = c64::cis(0.7);
    let m = [[c64::ZERO, c64::ONE, w], [c64::ONE, c64::ZERO, c64::ONE], [w.conj(), c64::ONE, c64::ZERO]];
    let h = Operator::from_fn(vec![3], |i, j| m[i][j]);
    let e = eig_hermitian(&h).unwrap();
    assert!(residual(&h, &e) < 1e-12);
    let vals = eigvals_hermitian(&h).unwrap();
    for (a, b) in vals.iter().zip(&e.values) {
        assert!((a - b).abs() < 1e-13);
    }
    assert!(e.vectors.is_unitary());
}

#[test]
fn expi_of_zero_is_identity() {
    let u = expi(&Operator::zeros(vec![4])).unwrap();
    assert!(max_abs_diff(&u, &Operator::identity(vec![4])) < 1e-15);
}

#[test]
fn expi_pi_sigma_x_is_minus_identity() {
    let u = expi(&pauli::x().scale_real(std::f64::consts::PI)).unwrap();
    let m = Operator::identity(vec![2]).scale_real(-1.0);
    assert!(max_abs_diff(&u, &m) < 1e-15);
}

#[test]
fn evolution_under_constant_diagonal_is_pure_phase() {
    let lam = [0.3, -1.2, 2.5];
    let h = Operator::diagonal(&lam);
    let psi0 = StateVector::new(vec![3], vec![c64::new(0.6, 0.0), c64::new(0.0, 0.48), c64::new(0.64, 0.0)]).unwrap();
    let grid: Vec<f64> = (0..11).map(|k| k as f64 * 0.37).collect();
    let out = evolve_schrodinger(|_| h.clone(), &psi0, &grid, EvolveOptions::default()).unwrap();
    for (t, psi) in grid.iter().zip(&out) {
        for i in 0..3 {
            let want = psi0.amp(i) * c64::cis(-lam[i] * t);
            assert!((psi.amp(i) - want).norm() < 1e-12);
        }
        assert!((psi.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn evolution_under_zero_hamiltonian_is_trivial() {
    let psi0 = StateVector::basis(vec![2, 2], 3);
    let grid = [0.0, 1.0, 2.0];
    let out = evolve_schrodinger(|_| Operator::zeros(vec![2, 2]), &psi0, &grid, EvolveOptions::default()).unwrap();
    for p in out {
        assert_eq!(p.distance(&psi0), 0.0);
    }
}

#[test]
fn piecewise_constant_hamiltonian_matches_product_of_exponentials() {
    let vals: Vec<f64> = (0..200).map(|k| ((k * 53 % 31) as f64 - 15.0) / 9.0).collect();
    let pieces: Vec<Operator> = (0..4).map(|p| herm_from(&vals[p * 30..], 4)).collect();
    let grid = [0.0, 0.4, 0.9, 1.1, 1.8];
    let h_of_t = |t: f64| {
        let k = grid.windows(2).position(|w| t >= w[0] && t < w[1]).unwrap_or(3);
        pieces[k].clone()
    };
    let psi0 = StateVector::basis(vec![4], 1);
    let out = evolve_schrodinger(h_of_t, &psi0, &grid, EvolveOptions::default()).unwrap();
    let mut exact = psi0.clone();
    for k in 0..4 {
        let u = expi(&pieces[k].scale_real(-(grid[k + 1] - grid[k]))).unwrap();
        exact = u.apply(&exact);
        assert!(out[k + 1].distance(&exact) < 1e-8, "interval {k}: {}", out[k + 1].distance(&exact));
    }
}

#[test]
fn evolution_reports_nonconvergence() {
    let h = |t: f64| &pauli::x().scale_real(5.0 * (50.0 * t).cos()) + &pauli::z().scale_real(5.0 * (50.0 * t).sin());
    let psi0 = StateVector::basis(vec![2], 0);
    let opts = EvolveOptions { tol: 1e-14, max_depth: 2, initial_substeps: 1 };
    match evolve_schrodinger(h, &psi0, &[0.0, 1.0], opts) {
        Err(Error::NonConvergence { depth, .. }) => assert_eq!(depth, 2),
        other => panic!("expected non-convergence, got {other:?}"),
    }
}

#[test]
fn downward_jumps_relax_to_ground() {
    let levels = [0.0, 1.0, 2.3, 4.1];
    let h = Operator::diagonal(&levels);
    let mut jumps = vec![];
    for n in 1..4 {
        for m in 0..n {
            let l = Operator::from_real_fn(vec![4], |i, j| if i == m && j == n { 1.0 } else { 0.0 });
            jumps.push((0.1 * (n + m + 1) as f64, l));
        }
    }
    let rho = lindblad_steady(&h, &jumps).unwrap();
    let g = StateVector::basis(vec![4], 0);
    assert!((rho.fidelity_with_pure(&g) - 1.0).abs() < 1e-10);
    assert!(lindblad_residual(&h, &jumps, &rho) < 1e-9);
}

#[test]
fn undamped_diagonal_dynamics_is_flagged_degenerate() {
    let h = Operator::diagonal(&[0.0, 1.0, 3.0]);
    match lindblad_steady(&h, &[]) {
        Err(Error::DegenerateSteadyState { basis }) => assert!(basis.len() >= 3),
        other => panic!("expected degenerate steady state, got {other:?}"),
    }
}

// Driven damped two-level atom in the rotating frame:
// H = −Δ σ⁺σ⁻ + (Ω/2) σ^x, L = √Γ σ⁻.
fn driven_atom(delta: f64, omega: f64, gamma: f64) -> (Operator, Vec<(f64, Operator)>) {
    let h = &(&pauli::plus() * &pauli::minus()).scale_real(-delta) + &pauli::x().scale_real(0.5 * omega);
    (h, vec![(gamma, pauli::minus())])
}

#[test]
fn driven_atom_matches_optical_bloch_formula() {
    let (delta, omega, gamma) = (0.7, 1.3, 0.9);
    let (h, jumps) = driven_atom(delta, omega, gamma);
    let rho = lindblad_steady(&h, &jumps).unwrap();
    let pe = rho.operator().get(1, 1).re;
    let want = 0.25 * omega * omega / (delta * delta + 0.25 * gamma * gamma + 0.5 * omega * omega);
    assert!((pe - want).abs() < 1e-12, "{pe} vs {want}");
}

#[test]
fn driven_atom_matches_long_time_integration() {
    let (delta, omega, gamma) = (-0.4, 2.0, 0.5);
    let (h, jumps) = driven_atom(delta, omega, gamma);
    let rho = lindblad_steady(&h, &jumps).unwrap();
    // Independent RK4 integration of the master equation from the ground state.
    let l = &jumps[0].1;
    let ld = l.adjoint();
    let rhs = |r: &Operator| -> Operator {
        let comm = h.commutator(r).scale(c64::new(0.0, -1.0));
        let diss = &(&(l * r) * &ld) - &(&(&(&ld * l) * r) + &(&(r * &ld) * l)).scale_real(0.5);
        &comm + &diss.scale_real(gamma)
    };
    let mut r = DensityMatrix::pure(&StateVector::basis(vec![2], 0)).operator().clone();
    let dt = 0.01;
    for _ in 0..8000 {
        let k1 = rhs(&r);
        let k2 = rhs(&(&r + &k1.scale_real(dt / 2.0)));
        let k3 = rhs(&(&r + &k2.scale_real(dt / 2.0)));
        let k4 = rhs(&(&r + &k3.scale_real(dt)));
        let inc = &(&k1 + &k2.scale_real(2.0)) + &(&k3.scale_real(2.0) + &k4);
        r = &r + &inc.scale_real(dt / 6.0);
    }
    assert!(max_abs_diff(&r, rho.operator()) < 1e-9);
}

#[test]
fn partial_trace_of_product_is_factor() {
    let a = DensityMatrix::pure(&StateVector::new(vec![2], vec![c64::new(0.6, 0.0), c64::new(0.0, 0.8)]).unwrap());
    let b = DensityMatrix::pure(&StateVector::new(vec![3], vec![c64::new(0.0, 0.6), c64::new(0.8, 0.0), c64::ZERO]).unwrap());
    let ab = a.tensor(&b);
    let ra = partial_trace(&ab, &[0]).unwrap();
    let rb = partial_trace(&ab, &[1]).unwrap();
    assert!(max_abs_diff(ra.operator(), a.operator()) < 1e-15);
    assert!(max_abs_diff(rb.operator(), b.operator()) < 1e-15);
}

#[test]
fn partial_trace_of_bell_pair_is_maximally_mixed() {
    let s = 0.5f64.sqrt();
    let bell = StateVector::new(vec![2, 2], vec![c64::new(s, 0.0), c64::ZERO, c64::ZERO, c64::new(s, 0.0)]).unwrap();
    let r = partial_trace(&DensityMatrix::pure(&bell), &[1]).unwrap();
    assert!(max_abs_diff(r.operator(), &Operator::identity(vec![2]).scale_real(0.5)) < 1e-15);
}

#[test]
fn complementary_reductions_of_pure_state_share_entropy() {
    let amps: Vec<c64> = (0..24).map(|k| c64::new(((k * 7 % 11) as f64 - 5.0) / 3.0, ((k * 5 % 13) as f64 - 6.0) / 4.0)).collect();
    let psi = StateVector::new(vec![2, 3, 4], amps).unwrap().normalized();
    let rho = DensityMatrix::pure(&psi);
    let s1 = partial_trace(&rho, &[0]).unwrap().entropy().unwrap();
    let s23 = partial_trace(&rho, &[1, 2]).unwrap().entropy().unwrap();
    assert!(s1 > 0.01);
    assert!((s1 - s23).abs() < 1e-10);
    let s2 = partial_trace(&rho, &[1]).unwrap().entropy().unwrap();
    let s13 = partial_trace(&rho, &[0, 2]).unwrap().entropy().unwrap();
    assert!((s2 - s13).abs() < 1e-10);
}

#[test]
fn density_matrix_validation() {
    assert!(DensityMatrix::new(Operator::diagonal(&[0.5, 0.6])).is_err());
    assert!(DensityMatrix::new(Operator::diagonal(&[1.5, -0.5])).is_err());
    assert!(DensityMatrix::new(Operator::diagonal(&[0.25, 0.75])).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn expi_inverse_pair(vals in prop::collection::vec(-2.0f64..2.0, 40)) {
        let g = herm_from(&vals, 5);
        let u = expi(&g).unwrap();
        let v = expi(&g.scale_real(-1.0)).unwrap();
        prop_assert!(u.is_unitary());
        prop_assert!(max_abs_diff(&(&u * &v), &Operator::identity(vec![5])) < 1e-12);
    }

    #[test]
    fn conjugation_preserves_spectrum(a in prop::collection::vec(-2.0f64..2.0, 40), b in prop::collection::vec(-2.0f64..2.0, 40)) {
        let h = herm_from(&a, 5);
        let g = herm_from(&b, 5);
        let u = expi(&g).unwrap();
        let e1 = eigvals_hermitian(&h).unwrap();
        let e2 = eigvals_hermitian(&h.conjugate_by(&u).hermitian_part()).unwrap();
        let scale = e1.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (x, y) in e1.iter().zip(&e2) {
            prop_assert!((x - y).abs() < 1e-9 * scale);
        }
    }

    #[test]
    fn constant_hamiltonian_evolution_matches_exponential(a in prop::collection::vec(-1.5f64..1.5, 40), t in 0.1f64..3.0) {
        let h = herm_from(&a, 4);
        let psi0 = StateVector::basis(vec![4], 2);
        let out = evolve_schrodinger(|_| h.clone(), &psi0, &[0.0, t], EvolveOptions::default()).unwrap();
        let exact = expi(&h.scale_real(-t)).unwrap().apply(&psi0);
        prop_assert!(out[1].distance(&exact) < 1e-8);
        prop_assert!((out[1].norm() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn partial_trace_inverts_tensor(p in 0.0f64..1.0, q in 0.0f64..1.0, z in -0.3f64..0.3) {
        let a = DensityMatrix::new(Operator::from_fn(vec![2], |i, j| match (i, j) {
            (0, 0) => c64::new(p, 0.0),
            (1, 1) => c64::new(1.0 - p, 0.0),
            (0, 1) => c64::new(0.0, z * (p * (1.0 - p)).sqrt()),
            _ => c64::new(0.0, -z * (p * (1.0 - p)).sqrt()),
        })).unwrap();
        let b = DensityMatrix::new(Operator::diagonal(&[q * 0.5, q * 0.5, 1.0 - q])).unwrap();
        let ab = a.tensor(&b);
        prop_assert!(max_abs_diff(partial_trace(&ab, &[0]).unwrap().operator(), a.operator()) < 1e-14);
        prop_assert!(max_abs_diff(partial_trace(&ab, &[1]).unwrap().operator(), b.operator()) < 1e-14);
    }
}

#[test]
fn lanczos_ground_state_matches_dense() {
    let n = 150;
    let h = Operator::from_real_fn(vec![n], |i, j| {
        if i == j {
            (i as f64 * 0.37).sin() * 3.0 + i as f64 * 0.05
        } else if i.abs_diff(j) <= 3 {
            0.4 / (1.0 + i.abs_diff(j) as f64)
        } else {
            0.0
        }
    });
    let h = &h + &(&quad_y(n) .scale_real(0.1));
    let dense = eig_hermitian(&h).unwrap();
    let g = ground_state(&h, 1e-11).unwrap();
    assert!((g.energy - dense.values[0]).abs() < 1e-10);
    assert!((g.next_ritz - dense.values[1]).abs() < 1e-6);
    let ov = g.state.inner(&dense.vector(0)).norm();
    assert!((ov - 1.0).abs() < 1e-10);
}
